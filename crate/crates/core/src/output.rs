//! On-disk artifacts: snapshot CSV and legacy VTK files, cut lines and
//! diagnostic series.
//!
//! Numbers are written in Rust's shortest round-trip form, so a rerun with
//! identical arithmetic produces identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::diagnostics::EnergySample;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::interp::lagrange5;
use crate::reference::RadialGrid;
use crate::state::FieldState;

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Label used in snapshot file names.
pub fn time_tag(t: f64) -> String {
    format!("t{t:.6}")
}

fn join_row(s: &mut String, vals: &[f64]) {
    for (k, v) in vals.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        let _ = write!(s, "{v:e}");
    }
    s.push('\n');
}

fn component_names(dim: usize) -> Vec<String> {
    let mut names = vec!["c".to_string(), "phi".into(), "w".into()];
    names.extend((1..=dim).map(|k| format!("q{k}")));
    names.extend((1..=dim).map(|k| format!("p{k}")));
    names
}

fn components(state: &FieldState) -> Vec<&[f64]> {
    let mut out: Vec<&[f64]> = vec![&state.c, &state.phi, &state.w];
    out.extend(state.q.iter().map(|v| v.as_slice()));
    out.extend(state.p.iter().map(|v| v.as_slice()));
    out
}

/// `# x,c,phi,w,q1,p1` followed by one row per cell.
pub fn snapshot_csv_1d(state: &FieldState, grid: &Grid) -> String {
    let mut s = format!("# x,{}\n", component_names(1).join(","));
    let comps = components(state);
    for i in 0..grid.nx {
        let mut row = vec![grid.x_center(i)];
        row.extend(comps.iter().map(|f| f[i]));
        join_row(&mut s, &row);
    }
    s
}

/// `# x,c` for solvers that only evolve `c`.
pub fn scalar_csv_1d(c: &[f64], grid: &Grid) -> String {
    let mut s = String::from("# x,c\n");
    for (i, v) in c.iter().enumerate() {
        join_row(&mut s, &[grid.x_center(i), *v]);
    }
    s
}

/// `# r,c` radial profile.
pub fn radial_profile_csv(c: &[f64], grid: &RadialGrid) -> String {
    let mut s = String::from("# r,c\n");
    for (i, v) in c.iter().enumerate() {
        join_row(&mut s, &[grid.r(i), *v]);
    }
    s
}

fn vtk_header(grid: &Grid, title: &str) -> String {
    format!(
        "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET STRUCTURED_POINTS\nDIMENSIONS {} {} 1\nORIGIN {:e} {:e} 0\nSPACING {:e} {:e} 1\nPOINT_DATA {}\n",
        grid.nx,
        grid.ny,
        grid.x_center(0),
        grid.y_center(0),
        grid.dx,
        grid.dy,
        grid.len()
    )
}

fn vtk_block(s: &mut String, name: &str, f: &[f64]) {
    let _ = write!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default\n");
    for v in f {
        let _ = writeln!(s, "{v:e}");
    }
}

/// Legacy ASCII VTK, points at the cell centres, one `SCALARS` block per
/// component.
pub fn snapshot_vtk(state: &FieldState, grid: &Grid) -> String {
    let mut s = vtk_header(grid, &format!("hypch t={:e}", state.time));
    for (name, f) in component_names(grid.dim).iter().zip(components(state)) {
        vtk_block(&mut s, name, f);
    }
    s
}

pub fn scalar_vtk(c: &[f64], grid: &Grid, time: f64) -> String {
    let mut s = vtk_header(grid, &format!("hypch t={time:e}"));
    vtk_block(&mut s, "c", c);
    s
}

/// Degree-4 interpolation of a 2D lattice field along the row `y = y0`
/// (periodic in `y`).
pub fn cut_at_y(f: &[f64], grid: &Grid, y0: f64) -> Vec<f64> {
    let s = (y0 - grid.yl) / grid.dy - 0.5;
    let start = s.round() as isize - 2;
    let ny = grid.ny as isize;
    let rows: Vec<usize> = (0..5).map(|k| (start + k).rem_euclid(ny) as usize).collect();
    let t = s - start as f64;
    (0..grid.nx)
        .map(|i| {
            let mut w = [0.0; 5];
            for (k, &j) in rows.iter().enumerate() {
                w[k] = f[grid.idx(i, j)];
            }
            lagrange5(&w, t).0
        })
        .collect()
}

/// All components along `y = y0`, header `# x,c,phi,w,q1,q2,p1,p2`.
pub fn cut_csv(state: &FieldState, grid: &Grid, y0: f64) -> String {
    let mut s = format!("# x,{}\n", component_names(grid.dim).join(","));
    let cuts: Vec<Vec<f64>> = components(state).iter().map(|f| cut_at_y(f, grid, y0)).collect();
    for i in 0..grid.nx {
        let mut row = vec![grid.x_center(i)];
        row.extend(cuts.iter().map(|c| c[i]));
        join_row(&mut s, &row);
    }
    s
}

pub fn scalar_cut_csv(c: &[f64], grid: &Grid, y0: f64) -> String {
    let mut s = String::from("# x,c\n");
    for (i, v) in cut_at_y(c, grid, y0).iter().enumerate() {
        join_row(&mut s, &[grid.x_center(i), *v]);
    }
    s
}

/// `time,E,E_I,E_II,mass,E_predicted`.
pub fn energy_series_csv(samples: &[EnergySample], predicted: &[f64]) -> String {
    let mut s = String::from("time,E,E_I,E_II,mass,E_predicted\n");
    for (k, e) in samples.iter().enumerate() {
        let pred = predicted.get(k).copied().unwrap_or(f64::NAN);
        join_row(&mut s, &[e.time, e.energy, e.energy_i, e.energy_ii, e.mass, pred]);
    }
    s
}

/// `time,mass` for the reference solver.
pub fn mass_series_csv(rows: &[(f64, f64)]) -> String {
    let mut s = String::from("time,mass\n");
    for (t, m) in rows {
        join_row(&mut s, &[*t, *m]);
    }
    s
}

/// `time,l2_rel_c,linf_c`.
pub fn comparison_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut s = String::from("time,l2_rel_c,linf_c\n");
    for (t, l2, li) in rows {
        join_row(&mut s, &[*t, *l2, *li]);
    }
    s
}
