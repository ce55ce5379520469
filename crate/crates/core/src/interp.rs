//! Piecewise degree-4 Lagrange interpolation on uniform cell-centred
//! samples: radial profiles mapped onto Cartesian grids, and periodic 1D
//! resampling between resolutions.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::reference::RadialGrid;
use crate::state::ScalarField;

/// Value and derivative at `t` of the quartic through `(k, f[k])`,
/// `k = 0..5`, in units of the node spacing.
pub(crate) fn lagrange5(f: &[f64; 5], t: f64) -> (f64, f64) {
    let mut val = 0.0;
    let mut der = 0.0;
    for k in 0..5 {
        let xk = k as f64;
        let mut denom = 1.0;
        let mut prod = 1.0;
        for m in 0..5 {
            if m != k {
                denom *= xk - m as f64;
                prod *= t - m as f64;
            }
        }
        // d/dt prod_{m != k} (t - m)
        let mut dprod = 0.0;
        for skip in 0..5 {
            if skip == k {
                continue;
            }
            let mut p = 1.0;
            for m in 0..5 {
                if m != k && m != skip {
                    p *= t - m as f64;
                }
            }
            dprod += p;
        }
        val += f[k] * prod / denom;
        der += f[k] * dprod / denom;
    }
    (val, der)
}

/// A radial profile sampled at the cells of a [`RadialGrid`], extended
/// evenly through `r = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::ShapeMismatch {
                field: "profile",
                expected: grid.n,
                actual: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    /// `(c(r), c'(r))`.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        let r_max = self.grid.r_max();
        if !(r >= 0.0 && r <= r_max) {
            return Err(Error::OutOfRange { r, r_max });
        }
        let n = self.grid.n as isize;
        let dr = self.grid.dr;
        // fractional node coordinate: node i sits at s = i
        let s = r / dr - 0.5;
        let start = (s.round() as isize - 2).min(n - 5);
        let mut f = [0.0; 5];
        for (k, v) in f.iter_mut().enumerate() {
            let j = start + k as isize;
            // node -1 - j mirrors node j
            let idx = if j < 0 { -1 - j } else { j };
            *v = self.values[idx as usize];
        }
        let (v, d) = lagrange5(&f, s - start as f64);
        Ok((v, d / dr))
    }
}

/// Samples `c(x, y) = profile(sqrt(x^2 + y^2))` at the cell centres and the
/// gradient `c'(r) (x, y)/r` (zero at `r = 0`).
pub fn radial_to_cartesian(profile: &RadialProfile, grid: &Grid) -> Result<(ScalarField, [Vec<f64>; 2])> {
    let n = grid.len();
    let mut c = Vec::with_capacity(n);
    let mut gx = Vec::with_capacity(n);
    let mut gy = Vec::with_capacity(n);
    for j in 0..grid.ny {
        let y = grid.y_center(j);
        for i in 0..grid.nx {
            let x = grid.x_center(i);
            let r = x.hypot(y);
            let (v, d) = profile.eval(r)?;
            c.push(v);
            if r > 0.0 {
                gx.push(d * x / r);
                gy.push(d * y / r);
            } else {
                gx.push(0.0);
                gy.push(0.0);
            }
        }
    }
    Ok((ScalarField { values: c }, [gx, gy]))
}

/// Degree-4 interpolation of periodic cell-centred samples on `[lo, hi]` at
/// arbitrary points.
pub fn periodic_resample(values: &[f64], lo: f64, hi: f64, at: &[f64]) -> Vec<f64> {
    let n = values.len() as isize;
    let h = (hi - lo) / n as f64;
    at.iter()
        .map(|&x| {
            let s = (x - lo) / h - 0.5;
            let start = s.round() as isize - 2;
            let mut f = [0.0; 5];
            for (k, v) in f.iter_mut().enumerate() {
                *v = values[(start + k as isize).rem_euclid(n) as usize];
            }
            lagrange5(&f, s - start as f64).0
        })
        .collect()
}

/// Periodic degree-4 resampling of a lattice field onto another lattice
/// over the same domain (x first, then y).
pub fn resample_lattice(values: &[f64], from: &Grid, to: &Grid) -> Result<Vec<f64>> {
    if values.len() != from.len() {
        return Err(Error::ShapeMismatch {
            field: "values",
            expected: from.len(),
            actual: values.len(),
        });
    }
    if from.dim != to.dim {
        return Err(Error::InvalidParameter("lattices differ in dimension".into()));
    }
    if from.nx == to.nx && from.ny == to.ny {
        return Ok(values.to_vec());
    }
    let xs = crate::grid::axis_centers(to.xl, to.xr, to.nx);
    let rows: Vec<Vec<f64>> = (0..from.ny)
        .map(|j| periodic_resample(&values[j * from.nx..(j + 1) * from.nx], from.xl, from.xr, &xs))
        .collect();
    if from.dim == 1 {
        return Ok(rows.into_iter().next().unwrap_or_default());
    }
    let ys = crate::grid::axis_centers(to.yl, to.yr, to.ny);
    let mut out = vec![0.0; to.len()];
    for i in 0..to.nx {
        let col: Vec<f64> = rows.iter().map(|r| r[i]).collect();
        for (j, v) in periodic_resample(&col, from.yl, from.yr, &ys).into_iter().enumerate() {
            out[to.idx(i, j)] = v;
        }
    }
    Ok(out)
}
