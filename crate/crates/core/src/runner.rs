//! Executes a [`ScenarioConfig`] and writes its artifacts.

use std::path::{Path, PathBuf};

use crate::cauchy::{alpha_convergence_study, AlphaTable, CauchySeed};
use crate::diagnostics::{l2_relative_error, linf_error, total_mass, EnergyMonitor, EnergySample};
use crate::error::{Error, Result};
use crate::exact::{self, SnSolutionSpec};
use crate::grid::Grid;
use crate::hyperbolic::{self, Execution, Observer, StateView, TimeControl};
use crate::interp::{radial_to_cartesian, resample_lattice, RadialProfile};
use crate::output;
use crate::params::ModelParams;
use crate::reference::radial::run_to_steady;
use crate::reference::{run_implicit, ImplicitSolveConfig, RadialGrid, RadialRun};
use crate::scenarios::{self, IcDerivatives, ScenarioConfig, ScenarioKind, SolverChoice};
use crate::state::{FieldState, ScalarField};

/// Cut lines written for 2D snapshots.
pub const CUT_LINES: [f64; 2] = [0.0, 0.4];

/// Series files keep at most about this many rows.
const SERIES_ROWS: usize = 5000;

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub table: Option<AlphaTable>,
    pub hyperbolic: Option<FieldState>,
    pub hyperbolic_steps: usize,
    pub reference: Option<Vec<f64>>,
    pub reference_steps: usize,
    pub energy: Vec<EnergySample>,
    pub predicted: Vec<f64>,
    /// `(time, relative L2, L-infinity)` of reference minus hyperbolic `c`.
    pub comparison: Vec<(f64, f64, f64)>,
    pub radial: Option<RadialRun>,
}

/// Steady radial profile of the bubble test on `settings`' grid.
pub fn radial_steady_profile(cfg: &ScenarioConfig) -> Result<(RadialProfile, RadialRun)> {
    let rs = cfg.radial;
    let grid = RadialGrid::new(rs.r_max, rs.n)?;
    let c0: Vec<f64> = grid.centers().iter().map(|&r| scenarios::radial_bubble_ic(r, cfg.params.gamma)).collect();
    let params = ModelParams::reference(cfg.params.gamma)?;
    let run = run_to_steady(&c0, &grid, &params, &ImplicitSolveConfig::new(rs.dt)?, rs.rate_tol, rs.max_steps)?;
    Ok((RadialProfile::new(grid, run.c.clone())?, run))
}

/// Initial concentration and any exact derivatives on `grid`.
pub fn initial_concentration(cfg: &ScenarioConfig, grid: &Grid, radial: Option<&RadialProfile>) -> Result<(ScalarField, IcDerivatives)> {
    let gamma = cfg.params.gamma;
    Ok(match cfg.base {
        ScenarioKind::ExactSn => {
            let spec = SnSolutionSpec::new(cfg.epsilon, gamma, 0.0)?;
            let c = ScalarField::from_fn(grid, |x, _| exact::sn_solution(&spec, x));
            (c, scenarios::sn_derivatives(&spec, grid))
        }
        ScenarioKind::Spinodal1D => (ScalarField::from_fn(grid, |x, _| scenarios::spinodal_ic(x)), IcDerivatives::default()),
        ScenarioKind::Ostwald1D => (ScalarField::from_fn(grid, |x, _| scenarios::ostwald1d_ic(x, gamma)), IcDerivatives::default()),
        ScenarioKind::Ostwald2D => (ScalarField::from_fn(grid, |x, y| scenarios::ostwald2d_ic(x, y, gamma)), IcDerivatives::default()),
        ScenarioKind::RadialBubble2D => {
            let profile = radial.ok_or_else(|| Error::Config("radial scenario needs its steady profile".into()))?;
            let (c, [gx, gy]) = radial_to_cartesian(profile, grid)?;
            (
                c,
                IcDerivatives {
                    gradient: Some(vec![gx, gy]),
                    laplacian_g1: None,
                },
            )
        }
        ScenarioKind::AlphaTable | ScenarioKind::Custom => {
            return Err(Error::Config(format!("scenario {} has no initial field", cfg.base.name())));
        }
    })
}

/// Output times: snapshots up to `t_end`, then `t_end` itself.
fn stops(cfg: &ScenarioConfig) -> Vec<f64> {
    let mut s: Vec<f64> = cfg.snapshots.iter().copied().filter(|t| *t < cfg.t_end).collect();
    s.sort_by(f64::total_cmp);
    s.dedup();
    s.push(cfg.t_end);
    s
}

struct Segment<'a> {
    inner: &'a mut dyn Observer,
    offset: usize,
    skip_zero: bool,
}

impl Observer for Segment<'_> {
    fn cadence(&self) -> hyperbolic::Cadence {
        self.inner.cadence()
    }

    fn observe(&mut self, step: usize, view: &StateView<'_>) {
        if step == 0 && self.skip_zero {
            return;
        }
        self.inner.observe(step + self.offset, view);
    }
}

/// Keeps a copy of the latest state for blow-up diagnostics.
#[derive(Default)]
struct LastGood {
    cells: Vec<crate::physics::Vars>,
    time: f64,
}

impl Observer for LastGood {
    fn observe(&mut self, _step: usize, view: &StateView<'_>) {
        self.cells.clear();
        self.cells.extend_from_slice(view.cells);
        self.time = view.time;
    }
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        output::write_text(&path, text)?;
        self.files.push(path);
        Ok(())
    }

    fn hyperbolic_snapshot(&mut self, prefix: &str, state: &FieldState, grid: &Grid) -> Result<()> {
        let tag = output::time_tag(state.time);
        if grid.dim == 1 {
            return self.put(&format!("{prefix}_{tag}.csv"), &output::snapshot_csv_1d(state, grid));
        }
        self.put(&format!("{prefix}_{tag}.vtk"), &output::snapshot_vtk(state, grid))?;
        for y0 in CUT_LINES {
            self.put(&format!("{prefix}_{tag}_cut_y{y0}.csv"), &output::cut_csv(state, grid, y0))?;
        }
        Ok(())
    }

    fn reference_snapshot(&mut self, c: &[f64], grid: &Grid, time: f64) -> Result<()> {
        let tag = output::time_tag(time);
        if grid.dim == 1 {
            return self.put(&format!("ref_{tag}.csv"), &output::scalar_csv_1d(c, grid));
        }
        self.put(&format!("ref_{tag}.vtk"), &output::scalar_vtk(c, grid, time))?;
        for y0 in CUT_LINES {
            self.put(&format!("ref_{tag}_cut_y{y0}.csv"), &output::scalar_cut_csv(c, grid, y0))?;
        }
        Ok(())
    }
}

fn stride(n: usize) -> usize {
    n.div_ceil(SERIES_ROWS).max(1)
}

fn thin<T: Clone>(rows: &[T]) -> Vec<T> {
    let s = stride(rows.len());
    let mut out: Vec<T> = rows.iter().step_by(s).cloned().collect();
    if rows.len() > 1 && (rows.len() - 1) % s != 0 {
        out.push(rows[rows.len() - 1].clone());
    }
    out
}

/// Runs `cfg` and writes everything under `cfg.out_dir`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport> {
    cfg.validate()?;
    let mut w = Writer {
        dir: &cfg.out_dir,
        files: Vec::new(),
    };
    let mut report = RunReport::default();

    if cfg.scenario == ScenarioKind::AlphaTable {
        let table = alpha_convergence_study(&cfg.alphas, cfg.params.gamma, cfg.ode_domain, cfg.ode_dx, &CauchySeed::standard())?;
        w.put("table_alpha.csv", &table.to_csv())?;
        report.table = Some(table);
        report.files = w.files;
        return Ok(report);
    }

    let exec = if cfg.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let stops = stops(cfg);

    let profile = if cfg.base == ScenarioKind::RadialBubble2D {
        let (profile, run) = radial_steady_profile(cfg)?;
        w.put("radial_profile.csv", &output::radial_profile_csv(&profile.values, &profile.grid))?;
        report.radial = Some(run);
        Some(profile)
    } else {
        None
    };

    let mut hyp_snaps: Vec<(Grid, Vec<f64>)> = Vec::new();
    if cfg.solver != SolverChoice::Reference {
        let grid = cfg.hyperbolic_grid()?;
        let (c0, derivs) = initial_concentration(cfg, &grid, profile.as_ref())?;
        let mut state = scenarios::initial_state(&c0, &grid, &cfg.params, &derivs, cfg.ic_variant)?;
        let mut monitor = EnergyMonitor::new(&cfg.params);
        let mut last = LastGood::default();
        let mut steps = 0usize;
        for (k, &stop) in stops.iter().enumerate() {
            let ctrl = TimeControl::new(cfg.cfl, stop)?;
            let skip_zero = k > 0;
            let mut mon = Segment {
                inner: &mut monitor,
                offset: steps,
                skip_zero,
            };
            let mut lg = Segment {
                inner: &mut last,
                offset: steps,
                skip_zero,
            };
            let out = match hyperbolic::run(&state, &grid, &cfg.params, &ctrl, cfg.flux, exec, &mut [&mut mon, &mut lg]) {
                Ok(out) => out,
                Err(e @ Error::BlowUp { .. }) => {
                    let layout = crate::physics::Layout::new(grid.dim);
                    let bad = hyperbolic::unpack(&last.cells, layout, last.time);
                    w.hyperbolic_snapshot("blowup_last_good", &bad, &grid)?;
                    return Err(e);
                }
                Err(e) => return Err(e),
            };
            steps += out.steps;
            state = out.state;
            w.hyperbolic_snapshot("hyp", &state, &grid)?;
            hyp_snaps.push((grid.clone(), state.c.clone()));
        }
        let predicted = monitor.predicted()?;
        let idx: Vec<usize> = thin(&(0..monitor.samples.len()).collect::<Vec<_>>());
        let samples: Vec<EnergySample> = idx.iter().map(|&i| monitor.samples[i]).collect();
        let pred: Vec<f64> = idx.iter().map(|&i| predicted[i]).collect();
        w.put("energy_series.csv", &output::energy_series_csv(&samples, &pred))?;
        report.hyperbolic_steps = steps;
        report.energy = monitor.samples;
        report.predicted = predicted;
        report.hyperbolic = Some(state);
    }

    let mut ref_snaps: Vec<(Grid, Vec<f64>)> = Vec::new();
    if cfg.solver != SolverChoice::Hyperbolic {
        let grid = cfg.reference_grid()?;
        let (c0, _) = initial_concentration(cfg, &grid, profile.as_ref())?;
        let params = ModelParams::reference(cfg.params.gamma)?;
        let solve = ImplicitSolveConfig::new(cfg.dt)?;
        let mut c = c0.values;
        let mut t = 0.0;
        let mut steps = 0usize;
        let mut mass = vec![(0.0, total_mass(&c, &grid))];
        for &stop in &stops {
            if stop > t {
                let (next, n) = run_implicit(&c, &grid, &params, &solve, stop - t, exec, |k, s, v| {
                    if k > 0 {
                        mass.push((t + s, total_mass(v, &grid)));
                    }
                })?;
                c = next;
                steps += n;
                t = stop;
            }
            w.reference_snapshot(&c, &grid, t)?;
            ref_snaps.push((grid.clone(), c.clone()));
        }
        w.put("reference_mass.csv", &output::mass_series_csv(&thin(&mass)))?;
        report.reference_steps = steps;
        report.reference = Some(c);
    }

    if cfg.solver == SolverChoice::Both {
        for ((&t, (hg, hc)), (rg, rc)) in stops.iter().zip(&hyp_snaps).zip(&ref_snaps) {
            // compare on the coarser lattice
            let (a, b) = if hg.len() >= rg.len() {
                (rc.clone(), resample_lattice(hc, hg, rg)?)
            } else {
                (resample_lattice(rc, rg, hg)?, hc.clone())
            };
            report.comparison.push((t, l2_relative_error(&a, &b)?, linf_error(&a, &b)?));
        }
        w.put("comparison.csv", &output::comparison_csv(&report.comparison))?;
    }

    report.files = w.files;
    Ok(report)
}
