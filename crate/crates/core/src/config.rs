//! Scenario files and command-line overrides.
//!
//! A file holds one scenario as `key = value` pairs under section headers:
//!
//! ```text
//! [scenario]
//! name = "spinodal"
//! preset = "desk"
//! solver = "both"
//!
//! [params]
//! gamma = 1e-3
//! alpha = 500
//!
//! [grid]
//! nx = 200
//!
//! [time]
//! t_end = 0.2
//! snapshots = [0.1, 0.14]
//! ```
//!
//! Unset keys keep the preset value; [`Overrides`] apply last.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::hyperbolic::FluxChoice;
use crate::scenarios::{IcVariant, Preset, ScenarioConfig, ScenarioKind, SolverChoice};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    scenario: ScenarioSection,
    #[serde(default)]
    params: ParamsSection,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    time: TimeSection,
    #[serde(default)]
    output: OutputSection,
    #[serde(default)]
    radial: RadialSection,
    #[serde(default)]
    alpha_table: AlphaSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSection {
    name: String,
    preset: Option<String>,
    base: Option<String>,
    solver: Option<String>,
    flux: Option<String>,
    ic_variant: Option<String>,
    epsilon: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsSection {
    gamma: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    tau: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    nx: Option<usize>,
    ny: Option<usize>,
    ref_nx: Option<usize>,
    ref_ny: Option<usize>,
    xl: Option<f64>,
    xr: Option<f64>,
    yl: Option<f64>,
    yr: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimeSection {
    cfl: Option<f64>,
    dt: Option<f64>,
    t_end: Option<f64>,
    snapshots: Option<Vec<f64>>,
    sequential: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadialSection {
    r_max: Option<f64>,
    n: Option<usize>,
    dt: Option<f64>,
    rate_tol: Option<f64>,
    max_steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlphaSection {
    alphas: Option<Vec<f64>>,
    dx: Option<f64>,
    x0: Option<f64>,
    x1: Option<f64>,
}

/// Values given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub solver: Option<SolverChoice>,
    pub flux: Option<FluxChoice>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub cfl: Option<f64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub tau: Option<f64>,
    pub gamma: Option<f64>,
    pub ic_variant: Option<IcVariant>,
    pub out: Option<PathBuf>,
    pub snapshots: Option<Vec<f64>>,
    pub sequential: bool,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Parses a comma-separated list of times.
pub fn parse_times(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Error::Config(format!("bad time '{t}'"))))
        .collect()
}

impl Overrides {
    /// Applies the overrides to `cfg`. `nx` also sets the reference
    /// resolution, and `ny` on a square-default 2D scenario is independent.
    pub fn apply(&self, cfg: &mut ScenarioConfig) {
        set(&mut cfg.solver, self.solver);
        set(&mut cfg.flux, self.flux);
        if let Some(nx) = self.nx {
            cfg.nx = nx;
            cfg.ref_nx = None;
        }
        if let Some(ny) = self.ny {
            cfg.ny = ny;
            cfg.ref_ny = None;
        }
        set(&mut cfg.cfl, self.cfl);
        set(&mut cfg.dt, self.dt);
        set(&mut cfg.t_end, self.t_end);
        set(&mut cfg.params.alpha, self.alpha);
        set(&mut cfg.params.beta, self.beta);
        set(&mut cfg.params.tau, self.tau);
        set(&mut cfg.params.gamma, self.gamma);
        set(&mut cfg.ic_variant, self.ic_variant);
        set(&mut cfg.out_dir, self.out.clone());
        set(&mut cfg.snapshots, self.snapshots.clone());
        if self.sequential {
            cfg.sequential = true;
        }
    }
}

fn parse_opt<T: std::str::FromStr<Err = Error>>(v: &Option<String>) -> Result<Option<T>> {
    v.as_deref().map(str::parse).transpose()
}

/// Builds a configuration from file text. Relative output directories are
/// kept as given.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let file: FileConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let kind: ScenarioKind = file.scenario.name.parse()?;
    let preset = parse_opt::<Preset>(&file.scenario.preset)?.unwrap_or(Preset::Desk);
    let mut cfg = ScenarioConfig::preset(kind, preset);

    let s = &file.scenario;
    set(&mut cfg.base, parse_opt(&s.base)?);
    set(&mut cfg.solver, parse_opt(&s.solver)?);
    if let Some(f) = &s.flux {
        cfg.flux = f.parse().map_err(|_| Error::Config(format!("unknown flux '{f}'")))?;
    }
    set(&mut cfg.ic_variant, parse_opt(&s.ic_variant)?);
    set(&mut cfg.epsilon, s.epsilon);

    let p = &file.params;
    set(&mut cfg.params.gamma, p.gamma);
    set(&mut cfg.params.alpha, p.alpha);
    set(&mut cfg.params.beta, p.beta);
    set(&mut cfg.params.tau, p.tau);

    let g = &file.grid;
    set(&mut cfg.nx, g.nx);
    set(&mut cfg.ny, g.ny);
    if g.ref_nx.is_some() || g.nx.is_some() {
        cfg.ref_nx = g.ref_nx;
    }
    if g.ref_ny.is_some() || g.ny.is_some() {
        cfg.ref_ny = g.ref_ny;
    }
    if g.xl.is_some() || g.xr.is_some() || g.yl.is_some() || g.yr.is_some() {
        let (xl, xr, yl, yr) = cfg.resolved_domain()?;
        cfg.domain = Some((g.xl.unwrap_or(xl), g.xr.unwrap_or(xr), g.yl.unwrap_or(yl), g.yr.unwrap_or(yr)));
    }

    let t = &file.time;
    set(&mut cfg.cfl, t.cfl);
    set(&mut cfg.dt, t.dt);
    set(&mut cfg.t_end, t.t_end);
    set(&mut cfg.snapshots, t.snapshots.clone());
    set(&mut cfg.sequential, t.sequential);

    set(&mut cfg.out_dir, file.output.dir.clone());

    let r = &file.radial;
    set(&mut cfg.radial.r_max, r.r_max);
    set(&mut cfg.radial.n, r.n);
    set(&mut cfg.radial.dt, r.dt);
    set(&mut cfg.radial.rate_tol, r.rate_tol);
    set(&mut cfg.radial.max_steps, r.max_steps);

    let a = &file.alpha_table;
    set(&mut cfg.alphas, a.alphas.clone());
    set(&mut cfg.ode_dx, a.dx);
    set(&mut cfg.ode_domain.0, a.x0);
    set(&mut cfg.ode_domain.1, a.x1);
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}
