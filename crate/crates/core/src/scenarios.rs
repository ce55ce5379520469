//! Benchmark initial data, well-prepared states and scenario presets.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::exact::{self, SnSolutionSpec};
use crate::grid::Grid;
use crate::hyperbolic::FluxChoice;
use crate::params::ModelParams;
use crate::state::{FieldState, ScalarField};

fn front_width(gamma: f64) -> f64 {
    (2.0 * gamma).sqrt()
}

/// Deterministic small perturbation of `c = 0` on `[-1, 1]`, odd in `x`.
pub fn spinodal_ic(x: f64) -> f64 {
    use std::f64::consts::PI;
    let branch = |u: f64| 0.01 * ((10.0 * PI * u).sin() - (10.0 * PI * u * u).sin());
    if x <= 0.0 {
        branch(1.0 + x)
    } else {
        -branch(1.0 - x)
    }
}

/// Bubble centres and radii of the 1D ripening test.
pub const BUBBLES_1D: [(f64, f64); 2] = [(0.30, 0.12), (0.75, 0.06)];

/// `(x_i, y_i, r_i)` of the eight bubbles of the 2D ripening test.
pub const BUBBLES_2D: [(f64, f64, f64); 8] = [
    (0.00, 0.10, 0.15),
    (-0.30, -0.40, 0.10),
    (-0.30, 0.40, 0.10),
    (-0.35, 0.00, 0.06),
    (0.00, -0.30, 0.07),
    (0.25, 0.45, 0.06),
    (0.30, -0.35, 0.08),
    (0.35, 0.05, 0.07),
];

pub fn ostwald1d_ic(x: f64, gamma: f64) -> f64 {
    let w = front_width(gamma);
    BUBBLES_1D
        .iter()
        .fold(1.0, |c, &(xi, ri)| c + ((x - xi - ri) / w).tanh() - ((x - xi + ri) / w).tanh())
}

pub fn ostwald2d_ic(x: f64, y: f64, gamma: f64) -> f64 {
    let w = front_width(gamma);
    BUBBLES_2D.iter().fold(1.0, |c, &(xi, yi, rb)| {
        let r = (x - xi).hypot(y - yi);
        c + ((r - rb) / w).tanh() - ((r + rb) / w).tanh()
    })
}

/// Initial radial profile `-tanh((r - 0.5)/sqrt(2 gamma))`.
pub fn radial_bubble_ic(r: f64, gamma: f64) -> f64 {
    -((r - 0.5) / front_width(gamma)).tanh()
}

/// Two tanh fronts at a quarter and three quarters of `[0, l]` (phase `+1`
/// between them), summed over periodic images so the profile is smooth
/// across the seam.
pub fn tanh_pair_periodic(x: f64, l: f64, gamma: f64) -> f64 {
    let w = front_width(gamma);
    (-2..=2).fold(-1.0, |s, k| {
        let x = x + k as f64 * l;
        s + ((x - 0.25 * l) / w).tanh() - ((x - 0.75 * l) / w).tanh()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IcVariant {
    #[default]
    WellPrepared,
    /// `p = 0`, `w = 0`.
    Ic1,
    /// `w = 0`.
    Ic2,
    /// `phi = 0`, `p = 0`, `w = 0`.
    Ic3,
}

impl std::str::FromStr for IcVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wp" | "well-prepared" | "wellprepared" => Ok(Self::WellPrepared),
            "ic1" => Ok(Self::Ic1),
            "ic2" => Ok(Self::Ic2),
            "ic3" => Ok(Self::Ic3),
            other => Err(Error::Config(format!("unknown ic variant '{other}'"))),
        }
    }
}

/// Fourth-order central first derivative along x or y (periodic).
fn central_gradient(f: &[f64], grid: &Grid, axis: usize) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (at, h): (Box<dyn Fn(isize) -> f64>, f64) = if axis == 0 {
                (Box::new(|o| f[grid.idx(grid.wrap_x(i, o), j)]), grid.dx)
            } else {
                (Box::new(|o| f[grid.idx(i, grid.wrap_y(j, o))]), grid.dy)
            };
            out[grid.idx(i, j)] = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
        }
    }
    out
}

/// Second-order 3-point (5-point in 2D) Laplacian (periodic).
pub fn central_laplacian(f: &[f64], grid: &Grid) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let x = |o: isize| f[grid.idx(grid.wrap_x(i, o), j)];
            let mut v = (x(1) - 2.0 * x(0) + x(-1)) / (grid.dx * grid.dx);
            if grid.dim == 2 {
                let y = |o: isize| f[grid.idx(i, grid.wrap_y(j, o))];
                v += (y(1) - 2.0 * y(0) + y(-1)) / (grid.dy * grid.dy);
            }
            out[grid.idx(i, j)] = v;
        }
    }
    out
}

/// Optional exact derivatives of `c0` at the cell centres.
#[derive(Debug, Clone, Default)]
pub struct IcDerivatives {
    /// One lattice per dimension.
    pub gradient: Option<Vec<Vec<f64>>>,
    /// Laplacian of `c0^3 - c0`.
    pub laplacian_g1: Option<Vec<f64>>,
}

/// `c = phi = c0`, `p = grad c0`, `w = beta lap(c0^3 - c0)`, `q = 0`.
///
/// Missing derivatives fall back to 4th-order central gradients and a
/// 2nd-order central Laplacian.
pub fn well_prepared_ic(c0: &ScalarField, grid: &Grid, params: &ModelParams, derivs: &IcDerivatives) -> Result<FieldState> {
    let n = grid.len();
    if c0.len() != n {
        return Err(Error::ShapeMismatch {
            field: "c",
            expected: n,
            actual: c0.len(),
        });
    }
    let p = match &derivs.gradient {
        Some(g) => {
            if g.len() != grid.dim || g.iter().any(|v| v.len() != n) {
                return Err(Error::ShapeMismatch {
                    field: "gradient",
                    expected: n,
                    actual: g.first().map_or(0, |v| v.len()),
                });
            }
            g.clone()
        }
        None => (0..grid.dim).map(|a| central_gradient(&c0.values, grid, a)).collect(),
    };
    let lap = match &derivs.laplacian_g1 {
        Some(l) => l.clone(),
        None => {
            let g1: Vec<f64> = c0.values.iter().map(|c| c * c * c - c).collect();
            central_laplacian(&g1, grid)
        }
    };
    let w = lap.iter().map(|v| params.beta * v).collect();
    let state = FieldState {
        c: c0.values.clone(),
        phi: c0.values.clone(),
        w,
        q: vec![vec![0.0; n]; grid.dim],
        p,
        time: 0.0,
    };
    if let Some((field, index)) = state.find_non_finite() {
        return Err(Error::NonFinite { field, index });
    }
    Ok(state)
}

/// Well-prepared state, then stripped according to `variant`.
pub fn initial_state(c0: &ScalarField, grid: &Grid, params: &ModelParams, derivs: &IcDerivatives, variant: IcVariant) -> Result<FieldState> {
    let mut s = well_prepared_ic(c0, grid, params, derivs)?;
    let zero = |v: &mut Vec<f64>| v.iter_mut().for_each(|x| *x = 0.0);
    match variant {
        IcVariant::WellPrepared => {}
        IcVariant::Ic1 => {
            s.p.iter_mut().for_each(zero);
            zero(&mut s.w);
        }
        IcVariant::Ic2 => zero(&mut s.w),
        IcVariant::Ic3 => {
            zero(&mut s.phi);
            s.p.iter_mut().for_each(zero);
            zero(&mut s.w);
        }
    }
    Ok(s)
}

/// Exact derivatives of the sn profile on a 1D grid.
pub fn sn_derivatives(spec: &SnSolutionSpec, grid: &Grid) -> IcDerivatives {
    let xs: Vec<f64> = (0..grid.nx).map(|i| grid.x_center(i)).collect();
    let grad: Vec<f64> = xs.iter().map(|&x| exact::sn_solution_derivative(spec, x)).collect();
    // (c^3 - c)'' = (3c^2 - 1) c'' + 6 c c'^2
    let lap = xs
        .iter()
        .zip(&grad)
        .map(|(&x, &d)| {
            let c = exact::sn_solution(spec, x);
            let c2 = exact::sn_solution_second_derivative(spec, x);
            (3.0 * c * c - 1.0) * c2 + 6.0 * c * d * d
        })
        .collect();
    IcDerivatives {
        gradient: Some(vec![grad]),
        laplacian_g1: Some(lap),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    AlphaTable,
    ExactSn,
    Spinodal1D,
    Ostwald1D,
    RadialBubble2D,
    Ostwald2D,
    /// Uses another scenario's initial data with user grid and parameters.
    Custom,
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "alphatable" | "tablealpha" => Ok(Self::AlphaTable),
            "exactsn" | "sn" => Ok(Self::ExactSn),
            "spinodal" | "spinodal1d" => Ok(Self::Spinodal1D),
            "ostwald1d" => Ok(Self::Ostwald1D),
            "radial2d" | "radialbubble2d" | "radial" => Ok(Self::RadialBubble2D),
            "ostwald2d" => Ok(Self::Ostwald2D),
            "custom" => Ok(Self::Custom),
            _ => Err(Error::Config(format!("unknown scenario '{s}'"))),
        }
    }
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::AlphaTable => "alpha-table",
            Self::ExactSn => "exact-sn",
            Self::Spinodal1D => "spinodal1d",
            Self::Ostwald1D => "ostwald1d",
            Self::RadialBubble2D => "radial2d",
            Self::Ostwald2D => "ostwald2d",
            Self::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Hyperbolic,
    Reference,
    Both,
}

impl std::str::FromStr for SolverChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hyperbolic" | "hyp" => Ok(Self::Hyperbolic),
            "reference" | "ref" => Ok(Self::Reference),
            "both" => Ok(Self::Both),
            other => Err(Error::Config(format!("unknown solver '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Paper,
    Desk,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paper" => Ok(Self::Paper),
            "desk" => Ok(Self::Desk),
            other => Err(Error::Config(format!("unknown preset '{other}'"))),
        }
    }
}

/// Courant number of the 2D presets. The step rule `cfl * min(dx, dy) /
/// lambda` leaves the unsplit 2D update stable only up to about 1/2, so a
/// total Courant number of 0.9 is split over the two directions.
pub const CFL_2D: f64 = 0.45;

/// Settings of the radial pre-computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSettings {
    pub r_max: f64,
    pub n: usize,
    pub dt: f64,
    pub rate_tol: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    /// For [`ScenarioKind::Custom`], whose initial data to use.
    pub base: ScenarioKind,
    pub solver: SolverChoice,
    pub params: ModelParams,
    pub nx: usize,
    pub ny: usize,
    /// Reference-solver resolution when it differs from the hyperbolic one.
    pub ref_nx: Option<usize>,
    pub ref_ny: Option<usize>,
    /// `(xl, xr, yl, yr)`; the y-range is ignored in 1D. `None` for the sn
    /// scenario means `[0, 2 lambda]`.
    pub domain: Option<(f64, f64, f64, f64)>,
    pub flux: FluxChoice,
    pub cfl: f64,
    /// Fixed time step of the reference solver.
    pub dt: f64,
    pub t_end: f64,
    pub out_dir: PathBuf,
    pub snapshots: Vec<f64>,
    pub ic_variant: IcVariant,
    pub sequential: bool,
    /// Amplitude parameter of the sn profile.
    pub epsilon: f64,
    pub radial: RadialSettings,
    /// Penalty values of the alpha study (ascending).
    pub alphas: Vec<f64>,
    /// Spacing of the alpha study.
    pub ode_dx: f64,
    /// Interval of the alpha study.
    pub ode_domain: (f64, f64),
}

impl ScenarioConfig {
    pub fn preset(kind: ScenarioKind, preset: Preset) -> Self {
        let paper = preset == Preset::Paper;
        let mut cfg = Self {
            scenario: kind,
            base: kind,
            solver: SolverChoice::Hyperbolic,
            params: ModelParams::unchecked(1e-3, 500.0, 1e-6, 1e-4),
            nx: 200,
            ny: 1,
            ref_nx: None,
            ref_ny: None,
            domain: Some((0.0, 1.0, 0.0, 1.0)),
            flux: FluxChoice::Force,
            cfl: 0.95,
            dt: 1e-5,
            t_end: 0.1,
            out_dir: PathBuf::from(kind.name()),
            snapshots: Vec::new(),
            ic_variant: IcVariant::WellPrepared,
            sequential: false,
            epsilon: 0.01,
            radial: RadialSettings {
                r_max: 1.5,
                n: 1500,
                dt: 1e-4,
                rate_tol: 1e-8,
                max_steps: 200_000,
            },
            alphas: vec![25.0, 50.0, 100.0, 400.0, 1600.0],
            ode_dx: 1e-5,
            ode_domain: (0.0, 0.6),
        };
        match kind {
            ScenarioKind::AlphaTable => {
                cfg.params = ModelParams::unchecked(1e-4, 25.0, 1.0, 1.0);
            }
            ScenarioKind::ExactSn => {
                cfg.params = ModelParams::unchecked(1e-3, 500.0, 1e-6, 8e-4);
                cfg.domain = None;
                cfg.nx = if paper { 2000 } else { 500 };
                cfg.t_end = if paper { 10.0 } else { 0.05 };
            }
            ScenarioKind::Spinodal1D => {
                cfg.params = ModelParams::unchecked(1e-3, 500.0, 1e-7, 1e-5);
                cfg.solver = SolverChoice::Both;
                cfg.domain = Some((-1.0, 1.0, 0.0, 1.0));
                cfg.nx = if paper { 2000 } else { 200 };
                cfg.ref_nx = Some(if paper { 1000 } else { 200 });
                cfg.dt = 1e-5;
                cfg.t_end = if paper { 4.0 } else { 0.2 };
                cfg.snapshots = if paper { vec![0.14, 0.5, 1.0, 2.0, 4.0] } else { vec![0.1, 0.14, 0.2] };
            }
            ScenarioKind::Ostwald1D => {
                cfg.params = ModelParams::unchecked(1e-3, 1000.0, 1e-7, 1e-4);
                cfg.solver = SolverChoice::Both;
                cfg.nx = if paper { 1000 } else { 250 };
                cfg.dt = 1e-4;
                cfg.t_end = if paper { 0.3 } else { 0.05 };
                cfg.snapshots = if paper { vec![0.1, 0.3] } else { vec![0.025, 0.05] };
            }
            ScenarioKind::RadialBubble2D => {
                cfg.params = ModelParams::unchecked(1e-3, 500.0, 1e-6, 1e-4);
                cfg.domain = Some((-1.0, 1.0, -1.0, 1.0));
                cfg.cfl = CFL_2D;
                cfg.nx = if paper { 500 } else { 100 };
                cfg.ny = cfg.nx;
                cfg.t_end = if paper { 1.0 } else { 0.02 };
            }
            ScenarioKind::Ostwald2D => {
                cfg.params = ModelParams::unchecked(1e-3, 1000.0, 1e-8, 1e-5);
                cfg.solver = SolverChoice::Both;
                cfg.domain = Some((-0.5, 0.5, -0.6, 0.6));
                cfg.cfl = CFL_2D;
                cfg.dt = 1e-5;
                cfg.nx = if paper { 600 } else { 100 };
                cfg.ny = if paper { 720 } else { 120 };
                cfg.t_end = if paper { 1.0 } else { 0.005 };
            }
            ScenarioKind::Custom => {
                cfg.base = ScenarioKind::Spinodal1D;
                cfg.domain = Some((-1.0, 1.0, 0.0, 1.0));
            }
        }
        cfg
    }

    pub fn dim(&self) -> usize {
        match self.base {
            ScenarioKind::RadialBubble2D | ScenarioKind::Ostwald2D => 2,
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenario == ScenarioKind::AlphaTable {
            if self.alphas.is_empty() {
                return Err(Error::Config("alpha table needs at least one alpha".into()));
            }
            return Ok(());
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::Config(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if self.base == ScenarioKind::Custom || self.base == ScenarioKind::AlphaTable {
            return Err(Error::Config("custom scenarios need a base with initial data".into()));
        }
        if self.solver != SolverChoice::Reference {
            self.params.validate_hyperbolic()?;
        } else if !(self.params.gamma > 0.0) {
            return Err(Error::InvalidParameter("gamma must be positive".into()));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if self.snapshots.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::Config("snapshot times must be finite and >= 0".into()));
        }
        if self.scenario == ScenarioKind::ExactSn || self.base == ScenarioKind::ExactSn {
            SnSolutionSpec::new(self.epsilon, self.params.gamma, 0.0)?;
        }
        Ok(())
    }

    /// Domain, resolving the sn default of two wavelengths.
    pub fn resolved_domain(&self) -> Result<(f64, f64, f64, f64)> {
        match self.domain {
            Some(d) => Ok(d),
            None => {
                let spec = SnSolutionSpec::new(self.epsilon, self.params.gamma, 0.0)?;
                Ok((0.0, 2.0 * exact::sn_wavelength(&spec)?, 0.0, 1.0))
            }
        }
    }

    pub fn grid_with(&self, nx: usize, ny: usize) -> Result<Grid> {
        let (xl, xr, yl, yr) = self.resolved_domain()?;
        if self.dim() == 2 {
            Grid::new_2d(xl, xr, yl, yr, nx, ny)
        } else {
            Grid::new_1d(xl, xr, nx)
        }
    }

    pub fn hyperbolic_grid(&self) -> Result<Grid> {
        self.grid_with(self.nx, self.ny)
    }

    pub fn reference_grid(&self) -> Result<Grid> {
        self.grid_with(self.ref_nx.unwrap_or(self.nx), self.ref_ny.unwrap_or(self.ny))
    }
}
