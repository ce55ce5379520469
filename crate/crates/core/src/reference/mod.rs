//! Semi-implicit conservative finite differences for the original
//! fourth-order equation `c_t = div(chi(c) grad c) - gamma * bilap(c)`.
//!
//! The mobility `chi = 3c^2 - 1` is frozen at `t^n`; everything else acts on
//! the unknown `c^{n+1}` and the resulting linear system is solved with
//! matrix-free GMRES.

mod fourier;
pub mod radial;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gmres::{gmres, GmresInfo, GmresOptions};
use crate::grid::Grid;
use crate::hyperbolic::Execution;
use crate::params::ModelParams;
use crate::physics::Direction;

pub use fourier::FourierPreconditioner;
pub use radial::{step_implicit_radial, RadialGrid, RadialOperator, RadialRun, RadialStepper};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preconditioner {
    None,
    /// Exact inverse of the operator with the mobility replaced by its mean.
    #[default]
    ConstantMobility,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitSolveConfig {
    pub dt: f64,
    pub rel_tol: f64,
    pub restart: usize,
    pub max_iters: usize,
    pub preconditioner: Preconditioner,
}

impl ImplicitSolveConfig {
    /// Restart 30, tolerance `1e-10`, at most 500 iterations.
    pub fn new(dt: f64) -> Result<Self> {
        let cfg = Self {
            dt,
            rel_tol: 1e-10,
            restart: 30,
            max_iters: 500,
            preconditioner: Preconditioner::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.restart == 0 {
            return Err(Error::InvalidParameter("restart must be at least 1".into()));
        }
        Ok(())
    }

    pub fn gmres_options(&self) -> GmresOptions {
        GmresOptions {
            restart: self.restart,
            tol: self.rel_tol,
            max_iter: self.max_iters,
        }
    }
}

/// `chi(c) = 3c^2 - 1`, the derivative of `c^3 - c`.
#[inline]
pub fn mobility(c: f64) -> f64 {
    3.0 * c * c - 1.0
}

#[inline]
fn face_average(m1: f64, c0: f64, p1: f64, p2: f64) -> f64 {
    (7.0 * c0 - m1 + 7.0 * p1 - p2) / 12.0
}

/// Mobility on the face between cell `(i, j)` and its successor along `dir`.
pub fn face_mobility(c: &[f64], grid: &Grid, i: usize, j: usize, dir: Direction) -> f64 {
    let at = |off: isize| match dir {
        Direction::X => mobility(c[grid.idx(grid.wrap_x(i, off), j)]),
        Direction::Y => mobility(c[grid.idx(i, grid.wrap_y(j, off))]),
    };
    face_average(at(-1), at(0), at(1), at(2))
}

/// Weights on `c_{i-1}, c_i, c_{i+1}, c_{i+2}` giving the gradient on the
/// face `i + 1/2` along `dir`.
pub fn face_gradient_coefficients(grid: &Grid, dir: Direction) -> [f64; 4] {
    let h = match dir {
        Direction::X => grid.dx,
        Direction::Y => grid.dy,
    };
    [1.0 / (12.0 * h), -15.0 / (12.0 * h), 15.0 / (12.0 * h), -1.0 / (12.0 * h)]
}

/// Positive discrete bi-Laplacian: the 5-point fourth difference in 1D, and
/// in 2D the two fourth differences plus twice the 9-point mixed term.
pub fn bilaplacian_apply(c: &[f64], grid: &Grid) -> Vec<f64> {
    let mut out = vec![0.0; c.len()];
    bilaplacian_into(c, grid, &mut out);
    out
}

#[inline]
fn bilap_at(c: &[f64], grid: &Grid, i: usize, j: usize) -> f64 {
    let x = |off: isize| c[grid.idx(grid.wrap_x(i, off), j)];
    let hx4 = grid.dx.powi(4);
    let mut v = (x(-2) - 4.0 * x(-1) + 6.0 * x(0) - 4.0 * x(1) + x(2)) / hx4;
    if grid.dim == 2 {
        let y = |off: isize| c[grid.idx(i, grid.wrap_y(j, off))];
        let xy = |ox: isize, oy: isize| c[grid.idx(grid.wrap_x(i, ox), grid.wrap_y(j, oy))];
        v += (y(-2) - 4.0 * y(-1) + 6.0 * y(0) - 4.0 * y(1) + y(2)) / grid.dy.powi(4);
        let cross = xy(-1, -1) + xy(1, -1) + xy(-1, 1) + xy(1, 1) - 2.0 * (x(-1) + x(1) + y(-1) + y(1)) + 4.0 * x(0);
        v += 2.0 * cross / (grid.dx * grid.dx * grid.dy * grid.dy);
    }
    v
}

fn bilaplacian_into(c: &[f64], grid: &Grid, out: &mut [f64]) {
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            out[grid.idx(i, j)] = bilap_at(c, grid, i, j);
        }
    }
}

/// Left-hand side `u - dt div(chi^n grad_h u) + gamma dt bilap_h u` of one
/// semi-implicit step, with the face mobilities frozen at construction.
#[derive(Debug, Clone)]
pub struct ImplicitOperator {
    grid: Grid,
    dt: f64,
    gamma: f64,
    /// Mobility on the face right of / above each cell.
    chi_x: Vec<f64>,
    chi_y: Vec<f64>,
    exec: Execution,
}

impl ImplicitOperator {
    pub fn new(c_n: &[f64], grid: &Grid, params: &ModelParams, dt: f64) -> Self {
        let mut chi_x = vec![0.0; grid.len()];
        let mut chi_y = if grid.dim == 2 { vec![0.0; grid.len()] } else { Vec::new() };
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                chi_x[grid.idx(i, j)] = face_mobility(c_n, grid, i, j, Direction::X);
                if grid.dim == 2 {
                    chi_y[grid.idx(i, j)] = face_mobility(c_n, grid, i, j, Direction::Y);
                }
            }
        }
        Self {
            grid: grid.clone(),
            dt,
            gamma: params.gamma,
            chi_x,
            chi_y,
            exec: Execution::Sequential,
        }
    }

    /// Same operator with every face mobility set to `chi`.
    pub fn constant(grid: &Grid, params: &ModelParams, dt: f64, chi: f64) -> Self {
        Self {
            grid: grid.clone(),
            dt,
            gamma: params.gamma,
            chi_x: vec![chi; grid.len()],
            chi_y: if grid.dim == 2 { vec![chi; grid.len()] } else { Vec::new() },
            exec: Execution::Sequential,
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Mean face mobility over all faces in both directions.
    pub fn mean_mobility(&self) -> f64 {
        let n = self.chi_x.len() + self.chi_y.len();
        (self.chi_x.iter().sum::<f64>() + self.chi_y.iter().sum::<f64>()) / n as f64
    }

    #[inline]
    fn row(&self, u: &[f64], i: usize, j: usize) -> f64 {
        let g = &self.grid;
        let kx = face_gradient_coefficients(g, Direction::X);
        let x = |off: isize| u[g.idx(g.wrap_x(i, off), j)];
        let grad_e = kx[0] * x(-1) + kx[1] * x(0) + kx[2] * x(1) + kx[3] * x(2);
        let grad_w = kx[0] * x(-2) + kx[1] * x(-1) + kx[2] * x(0) + kx[3] * x(1);
        let fe = self.chi_x[g.idx(i, j)] * grad_e;
        let fw = self.chi_x[g.idx(g.wrap_x(i, -1), j)] * grad_w;
        let mut v = u[g.idx(i, j)] - self.dt / g.dx * (fe - fw);
        if g.dim == 2 {
            let ky = face_gradient_coefficients(g, Direction::Y);
            let y = |off: isize| u[g.idx(i, g.wrap_y(j, off))];
            let grad_n = ky[0] * y(-1) + ky[1] * y(0) + ky[2] * y(1) + ky[3] * y(2);
            let grad_s = ky[0] * y(-2) + ky[1] * y(-1) + ky[2] * y(0) + ky[3] * y(1);
            let fnn = self.chi_y[g.idx(i, j)] * grad_n;
            let fs = self.chi_y[g.idx(i, g.wrap_y(j, -1))] * grad_s;
            v -= self.dt / g.dy * (fnn - fs);
        }
        v + self.gamma * self.dt * bilap_at(u, g, i, j)
    }

    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let g = &self.grid;
        match self.exec {
            Execution::Sequential => {
                for j in 0..g.ny {
                    for i in 0..g.nx {
                        out[g.idx(i, j)] = self.row(u, i, j);
                    }
                }
            }
            Execution::Parallel => {
                out.par_chunks_mut(g.nx).enumerate().for_each(|(j, line)| {
                    for (i, o) in line.iter_mut().enumerate() {
                        *o = self.row(u, i, j);
                    }
                });
            }
        }
    }
}

/// Reusable stepper for a fixed grid; caches FFT plans between steps.
pub struct ImplicitStepper {
    grid: Grid,
    params: ModelParams,
    cfg: ImplicitSolveConfig,
    exec: Execution,
    fourier: Option<fourier::FftPlans>,
    pub last_info: Option<GmresInfo>,
}

impl ImplicitStepper {
    pub fn new(grid: &Grid, params: &ModelParams, cfg: &ImplicitSolveConfig) -> Result<Self> {
        cfg.validate()?;
        let fourier = match cfg.preconditioner {
            Preconditioner::ConstantMobility => Some(fourier::FftPlans::new(grid)),
            Preconditioner::None => None,
        };
        Ok(Self {
            grid: grid.clone(),
            params: *params,
            cfg: *cfg,
            exec: Execution::Sequential,
            fourier,
            last_info: None,
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn config(&self) -> &ImplicitSolveConfig {
        &self.cfg
    }

    pub fn step(&mut self, c: &[f64]) -> Result<Vec<f64>> {
        if c.len() != self.grid.len() {
            return Err(Error::ShapeMismatch {
                field: "c",
                expected: self.grid.len(),
                actual: c.len(),
            });
        }
        let op = ImplicitOperator::new(c, &self.grid, &self.params, self.cfg.dt).with_execution(self.exec);
        let mut x = c.to_vec();
        let opts = self.cfg.gmres_options();
        let info = match &self.fourier {
            Some(plans) => {
                let pre = FourierPreconditioner::new(plans, &ImplicitOperator::constant(&self.grid, &self.params, self.cfg.dt, op.mean_mobility()));
                let mut pre = pre;
                gmres(|u, o| op.apply(u, o), |r, z| pre.apply(r, z), c, &mut x, &opts)?
            }
            None => gmres(|u, o| op.apply(u, o), crate::gmres::no_precond, c, &mut x, &opts)?,
        };
        self.last_info = Some(info);
        if let Some(index) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { field: "c", index });
        }
        Ok(x)
    }
}

/// One semi-implicit step from `c` to `c^{n+1}`.
pub fn step_implicit(c: &[f64], grid: &Grid, params: &ModelParams, cfg: &ImplicitSolveConfig) -> Result<Vec<f64>> {
    ImplicitStepper::new(grid, params, cfg)?.step(c)
}

/// Runs fixed steps of `cfg.dt` from `t = 0` to `t_end`; the last step is
/// shortened to land on `t_end`. `observe(step, time, c)` sees step 0 and
/// every step after it.
pub fn run_implicit(
    c0: &[f64],
    grid: &Grid,
    params: &ModelParams,
    cfg: &ImplicitSolveConfig,
    t_end: f64,
    exec: Execution,
    mut observe: impl FnMut(usize, f64, &[f64]),
) -> Result<(Vec<f64>, usize)> {
    let mut stepper = ImplicitStepper::new(grid, params, cfg)?.with_execution(exec);
    let mut c = c0.to_vec();
    let mut t = 0.0;
    let mut n = 0usize;
    observe(0, t, &c);
    // tolerate round-off in t_end / dt
    let eps = 1e-9 * cfg.dt;
    while t < t_end - eps {
        let remaining = t_end - t;
        if remaining < cfg.dt - eps {
            let mut short = *cfg;
            short.dt = remaining;
            c = step_implicit(&c, grid, params, &short)?;
            t = t_end;
        } else {
            c = stepper.step(&c)?;
            t += cfg.dt;
        }
        n += 1;
        observe(n, t, &c);
    }
    Ok((c, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p() -> ModelParams {
        ModelParams::reference(1e-3).unwrap()
    }

    #[test]
    fn mobility_examples() {
        assert_eq!(mobility(1.0), 2.0);
        assert_eq!(mobility(0.0), -1.0);
        assert!(mobility(1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn face_mobility_examples() {
        let g = Grid::new_1d(0.0, 1.0, 10).unwrap();
        let c = vec![0.7; 10];
        assert_relative_eq!(face_mobility(&c, &g, 3, 0, Direction::X), mobility(0.7), max_relative = 1e-15);

        // spike at i + 1
        assert_eq!(face_average(0.0, 0.0, 1.0, 0.0), 7.0 / 12.0);
    }

    #[test]
    fn face_mobility_linear_chi() {
        // chi_i = i (direct stencil arithmetic on the weights)
        let chi = |i: f64| i;
        assert_eq!(face_average(chi(-1.0), chi(0.0), chi(1.0), chi(2.0)), 0.5);
    }

    #[test]
    fn face_gradient_examples() {
        let g = Grid::new_1d(0.0, 1.0, 20).unwrap();
        let k = face_gradient_coefficients(&g, Direction::X);
        assert!(k.iter().sum::<f64>().abs() < 1e-12);
        let xs: Vec<f64> = (0..4).map(|m| g.x_center(m)).collect();
        let grad: f64 = k.iter().zip(&xs).map(|(a, x)| a * x).sum();
        assert_relative_eq!(grad, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn face_gradient_taylor_error() {
        // exact cubic: the stencil error is -h^2 c'''/24 with c''' = 6
        for &h in &[1e-2f64, 5e-3, 2.5e-3] {
            let xs = [-1.5 * h, -0.5 * h, 0.5 * h, 1.5 * h];
            let k = [1.0 / (12.0 * h), -15.0 / (12.0 * h), 15.0 / (12.0 * h), -1.0 / (12.0 * h)];
            let grad: f64 = k.iter().zip(&xs).map(|(a, x)| a * x.powi(3)).sum();
            assert_relative_eq!(grad, -h * h * 6.0 / 24.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn bilaplacian_polynomials() {
        let g = Grid::new_1d(0.0, 1.0, 40).unwrap();
        let c = vec![3.0; 40];
        assert!(bilaplacian_apply(&c, &g).iter().all(|v| v.abs() < 1e-6));
        // away from the periodic seam
        let cubic: Vec<f64> = (0..40).map(|i| g.x_center(i).powi(3)).collect();
        let b = bilaplacian_apply(&cubic, &g);
        assert!(b[10..30].iter().all(|v| v.abs() < 1e-4));
        let quartic: Vec<f64> = (0..40).map(|i| g.x_center(i).powi(4)).collect();
        let b = bilaplacian_apply(&quartic, &g);
        assert!(b[10..30].iter().all(|v| (v - 24.0).abs() < 1e-5));
    }

    #[test]
    fn bilaplacian_2d_mixed_term() {
        // x^2 y^2 has bilaplacian 2 * 2 * 2 = 8
        let g = Grid::new_2d(0.0, 1.0, 0.0, 1.0, 30, 30).unwrap();
        let mut c = vec![0.0; g.len()];
        for j in 0..30 {
            for i in 0..30 {
                c[g.idx(i, j)] = (g.x_center(i) * g.y_center(j)).powi(2);
            }
        }
        let b = bilaplacian_apply(&c, &g);
        assert!((b[g.idx(15, 15)] - 8.0).abs() < 1e-6);
    }

    #[test]
    fn uniform_is_fixed_point() {
        let g = Grid::new_2d(0.0, 1.0, 0.0, 1.0, 8, 8).unwrap();
        let c = vec![0.3; g.len()];
        let cfg = ImplicitSolveConfig::new(1e-3).unwrap();
        let next = step_implicit(&c, &g, &p(), &cfg).unwrap();
        assert!(next.iter().all(|v| (v - 0.3).abs() < 1e-13));
    }

    #[test]
    fn mass_conserved() {
        let g = Grid::new_1d(0.0, 1.0, 64).unwrap();
        let c: Vec<f64> = (0..64).map(|i| 0.3 * (2.0 * std::f64::consts::PI * g.x_center(i)).cos() + 0.1).collect();
        let cfg = ImplicitSolveConfig::new(1e-5).unwrap();
        let next = step_implicit(&c, &g, &p(), &cfg).unwrap();
        let m0: f64 = c.iter().sum();
        let m1: f64 = next.iter().sum();
        assert!((m1 - m0).abs() < 1e-10 * m0.abs().max(1.0));
    }

    #[test]
    fn tanh_front_is_nearly_stationary() {
        let gamma: f64 = 1e-3;
        let n = 4000;
        let g = Grid::new_1d(0.0, 1.0, n).unwrap();
        let w = (2.0 * gamma).sqrt();
        // two fronts plus their periodic images, smooth across the seam
        let c: Vec<f64> = (0..n)
            .map(|i| {
                let x = g.x_center(i);
                (-2..=2).fold(-1.0, |s, k| {
                    let x = x + k as f64;
                    s + ((x - 0.25) / w).tanh() - ((x - 0.75) / w).tanh()
                })
            })
            .collect();
        // the operator's condition number (~4e7 here) puts the round-off
        // floor of the residual near 1e-9
        let mut cfg = ImplicitSolveConfig::new(1e-5).unwrap();
        cfg.rel_tol = 1e-8;
        let next = step_implicit(&c, &g, &p(), &cfg).unwrap();
        let dmax = c.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dmax < 1e-6, "max change {dmax}");
    }

    #[test]
    fn preconditioner_does_not_change_solution() {
        let g = Grid::new_1d(0.0, 1.0, 50).unwrap();
        let c: Vec<f64> = (0..50).map(|i| 0.5 * (7.0 * g.x_center(i)).sin()).collect();
        let mut cfg = ImplicitSolveConfig::new(1e-5).unwrap();
        let a = step_implicit(&c, &g, &p(), &cfg).unwrap();
        cfg.preconditioner = Preconditioner::None;
        let b = step_implicit(&c, &g, &p(), &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn config_validation() {
        assert!(ImplicitSolveConfig::new(0.0).is_err());
        let mut cfg = ImplicitSolveConfig::new(1e-5).unwrap();
        cfg.restart = 0;
        assert!(cfg.validate().is_err());
    }
}
