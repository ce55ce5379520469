//! Radially symmetric form of the original equation,
//! `c_t = (1/r) (r (c^3 - c - gamma L c)_r)_r` with `L f = (1/r)(r f_r)_r`.
//!
//! Cells sit at `r_i = (i + 1/2) dr`, so no unknown lives on the axis. The
//! face at `r = 0` has zero metric weight, which makes the flux through it
//! vanish; the outer face is closed. Both make the discrete mass
//! `sum 2 pi r_i dr c_i` an exact invariant of the operator.

use std::f64::consts::PI;

use super::{mobility, ImplicitSolveConfig, Preconditioner};
use crate::error::{Error, Result};
use crate::gmres::{gmres, no_precond, GmresInfo};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    pub n: usize,
    pub dr: f64,
}

impl RadialGrid {
    pub fn new(r_max: f64, n: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidParameter(format!("r_max must be positive, got {r_max}")));
        }
        if n < crate::grid::MIN_CELLS {
            return Err(Error::InvalidParameter(format!("radial grid needs at least {} cells", crate::grid::MIN_CELLS)));
        }
        Ok(Self { n, dr: r_max / n as f64 })
    }

    pub fn r_max(&self) -> f64 {
        self.n as f64 * self.dr
    }

    pub fn r(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dr
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.r(i)).collect()
    }

    /// Metric weight of the face on the outer side of cell `i` (zero at the
    /// outer wall).
    #[inline]
    fn face_r(&self, i: usize) -> f64 {
        if i + 1 < self.n {
            (i + 1) as f64 * self.dr
        } else {
            0.0
        }
    }
}

/// `sum 2 pi r_i dr c_i`.
pub fn radial_mass(c: &[f64], grid: &RadialGrid) -> f64 {
    c.iter().enumerate().map(|(i, v)| 2.0 * PI * grid.r(i) * grid.dr * v).sum()
}

/// `(1/r)(r k f_r)_r` with face coefficients `k` (`k[i]` on the outer face
/// of cell `i`; `None` means one).
fn radial_div_grad(f: &[f64], grid: &RadialGrid, k: Option<&[f64]>, out: &mut [f64]) {
    let n = grid.n;
    let h2 = grid.dr * grid.dr;
    let flux = |i: usize| -> f64 {
        // outward flux through the outer face of cell i
        if i + 1 >= n {
            return 0.0;
        }
        let kk = k.map_or(1.0, |k| k[i]);
        grid.face_r(i) * kk * (f[i + 1] - f[i])
    };
    let mut west = 0.0;
    for i in 0..n {
        let east = flux(i);
        out[i] = (east - west) / (grid.r(i) * h2);
        west = east;
    }
}

/// `u - dt (1/r)(r chi u_r)_r + gamma dt L L u` with `chi` frozen.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    grid: RadialGrid,
    dt: f64,
    gamma: f64,
    chi_face: Vec<f64>,
}

impl RadialOperator {
    pub fn new(c_n: &[f64], grid: &RadialGrid, params: &ModelParams, dt: f64) -> Self {
        let chi_face = (0..grid.n)
            .map(|i| {
                if i + 1 < grid.n {
                    0.5 * (mobility(c_n[i]) + mobility(c_n[i + 1]))
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            grid: *grid,
            dt,
            gamma: params.gamma,
            chi_face,
        }
    }

    pub fn constant(grid: &RadialGrid, params: &ModelParams, dt: f64, chi: f64) -> Self {
        Self {
            grid: *grid,
            dt,
            gamma: params.gamma,
            chi_face: vec![chi; grid.n],
        }
    }

    pub fn mean_mobility(&self) -> f64 {
        let m = self.grid.n - 1;
        self.chi_face[..m].iter().sum::<f64>() / m as f64
    }

    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let n = self.grid.n;
        let mut a = vec![0.0; n];
        let mut lu = vec![0.0; n];
        let mut llu = vec![0.0; n];
        radial_div_grad(u, &self.grid, Some(&self.chi_face), &mut a);
        radial_div_grad(u, &self.grid, None, &mut lu);
        radial_div_grad(&lu, &self.grid, None, &mut llu);
        for i in 0..n {
            out[i] = u[i] - self.dt * a[i] + self.gamma * self.dt * llu[i];
        }
    }

    /// Pentadiagonal band `[i][2 + d]` = entry `(i, i + d)`, probed with five
    /// interleaved impulse trains.
    fn band(&self) -> Vec<[f64; 5]> {
        let n = self.grid.n;
        let mut band = vec![[0.0; 5]; n];
        let mut probe = vec![0.0; n];
        let mut resp = vec![0.0; n];
        for s in 0..5 {
            probe.iter_mut().enumerate().for_each(|(k, v)| *v = if k % 5 == s { 1.0 } else { 0.0 });
            self.apply(&probe, &mut resp);
            for i in 0..n {
                // the column feeding row i from this train is the one within distance 2
                for d in -2isize..=2 {
                    let k = i as isize + d;
                    if k >= 0 && (k as usize) < n && (k as usize) % 5 == s {
                        band[i][(d + 2) as usize] = resp[i];
                    }
                }
            }
        }
        band
    }
}

/// LU factors of a pentadiagonal matrix, no pivoting.
#[derive(Debug, Clone)]
pub struct BandLu {
    l: Vec<[f64; 2]>,
    u: Vec<[f64; 3]>,
}

impl BandLu {
    fn factor(band: &[[f64; 5]]) -> Result<Self> {
        let n = band.len();
        let mut a: Vec<[f64; 5]> = band.to_vec();
        let mut l = vec![[0.0; 2]; n];
        for k in 0..n {
            let piv = a[k][2];
            if piv.abs() < 1e-300 {
                return Err(Error::SingularDenominator(piv));
            }
            for r in 1..=2 {
                let i = k + r;
                if i >= n {
                    break;
                }
                let m = a[i][2 - r] / piv;
                l[i][2 - r] = m;
                a[i][2 - r] = 0.0;
                for c in 1..=2 {
                    if k + c < n {
                        a[i][2 - r + c] -= m * a[k][2 + c];
                    }
                }
            }
        }
        let u = a.iter().map(|row| [row[2], row[3], row[4]]).collect();
        Ok(Self { l, u })
    }

    fn solve(&self, b: &[f64], x: &mut [f64]) {
        let n = b.len();
        for i in 0..n {
            let mut s = b[i];
            if i >= 1 {
                s -= self.l[i][1] * x[i - 1];
            }
            if i >= 2 {
                s -= self.l[i][0] * x[i - 2];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s -= self.u[i][1] * x[i + 1];
            }
            if i + 2 < n {
                s -= self.u[i][2] * x[i + 2];
            }
            x[i] = s / self.u[i][0];
        }
    }
}

/// Radial stepper; the preconditioner is factored on the first step and
/// reused.
pub struct RadialStepper {
    grid: RadialGrid,
    params: ModelParams,
    cfg: ImplicitSolveConfig,
    lu: Option<BandLu>,
    pub last_info: Option<GmresInfo>,
}

impl RadialStepper {
    pub fn new(grid: &RadialGrid, params: &ModelParams, cfg: &ImplicitSolveConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            grid: *grid,
            params: *params,
            cfg: *cfg,
            lu: None,
            last_info: None,
        })
    }

    pub fn step(&mut self, c: &[f64]) -> Result<Vec<f64>> {
        if c.len() != self.grid.n {
            return Err(Error::ShapeMismatch {
                field: "c",
                expected: self.grid.n,
                actual: c.len(),
            });
        }
        let op = RadialOperator::new(c, &self.grid, &self.params, self.cfg.dt);
        let mut x = c.to_vec();
        let opts = self.cfg.gmres_options();
        let info = match self.cfg.preconditioner {
            Preconditioner::ConstantMobility => {
                if self.lu.is_none() {
                    let pre = RadialOperator::constant(&self.grid, &self.params, self.cfg.dt, op.mean_mobility());
                    self.lu = Some(BandLu::factor(&pre.band())?);
                }
                let lu = self.lu.as_ref().expect("factored above");
                gmres(|u, o| op.apply(u, o), |r, z| lu.solve(r, z), c, &mut x, &opts)?
            }
            Preconditioner::None => gmres(|u, o| op.apply(u, o), no_precond, c, &mut x, &opts)?,
        };
        self.last_info = Some(info);
        if let Some(index) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { field: "c", index });
        }
        Ok(x)
    }
}

pub fn step_implicit_radial(c: &[f64], grid: &RadialGrid, params: &ModelParams, cfg: &ImplicitSolveConfig) -> Result<Vec<f64>> {
    RadialStepper::new(grid, params, cfg)?.step(c)
}

#[derive(Debug, Clone)]
pub struct RadialRun {
    pub c: Vec<f64>,
    pub steps: usize,
    pub time: f64,
    /// `max |c^{n+1} - c^n| / dt` of the last step.
    pub rate: f64,
    pub converged: bool,
}

/// Steps until `max |c^{n+1} - c^n| / dt < rate_tol` or `max_steps`.
pub fn run_to_steady(
    c0: &[f64],
    grid: &RadialGrid,
    params: &ModelParams,
    cfg: &ImplicitSolveConfig,
    rate_tol: f64,
    max_steps: usize,
) -> Result<RadialRun> {
    let mut stepper = RadialStepper::new(grid, params, cfg)?;
    let mut c = c0.to_vec();
    let mut rate = f64::INFINITY;
    let mut steps = 0;
    while steps < max_steps {
        let next = stepper.step(&c)?;
        rate = next.iter().zip(&c).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / cfg.dt;
        c = next;
        steps += 1;
        if rate < rate_tol {
            break;
        }
    }
    Ok(RadialRun {
        c,
        steps,
        time: steps as f64 * cfg.dt,
        rate,
        converged: rate < rate_tol,
    })
}
