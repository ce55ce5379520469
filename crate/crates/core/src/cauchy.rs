//! Stationary Cauchy problems: the original equation reduced to an ODE in
//! `x` (system 1, state `(c, c_I, c_II, J)`) and its relaxed counterpart
//! (system 2, state `(phi, p, c, q~)`), integrated with fixed-step RK4.
//!
//! As the penalty `alpha` grows, system 2's `c` approaches system 1's `c`
//! at first order in `1/alpha`.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::diagnostics::l2_relative_error;
use crate::error::{Error, Result};

pub type CauchyState = [f64; 4];

/// `(c, c_I, c_II, J)' = (c_I, c_II, (J + (3c^2 - 1) c_I)/gamma, 0)`.
pub fn ode1_rhs(y: &CauchyState, gamma: f64) -> CauchyState {
    let [c, ci, cii, j] = *y;
    [ci, cii, (j + (3.0 * c * c - 1.0) * ci) / gamma, 0.0]
}

/// `(phi, p, c, q~)' = (p, (alpha/gamma)(phi - c), (alpha p - q~)/(3c^2 - 1 + alpha), 0)`.
pub fn ode2_rhs(y: &CauchyState, alpha: f64, gamma: f64) -> Result<CauchyState> {
    let [phi, p, c, qt] = *y;
    let den = 3.0 * c * c - 1.0 + alpha;
    if den.abs() < 1e-300 {
        return Err(Error::SingularDenominator(den));
    }
    Ok([p, alpha / gamma * (phi - c), (alpha * p - qt) / den, 0.0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub x: Vec<f64>,
    pub y: Vec<CauchyState>,
}

/// Classical RK4 from `x0` to `x_end` with `round((x_end - x0)/dx)` equal
/// steps; every node is kept.
pub fn rk4_integrate<F>(rhs: F, y0: CauchyState, x0: f64, x_end: f64, dx: f64) -> Result<Trajectory>
where
    F: Fn(&CauchyState) -> Result<CauchyState>,
{
    if !(dx > 0.0 && dx.is_finite()) {
        return Err(Error::InvalidParameter(format!("dx must be positive, got {dx}")));
    }
    if !(x_end >= x0) {
        return Err(Error::InvalidParameter(format!("x_end {x_end} lies before x0 {x0}")));
    }
    let n = ((x_end - x0) / dx).round() as usize;
    // keep the caller's step when it tiles the interval; the trajectories
    // pass close to saddles and are sensitive at round-off level
    let span = x_end - x0;
    let h = if n == 0 {
        0.0
    } else if (n as f64 * dx - span).abs() <= 1e-9 * span {
        dx
    } else {
        span / n as f64
    };
    let mut x = Vec::with_capacity(n + 1);
    let mut ys = Vec::with_capacity(n + 1);
    let mut y = y0;
    x.push(x0);
    ys.push(y);
    let add = |a: &CauchyState, s: f64, b: &CauchyState| -> CauchyState { [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]] };
    for k in 0..n {
        let k1 = rhs(&y)?;
        let k2 = rhs(&add(&y, 0.5 * h, &k1))?;
        let k3 = rhs(&add(&y, 0.5 * h, &k2))?;
        let k4 = rhs(&add(&y, h, &k3))?;
        for v in 0..4 {
            y[v] += h / 6.0 * (k1[v] + 2.0 * k2[v] + 2.0 * k3[v] + k4[v]);
        }
        let xk = x0 + (k + 1) as f64 * h;
        if let Some(v) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::BlowUp {
                step: k + 1,
                time: xk,
                field: ["y0", "y1", "y2", "y3"][v],
                cell: 0,
            });
        }
        x.push(xk);
        ys.push(y);
    }
    Ok(Trajectory { x, y: ys })
}

/// Data at `x0` shared by both systems. `flux` seeds `J` in system 1 and
/// `q~` in system 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchySeed {
    pub c: f64,
    pub c_i: f64,
    pub c_ii: f64,
    pub flux: f64,
}

impl CauchySeed {
    /// Near-pure phase with a small negative slope and flux.
    pub fn standard() -> Self {
        Self {
            c: 1.0 - 1e-6,
            c_i: -1e-5,
            c_ii: -1e-10,
            flux: -1e-8,
        }
    }

    pub fn ode1(&self) -> CauchyState {
        [self.c, self.c_i, self.c_ii, self.flux]
    }

    /// `phi = c + (gamma/alpha) c_II`, `p = c_I`.
    pub fn ode2(&self, alpha: f64, gamma: f64) -> CauchyState {
        [self.c + gamma / alpha * self.c_ii, self.c_i, self.c, self.flux]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaRow {
    pub alpha: f64,
    /// `|c - c^|`, `|p - c^_x|`, `|c - phi|` (relative L2, normalised by
    /// the first quantity).
    pub err_c: f64,
    pub err_p: f64,
    pub err_phi: f64,
    /// Orders against the previous row; `None` on the first.
    pub order_c: Option<f64>,
    pub order_p: Option<f64>,
    pub order_phi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaTable {
    pub rows: Vec<AlphaRow>,
}

impl AlphaTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("alpha,err_c,order_c,err_p,order_p,err_c_phi,order_c_phi\n");
        let o = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.4}"));
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:.6e},{},{:.6e},{},{:.6e},{}",
                r.alpha,
                r.err_c,
                o(r.order_c),
                r.err_p,
                o(r.order_p),
                r.err_phi,
                o(r.order_phi)
            );
        }
        s
    }
}

/// `log(e_k / e_{k+1}) / log(alpha_{k+1} / alpha_k)`.
pub fn observed_order(e_k: f64, e_next: f64, alpha_k: f64, alpha_next: f64) -> f64 {
    (e_k / e_next).ln() / (alpha_next / alpha_k).ln()
}

/// Errors of the relaxed system against the original one for each `alpha`.
pub fn alpha_convergence_study(alphas: &[f64], gamma: f64, domain: (f64, f64), dx: f64, seed: &CauchySeed) -> Result<AlphaTable> {
    if alphas.windows(2).any(|w| w[1] <= w[0]) || alphas.iter().any(|&a| a <= 1.0) {
        return Err(Error::InvalidParameter("alphas must be ascending and above 1".into()));
    }
    let (x0, x1) = domain;
    let reference = rk4_integrate(|y| Ok(ode1_rhs(y, gamma)), seed.ode1(), x0, x1, dx)?;
    let c_hat: Vec<f64> = reference.y.iter().map(|y| y[0]).collect();
    let grad_hat: Vec<f64> = reference.y.iter().map(|y| y[1]).collect();

    let errs: Vec<(f64, f64, f64)> = alphas
        .par_iter()
        .map(|&alpha| {
            let t = rk4_integrate(|y| ode2_rhs(y, alpha, gamma), seed.ode2(alpha, gamma), x0, x1, dx)?;
            let c: Vec<f64> = t.y.iter().map(|y| y[2]).collect();
            let p: Vec<f64> = t.y.iter().map(|y| y[1]).collect();
            let phi: Vec<f64> = t.y.iter().map(|y| y[0]).collect();
            Ok((l2_relative_error(&c, &c_hat)?, l2_relative_error(&p, &grad_hat)?, l2_relative_error(&c, &phi)?))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(alphas.len());
    for (k, (&alpha, &(ec, ep, ef))) in alphas.iter().zip(&errs).enumerate() {
        let order = |f: fn(&(f64, f64, f64)) -> f64| {
            (k > 0).then(|| observed_order(f(&errs[k - 1]), f(&errs[k]), alphas[k - 1], alpha))
        };
        rows.push(AlphaRow {
            alpha,
            err_c: ec,
            err_p: ep,
            err_phi: ef,
            order_c: order(|e| e.0),
            order_p: order(|e| e.1),
            order_phi: order(|e| e.2),
        });
    }
    Ok(AlphaTable { rows })
}
