//! Pointwise model functions of the relaxed system.
//!
//! A point state is a fixed-size [`Vars`] array; [`Layout`] maps the
//! physical components `(c, q_1..q_d, w, p_1..p_d, phi)` onto its first
//! `3 + 2d` slots. Unused trailing slots stay zero.

use crate::error::{Error, Result};
use crate::params::ModelParams;

pub const MAX_VARS: usize = 7;

pub type Vars = [f64; MAX_VARS];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub fn axis(self) -> usize {
        match self {
            Direction::X => 0,
            Direction::Y => 1,
        }
    }
}

/// Slot indices of the conserved vector in `d` dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub dim: usize,
}

impl Layout {
    pub const fn new(dim: usize) -> Self {
        Self { dim }
    }

    #[inline]
    pub const fn nvars(self) -> usize {
        3 + 2 * self.dim
    }

    #[inline]
    pub const fn c(self) -> usize {
        0
    }

    #[inline]
    pub const fn q(self, k: usize) -> usize {
        1 + k
    }

    #[inline]
    pub const fn w(self) -> usize {
        1 + self.dim
    }

    #[inline]
    pub const fn p(self, k: usize) -> usize {
        2 + self.dim + k
    }

    #[inline]
    pub const fn phi(self) -> usize {
        2 + 2 * self.dim
    }
}

/// Double-well potential `g(c) = (c^2 - 1)^2 / 4`.
#[inline]
pub fn potential(c: f64) -> f64 {
    let a = c * c - 1.0;
    0.25 * a * a
}

#[inline]
pub fn potential_d1(c: f64) -> f64 {
    c * c * c - c
}

#[inline]
pub fn potential_d2(c: f64) -> f64 {
    3.0 * c * c - 1.0
}

/// `mu = g'(c) + alpha (c - phi)`.
#[inline]
pub fn chemical_potential(c: f64, phi: f64, params: &ModelParams) -> f64 {
    potential_d1(c) + params.alpha * (c - phi)
}

/// Physical flux of the conserved vector along `dir`.
#[inline]
pub fn flux(u: &Vars, dir: Direction, layout: Layout, params: &ModelParams) -> Vars {
    let k = dir.axis();
    let mut f = [0.0; MAX_VARS];
    f[layout.c()] = u[layout.q(k)] / params.tau;
    f[layout.q(k)] = chemical_potential(u[layout.c()], u[layout.phi()], params);
    f[layout.w()] = -params.gamma * u[layout.p(k)];
    f[layout.p(k)] = -u[layout.w()] / params.beta;
    f
}

/// Algebraic source. The `phi` row carries `w / beta`, the whole of its
/// evolution equation.
#[inline]
pub fn source(u: &Vars, layout: Layout, params: &ModelParams) -> Vars {
    let mut s = [0.0; MAX_VARS];
    for k in 0..layout.dim {
        s[layout.q(k)] = -u[layout.q(k)] / params.tau;
    }
    s[layout.w()] = -params.alpha * (u[layout.phi()] - u[layout.c()]);
    s[layout.phi()] = u[layout.w()] / params.beta;
    s
}

/// Characteristic speeds at a given `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenData {
    /// `-fast, -slow, 0 ..., +slow, +fast` with `2d - 1` zeros in between
    /// (`d = 3` gives the five zeros of the full 9-variable system).
    pub lambdas: Vec<f64>,
    pub lambda_max: f64,
}

/// Fast and slow characteristic speeds `(sqrt((g'' + alpha)/tau), sqrt(gamma/beta))`.
#[inline]
pub fn wave_speeds(c: f64, params: &ModelParams) -> Result<(f64, f64)> {
    let radicand = potential_d2(c) + params.alpha;
    if radicand < 0.0 || radicand.is_nan() {
        return Err(Error::NegativeRadicand { c, radicand });
    }
    Ok((
        (radicand / params.tau).sqrt(),
        (params.gamma / params.beta).sqrt(),
    ))
}

/// Maximum absolute characteristic speed at `c`.
#[inline]
pub fn max_speed(c: f64, params: &ModelParams) -> Result<f64> {
    let (fast, slow) = wave_speeds(c, params)?;
    Ok(fast.max(slow))
}

/// Eigenvalues of the quasilinear Jacobian in `dim` dimensions, ordered as
/// in [`EigenData::lambdas`].
pub fn eigen(c: f64, params: &ModelParams, dim: usize) -> Result<EigenData> {
    let (fast, slow) = wave_speeds(c, params)?;
    let zeros = Layout::new(dim).nvars() - 4;
    let mut lambdas = Vec::with_capacity(zeros + 4);
    lambdas.push(-fast);
    lambdas.push(-slow);
    lambdas.extend(std::iter::repeat(0.0).take(zeros));
    lambdas.push(slow);
    lambdas.push(fast);
    Ok(EigenData {
        lambdas,
        lambda_max: fast.max(slow),
    })
}

/// Closed-form determinant of the right-eigenvector matrix,
/// `-4 sqrt((beta gamma / tau) / (alpha + g''(c)))`.
pub fn eigen_det_r(c: f64, params: &ModelParams) -> f64 {
    let a = params.alpha + potential_d2(c);
    -4.0 * ((params.beta * params.gamma / params.tau) / a).sqrt()
}

/// Right eigenvectors of the 9-variable one-dimensional Jacobian, as columns
/// in the order of [`eigen`] with `dim = 3`.
///
/// Variable order is `(c, q1, w, p1, phi, q2, q3, p2, p3)`.
pub fn right_eigenvectors(c: f64, params: &ModelParams) -> [[f64; 9]; 9] {
    let a = params.alpha + potential_d2(c);
    let fast = 1.0 / (params.tau * a).sqrt();
    let slow = (params.beta * params.gamma).sqrt();
    let mut r = [[0.0; 9]; 9];
    // fast pair
    r[0][0] = -fast;
    r[1][0] = 1.0;
    r[0][8] = fast;
    r[1][8] = 1.0;
    // slow pair: (w, p1) = (sqrt(beta gamma), 1) travels at -sqrt(gamma/beta)
    r[2][1] = slow;
    r[3][1] = 1.0;
    r[2][7] = -slow;
    r[3][7] = 1.0;
    // stationary phi mode
    r[0][6] = params.alpha / a;
    r[4][6] = 1.0;
    // transverse components
    r[5][5] = 1.0;
    r[6][4] = 1.0;
    r[7][3] = 1.0;
    r[8][2] = 1.0;
    r
}

/// Total energy density
/// `g + gamma/2 |p|^2 + alpha/2 (c - phi)^2 + w^2/(2 beta) + |q|^2/(2 tau)`.
#[inline]
pub fn energy_density(u: &Vars, layout: Layout, params: &ModelParams) -> f64 {
    let (e1, e2) = energy_split(u, layout, params);
    e1 + e2
}

/// `(e_I, e_II)`: the part in `(c, phi, q)` and the part in `(p, w)`.
#[inline]
pub fn energy_split(u: &Vars, layout: Layout, params: &ModelParams) -> (f64, f64) {
    let c = u[layout.c()];
    let d = c - u[layout.phi()];
    let mut q2 = 0.0;
    let mut p2 = 0.0;
    for k in 0..layout.dim {
        q2 += u[layout.q(k)] * u[layout.q(k)];
        p2 += u[layout.p(k)] * u[layout.p(k)];
    }
    let w = u[layout.w()];
    let e1 = potential(c) + 0.5 * params.alpha * d * d + q2 / (2.0 * params.tau);
    let e2 = 0.5 * params.gamma * p2 + w * w / (2.0 * params.beta);
    (e1, e2)
}

/// Local dissipation rate `|q / tau|^2`.
#[inline]
pub fn dissipation_density(u: &Vars, layout: Layout, params: &ModelParams) -> f64 {
    (0..layout.dim)
        .map(|k| {
            let f = u[layout.q(k)] / params.tau;
            f * f
        })
        .sum()
}
