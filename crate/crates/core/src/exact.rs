//! Jacobi elliptic functions and the periodic stationary solutions built
//! from them.
//!
//! Moduli are elliptic moduli `s` (not parameters `m = s^2`).

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Below this modulus `sn = sin`; within this distance of one `sn = tanh`.
pub const MODULUS_LIMIT: f64 = 1e-12;

/// Complete elliptic integral of the first kind,
/// `K(s) = pi / (2 AGM(1, sqrt(1 - s^2)))`.
pub fn elliptic_k(s: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!("elliptic K needs 0 <= s < 1, got {s}")));
    }
    let mut a = 1.0f64;
    let mut b = (1.0 - s * s).sqrt();
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(FRAC_PI_2 / a)
}

/// `(sn, cn, dn)` of `x` with modulus `s` in `[0, 1]`, by descending
/// Landen (AGM) recursion.
pub fn jacobi_sncndn(x: f64, s: f64) -> (f64, f64, f64) {
    if s < MODULUS_LIMIT {
        return (x.sin(), x.cos(), 1.0);
    }
    if 1.0 - s < MODULUS_LIMIT {
        let sech = 1.0 / x.cosh();
        return (x.tanh(), sech, sech);
    }
    // complementary parameter 1 - s^2
    let mut emc = 1.0 - s * s;
    let mut em = [0.0f64; 16];
    let mut en = [0.0f64; 16];
    let mut a = 1.0f64;
    let mut c = 1.0f64;
    let mut levels = 0;
    for k in 0..16 {
        levels = k + 1;
        em[k] = a;
        emc = emc.sqrt();
        en[k] = emc;
        c = 0.5 * (a + emc);
        if (a - emc).abs() <= 1e-9 * a {
            break;
        }
        emc *= a;
        a = c;
    }
    let u = c * x;
    let mut sn = u.sin();
    let mut cn = u.cos();
    let mut dn = 1.0;
    if sn != 0.0 {
        let mut a = cn / sn;
        c *= a;
        for k in (0..levels).rev() {
            let b = em[k];
            a *= c;
            c *= dn;
            dn = (en[k] + a) / (b + a);
            a = c / b;
        }
        let a = 1.0 / (c * c + 1.0).sqrt();
        sn = if sn >= 0.0 { a } else { -a };
        cn = c * sn;
    }
    (sn, cn, dn)
}

pub fn jacobi_sn(x: f64, s: f64) -> f64 {
    jacobi_sncndn(x, s).0
}

/// Parameters of the periodic stationary profile
/// `c(x) = sqrt(1 - eps) sn(sqrt((1 + eps)/(2 gamma)) (x - x0), s)` with
/// `s = sqrt((1 - eps)/(1 + eps))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnSolutionSpec {
    pub epsilon: f64,
    pub gamma: f64,
    pub x0: f64,
}

impl SnSolutionSpec {
    pub fn new(epsilon: f64, gamma: f64, x0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in [0, 1], got {epsilon}")));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
        }
        if !x0.is_finite() {
            return Err(Error::InvalidParameter("x0 must be finite".into()));
        }
        Ok(Self { epsilon, gamma, x0 })
    }

    pub fn modulus(&self) -> f64 {
        ((1.0 - self.epsilon) / (1.0 + self.epsilon)).sqrt()
    }

    pub fn amplitude(&self) -> f64 {
        (1.0 - self.epsilon).sqrt()
    }

    pub fn wavenumber(&self) -> f64 {
        ((1.0 + self.epsilon) / (2.0 * self.gamma)).sqrt()
    }
}

pub fn sn_solution(spec: &SnSolutionSpec, x: f64) -> f64 {
    spec.amplitude() * jacobi_sn(spec.wavenumber() * (x - spec.x0), spec.modulus())
}

/// `c'(x) = A k cn dn`.
pub fn sn_solution_derivative(spec: &SnSolutionSpec, x: f64) -> f64 {
    let k = spec.wavenumber();
    let (_, cn, dn) = jacobi_sncndn(k * (x - spec.x0), spec.modulus());
    spec.amplitude() * k * cn * dn
}

/// `c''(x) = (c^3 - c) / gamma`, exact for every member of the family.
pub fn sn_solution_second_derivative(spec: &SnSolutionSpec, x: f64) -> f64 {
    let c = sn_solution(spec, x);
    (c * c * c - c) / spec.gamma
}

/// Period `4 sqrt(2 gamma/(1 + eps)) K(s)`; the front limit `eps = 0` has
/// none.
pub fn sn_wavelength(spec: &SnSolutionSpec) -> Result<f64> {
    let s = spec.modulus();
    if 1.0 - s < MODULUS_LIMIT {
        return Err(Error::InvalidParameter("the eps = 0 front has infinite wavelength".into()));
    }
    Ok(4.0 / spec.wavenumber() * elliptic_k(s)?)
}
