//! Model constants shared by both solvers.

use crate::error::{Error, Result};

/// Admissibility threshold for the penalty stiffness: `|min g''(c)|` over
/// `c in [-1, 1]` for the quartic double well.
pub const ALPHA_CRITICAL: f64 = 1.0;

/// Capillarity `gamma` and the relaxation constants of the hyperbolic system.
///
/// `alpha` is the penalty stiffness coupling `c` and `phi`, `beta` the inertial
/// relaxation of `phi` and `tau` the relaxation time of the mass flux `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
}

impl ModelParams {
    /// Parameters for the hyperbolic system. Rejects `alpha < 1`.
    pub fn new(gamma: f64, alpha: f64, beta: f64, tau: f64) -> Result<Self> {
        let p = Self::unchecked(gamma, alpha, beta, tau);
        p.validate_hyperbolic()?;
        Ok(p)
    }

    /// Parameters for the reference solver, which only reads `gamma`.
    pub fn reference(gamma: f64) -> Result<Self> {
        positive("gamma", gamma)?;
        Ok(Self::unchecked(gamma, ALPHA_CRITICAL, 1.0, 1.0))
    }

    pub(crate) const fn unchecked(gamma: f64, alpha: f64, beta: f64, tau: f64) -> Self {
        Self {
            gamma,
            alpha,
            beta,
            tau,
        }
    }

    pub fn validate_hyperbolic(&self) -> Result<()> {
        positive("gamma", self.gamma)?;
        positive("beta", self.beta)?;
        positive("tau", self.tau)?;
        if !self.alpha.is_finite() || self.alpha < ALPHA_CRITICAL {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} is below the critical penalty {ALPHA_CRITICAL}",
                self.alpha
            )));
        }
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}
