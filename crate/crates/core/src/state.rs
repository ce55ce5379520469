//! Discrete fields on a [`Grid`].
//!
//! Storage is one contiguous lattice per component, indexed like the grid.

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Scalar lattice used by the reference solver and for initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        check_shape("c", grid.len(), &values)?;
        check_finite("c", &values)?;
        Ok(Self { values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            values: vec![0.0; grid.len()],
        }
    }

    /// Samples `f(x, y)` at the cell centers.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            let y = grid.y_center(j);
            for i in 0..grid.nx {
                values.push(f(grid.x_center(i), y));
            }
        }
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// State of the hyperbolic system: `c`, `phi`, `w` and the `d` components of
/// `q` and `p`, plus the simulation time.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub c: Vec<f64>,
    pub phi: Vec<f64>,
    pub w: Vec<f64>,
    pub q: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
    pub time: f64,
}

impl FieldState {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        Self {
            c: vec![0.0; n],
            phi: vec![0.0; n],
            w: vec![0.0; n],
            q: vec![vec![0.0; n]; grid.dim],
            p: vec![vec![0.0; n]; grid.dim],
            time: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// First non-finite entry, if any, as `(component, cell)`.
    pub fn find_non_finite(&self) -> Option<(&'static str, usize)> {
        const Q: [&str; 2] = ["q1", "q2"];
        const P: [&str; 2] = ["p1", "p2"];
        let scan = |v: &[f64]| v.iter().position(|x| !x.is_finite());
        if let Some(i) = scan(&self.c) {
            return Some(("c", i));
        }
        if let Some(i) = scan(&self.phi) {
            return Some(("phi", i));
        }
        if let Some(i) = scan(&self.w) {
            return Some(("w", i));
        }
        for (k, comp) in self.q.iter().enumerate() {
            if let Some(i) = scan(comp) {
                return Some((Q[k.min(1)], i));
            }
        }
        for (k, comp) in self.p.iter().enumerate() {
            if let Some(i) = scan(comp) {
                return Some((P[k.min(1)], i));
            }
        }
        None
    }
}

/// Builds a state at `t = 0`, checking every component against the grid.
pub fn new_state(
    grid: &Grid,
    c0: ScalarField,
    phi0: ScalarField,
    w0: ScalarField,
    q0: Vec<Vec<f64>>,
    p0: Vec<Vec<f64>>,
) -> Result<FieldState> {
    let n = grid.len();
    check_shape("c", n, &c0.values)?;
    check_shape("phi", n, &phi0.values)?;
    check_shape("w", n, &w0.values)?;
    if q0.len() != grid.dim {
        return Err(Error::ShapeMismatch {
            field: "q (components)",
            expected: grid.dim,
            actual: q0.len(),
        });
    }
    if p0.len() != grid.dim {
        return Err(Error::ShapeMismatch {
            field: "p (components)",
            expected: grid.dim,
            actual: p0.len(),
        });
    }
    for comp in &q0 {
        check_shape("q", n, comp)?;
    }
    for comp in &p0 {
        check_shape("p", n, comp)?;
    }
    let state = FieldState {
        c: c0.values,
        phi: phi0.values,
        w: w0.values,
        q: q0,
        p: p0,
        time: 0.0,
    };
    if let Some((field, index)) = state.find_non_finite() {
        return Err(Error::NonFinite { field, index });
    }
    Ok(state)
}

fn check_shape(field: &'static str, expected: usize, v: &[f64]) -> Result<()> {
    if v.len() != expected {
        return Err(Error::ShapeMismatch {
            field,
            expected,
            actual: v.len(),
        });
    }
    Ok(())
}

fn check_finite(field: &'static str, v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFinite { field, index }),
        None => Ok(()),
    }
}
