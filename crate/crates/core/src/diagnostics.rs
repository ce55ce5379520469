//! Integral observers: mass, energy, the energy-decay companion ODE and
//! error norms. All integrals are midpoint sums over cells.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::hyperbolic::{Cadence, Observer, StateView};
use crate::params::ModelParams;
use crate::physics::{self, Layout, Vars};
use crate::state::FieldState;

pub fn total_mass(c: &[f64], grid: &Grid) -> f64 {
    c.iter().sum::<f64>() * grid.cell_volume()
}

fn cells_of(state: &FieldState) -> (Vec<Vars>, Layout) {
    let layout = Layout::new(state.dim());
    (crate::hyperbolic::pack(state, layout), layout)
}

fn integrate(cells: &[Vars], grid: &Grid, f: impl Fn(&Vars) -> f64) -> f64 {
    cells.iter().map(f).sum::<f64>() * grid.cell_volume()
}

pub fn total_energy(state: &FieldState, grid: &Grid, params: &ModelParams) -> f64 {
    let (cells, layout) = cells_of(state);
    integrate(&cells, grid, |u| physics::energy_density(u, layout, params))
}

/// `(E_I, E_II)`.
pub fn energy_parts(state: &FieldState, grid: &Grid, params: &ModelParams) -> (f64, f64) {
    let (cells, layout) = cells_of(state);
    let mut e1 = 0.0;
    let mut e2 = 0.0;
    for u in &cells {
        let (a, b) = physics::energy_split(u, layout, params);
        e1 += a;
        e2 += b;
    }
    (e1 * grid.cell_volume(), e2 * grid.cell_volume())
}

/// `int |q/tau|^2`, the instantaneous rate of energy loss.
pub fn total_dissipation(state: &FieldState, grid: &Grid, params: &ModelParams) -> f64 {
    let (cells, layout) = cells_of(state);
    integrate(&cells, grid, |u| physics::dissipation_density(u, layout, params))
}

/// Predicted `E(t_k)` from `dE/dt = -D(t)`, `E(t_0) = e0`, with `D` sampled
/// at `times` and linearly interpolated in between. Classical RK4 on each
/// sampling interval.
pub fn energy_decay_ode(times: &[f64], dissipation: &[f64], e0: f64) -> Result<Vec<f64>> {
    if times.len() != dissipation.len() {
        return Err(Error::ShapeMismatch {
            field: "dissipation",
            expected: times.len(),
            actual: dissipation.len(),
        });
    }
    let mut out = Vec::with_capacity(times.len());
    if times.is_empty() {
        return Ok(out);
    }
    let mut e = e0;
    out.push(e);
    for k in 1..times.len() {
        let (t0, t1) = (times[k - 1], times[k]);
        let h = t1 - t0;
        if h < 0.0 {
            return Err(Error::InvalidParameter("sample times must be nondecreasing".into()));
        }
        let d = |t: f64| {
            if h == 0.0 {
                dissipation[k]
            } else {
                dissipation[k - 1] + (dissipation[k] - dissipation[k - 1]) * (t - t0) / h
            }
        };
        // the right-hand side does not depend on E
        let k1 = -d(t0);
        let k2 = -d(t0 + 0.5 * h);
        let k3 = k2;
        let k4 = -d(t1);
        e += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push(e);
    }
    Ok(out)
}

fn check_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            field: "b",
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(())
}

/// `sqrt(sum (a - b)^2) / sqrt(sum a^2)`; normalised by the first argument.
pub fn l2_relative_error(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = a.iter().map(|x| x * x).sum();
    if den == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((num / den).sqrt())
}

pub fn linf_error(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// One row of the energy/mass time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample {
    pub step: usize,
    pub time: f64,
    pub energy: f64,
    pub energy_i: f64,
    pub energy_ii: f64,
    pub mass: f64,
    pub dissipation: f64,
}

/// Observer recording [`EnergySample`]s along a hyperbolic run.
#[derive(Debug, Clone)]
pub struct EnergyMonitor {
    params: ModelParams,
    cadence: Cadence,
    pub samples: Vec<EnergySample>,
}

impl EnergyMonitor {
    pub fn new(params: &ModelParams) -> Self {
        Self::with_cadence(params, Cadence::EveryStep)
    }

    pub fn with_cadence(params: &ModelParams, cadence: Cadence) -> Self {
        Self {
            params: *params,
            cadence,
            samples: Vec::new(),
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.time).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.energy).collect()
    }

    /// Companion prediction started from the first recorded energy.
    pub fn predicted(&self) -> Result<Vec<f64>> {
        let d: Vec<f64> = self.samples.iter().map(|s| s.dissipation).collect();
        let e0 = self.samples.first().map_or(0.0, |s| s.energy);
        energy_decay_ode(&self.times(), &d, e0)
    }
}

impl Observer for EnergyMonitor {
    fn cadence(&self) -> Cadence {
        self.cadence.clone()
    }

    fn observe(&mut self, step: usize, view: &StateView<'_>) {
        let layout = view.layout;
        let p = &self.params;
        let mut e1 = 0.0;
        let mut e2 = 0.0;
        let mut mass = 0.0;
        let mut diss = 0.0;
        for u in view.cells {
            let (a, b) = physics::energy_split(u, layout, p);
            e1 += a;
            e2 += b;
            mass += u[layout.c()];
            diss += physics::dissipation_density(u, layout, p);
        }
        let vol = view.grid.cell_volume();
        self.samples.push(EnergySample {
            step,
            time: view.time,
            energy: (e1 + e2) * vol,
            energy_i: e1 * vol,
            energy_ii: e2 * vol,
            mass: mass * vol,
            dissipation: diss * vol,
        });
    }
}
