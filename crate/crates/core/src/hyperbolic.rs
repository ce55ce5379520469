//! Second-order MUSCL-Hancock finite volumes for the relaxed system.
//!
//! One step is: central (unlimited) slopes, a half-step evolution of the
//! boundary-extrapolated values with the local flux difference and the
//! source at `Q^n`, intercell Rusanov or FORCE fluxes from the evolved
//! values, and an unsplit conservative update whose source is evaluated at
//! the cell midpoint state `Q^n + dt/2 dQ/dt`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::ModelParams;
use crate::physics::{self, Direction, Layout, Vars, MAX_VARS};
use crate::state::FieldState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxChoice {
    Rusanov,
    Force,
}

impl std::str::FromStr for FluxChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rusanov" => Ok(FluxChoice::Rusanov),
            "force" => Ok(FluxChoice::Force),
            other => Err(Error::Config(format!("unknown flux '{other}'"))),
        }
    }
}

/// Whether per-cell loops may run on the rayon pool. Every loop writes
/// disjoint cells from read-only inputs, so both modes give identical bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Sequential,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeControl {
    pub cfl: f64,
    pub t_end: f64,
    pub dt_cap: Option<f64>,
}

impl TimeControl {
    pub fn new(cfl: f64, t_end: f64) -> Result<Self> {
        let ctrl = Self {
            cfl,
            t_end,
            dt_cap: None,
        };
        ctrl.validate()?;
        Ok(ctrl)
    }

    pub fn with_dt_cap(mut self, cap: f64) -> Result<Self> {
        if !(cap.is_finite() && cap > 0.0) {
            return Err(Error::InvalidParameter(format!("dt cap must be positive, got {cap}")));
        }
        self.dt_cap = Some(cap);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidParameter(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidParameter(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        Ok(())
    }
}

/// Packs a [`FieldState`] into one [`Vars`] per cell.
pub fn pack(state: &FieldState, layout: Layout) -> Vec<Vars> {
    (0..state.len())
        .map(|i| {
            let mut u = [0.0; MAX_VARS];
            u[layout.c()] = state.c[i];
            for k in 0..layout.dim {
                u[layout.q(k)] = state.q[k][i];
                u[layout.p(k)] = state.p[k][i];
            }
            u[layout.w()] = state.w[i];
            u[layout.phi()] = state.phi[i];
            u
        })
        .collect()
}

/// Inverse of [`pack`].
pub fn unpack(cells: &[Vars], layout: Layout, time: f64) -> FieldState {
    let n = cells.len();
    let mut s = FieldState {
        c: Vec::with_capacity(n),
        phi: Vec::with_capacity(n),
        w: Vec::with_capacity(n),
        q: vec![Vec::with_capacity(n); layout.dim],
        p: vec![Vec::with_capacity(n); layout.dim],
        time,
    };
    for u in cells {
        s.c.push(u[layout.c()]);
        s.phi.push(u[layout.phi()]);
        s.w.push(u[layout.w()]);
        for k in 0..layout.dim {
            s.q[k].push(u[layout.q(k)]);
            s.p[k].push(u[layout.p(k)]);
        }
    }
    s
}

/// Boundary-extrapolated values per cell. `bottom`/`top` are empty in 1D.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub left: Vec<Vars>,
    pub right: Vec<Vars>,
    pub bottom: Vec<Vars>,
    pub top: Vec<Vars>,
}

#[inline]
fn axpy(a: f64, x: &Vars, y: &Vars, n: usize) -> Vars {
    let mut out = *y;
    for v in 0..n {
        out[v] += a * x[v];
    }
    out
}

#[inline]
fn half_diff(plus: &Vars, minus: &Vars, n: usize) -> Vars {
    // half of the centred slope times the spacing: (Q_{i+1} - Q_{i-1}) / 4
    let mut d = [0.0; MAX_VARS];
    for v in 0..n {
        d[v] = 0.25 * (plus[v] - minus[v]);
    }
    d
}

fn map_cells<F>(exec: Execution, n: usize, f: F) -> Vec<Vars>
where
    F: Fn(usize) -> Vars + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..n).map(f).collect(),
        Execution::Parallel => (0..n).into_par_iter().with_min_len(512).map(f).collect(),
    }
}

/// Unlimited central-slope reconstruction `W = Q -/+ dQ/2` in each direction.
pub fn reconstruct(cells: &[Vars], grid: &Grid, layout: Layout) -> Reconstruction {
    reconstruct_with(cells, grid, layout, Execution::Sequential)
}

fn reconstruct_with(cells: &[Vars], grid: &Grid, layout: Layout, exec: Execution) -> Reconstruction {
    let n = layout.nvars();
    let sx = |idx: usize| {
        let (i, j) = (idx % grid.nx, idx / grid.nx);
        half_diff(&cells[grid.idx(grid.wrap_x(i, 1), j)], &cells[grid.idx(grid.wrap_x(i, -1), j)], n)
    };
    let left = map_cells(exec, cells.len(), |idx| axpy(-1.0, &sx(idx), &cells[idx], n));
    let right = map_cells(exec, cells.len(), |idx| axpy(1.0, &sx(idx), &cells[idx], n));
    let (bottom, top) = if grid.dim == 2 {
        let sy = |idx: usize| {
            let (i, j) = (idx % grid.nx, idx / grid.nx);
            half_diff(&cells[grid.idx(i, grid.wrap_y(j, 1))], &cells[grid.idx(i, grid.wrap_y(j, -1))], n)
        };
        (
            map_cells(exec, cells.len(), |idx| axpy(-1.0, &sy(idx), &cells[idx], n)),
            map_cells(exec, cells.len(), |idx| axpy(1.0, &sy(idx), &cells[idx], n)),
        )
    } else {
        (Vec::new(), Vec::new())
    };
    Reconstruction {
        left,
        right,
        bottom,
        top,
    }
}

/// Local time derivative `-(F(W^R) - F(W^L))/dx - (G(W^T) - G(W^B))/dy + S(Q)`.
fn local_rate(rec: &Reconstruction, cells: &[Vars], idx: usize, grid: &Grid, layout: Layout, params: &ModelParams) -> Vars {
    let n = layout.nvars();
    let mut rate = physics::source(&cells[idx], layout, params);
    let fr = physics::flux(&rec.right[idx], Direction::X, layout, params);
    let fl = physics::flux(&rec.left[idx], Direction::X, layout, params);
    for v in 0..n {
        rate[v] -= (fr[v] - fl[v]) / grid.dx;
    }
    if grid.dim == 2 {
        let gt = physics::flux(&rec.top[idx], Direction::Y, layout, params);
        let gb = physics::flux(&rec.bottom[idx], Direction::Y, layout, params);
        for v in 0..n {
            rate[v] -= (gt[v] - gb[v]) / grid.dy;
        }
    }
    rate
}

/// Evolves every boundary value by `dt/2` with the cell's local time
/// derivative, in place. Returns that derivative per cell.
pub fn predictor(
    rec: &mut Reconstruction,
    cells: &[Vars],
    grid: &Grid,
    layout: Layout,
    params: &ModelParams,
    dt: f64,
) -> Vec<Vars> {
    predictor_with(rec, cells, grid, layout, params, dt, Execution::Sequential)
}

fn predictor_with(
    rec: &mut Reconstruction,
    cells: &[Vars],
    grid: &Grid,
    layout: Layout,
    params: &ModelParams,
    dt: f64,
    exec: Execution,
) -> Vec<Vars> {
    let n = layout.nvars();
    let rates = {
        let rec = &*rec;
        map_cells(exec, cells.len(), |idx| local_rate(rec, cells, idx, grid, layout, params))
    };
    let h = 0.5 * dt;
    let evolve = |side: &mut Vec<Vars>| {
        for (w, r) in side.iter_mut().zip(&rates) {
            *w = axpy(h, r, w, n);
        }
    };
    evolve(&mut rec.left);
    evolve(&mut rec.right);
    evolve(&mut rec.bottom);
    evolve(&mut rec.top);
    rates
}

/// Numerical flux through a face with `left`/`right` the half-step values on
/// either side. `spacing` is the cell width normal to the face and
/// `lambda_max` the largest signal speed of the two adjacent cells (only
/// Rusanov reads it).
///
/// FORCE uses the multidimensional form: in `d` dimensions the 1D flux is
/// built with the step `d * dt`, so the unsplit update is the average of
/// `d` one-dimensional FORCE updates.
#[allow(clippy::too_many_arguments)]
pub fn intercell_flux(
    left: &Vars,
    right: &Vars,
    dir: Direction,
    layout: Layout,
    params: &ModelParams,
    spacing: f64,
    dt: f64,
    lambda_max: f64,
    choice: FluxChoice,
) -> Vars {
    let n = layout.nvars();
    let fl = physics::flux(left, dir, layout, params);
    let fr = physics::flux(right, dir, layout, params);
    let mut out = [0.0; MAX_VARS];
    match choice {
        FluxChoice::Rusanov => {
            for v in 0..n {
                out[v] = 0.5 * (fl[v] + fr[v]) - 0.5 * lambda_max * (right[v] - left[v]);
            }
        }
        FluxChoice::Force => {
            // average of the Lax-Friedrichs flux and the flux at the
            // Richtmyer (two-step Lax-Wendroff) state
            let r = layout.dim as f64 * dt / spacing;
            let mut mid = [0.0; MAX_VARS];
            for v in 0..n {
                mid[v] = 0.5 * (left[v] + right[v]) - 0.5 * r * (fr[v] - fl[v]);
            }
            let flw = physics::flux(&mid, dir, layout, params);
            for v in 0..n {
                let flf = 0.5 * (fl[v] + fr[v]) - 0.5 / r * (right[v] - left[v]);
                out[v] = 0.5 * (flw[v] + flf);
            }
        }
    }
    out
}

/// Per-cell maximum signal speed at `Q^n`.
fn cell_speeds(cells: &[Vars], layout: Layout, params: &ModelParams) -> Result<Vec<f64>> {
    cells
        .iter()
        .map(|u| physics::max_speed(u[layout.c()], params))
        .collect()
}

/// Stable time step `cfl * min(dx, dy) / lambda_max` over the whole grid.
pub fn cfl_time_step(cells: &[Vars], grid: &Grid, layout: Layout, params: &ModelParams, cfl: f64) -> Result<f64> {
    let speeds = cell_speeds(cells, layout, params)?;
    let lam = speeds.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok(cfl_from_speed(grid, lam, cfl))
}

fn cfl_from_speed(grid: &Grid, lam: f64, cfl: f64) -> f64 {
    let h = if grid.dim == 2 { grid.dx.min(grid.dy) } else { grid.dx };
    if lam > 0.0 {
        cfl * h / lam
    } else {
        f64::INFINITY
    }
}

/// Advances packed cells by exactly `dt`.
#[allow(clippy::too_many_arguments)]
pub fn advance(
    cells: &[Vars],
    grid: &Grid,
    layout: Layout,
    params: &ModelParams,
    dt: f64,
    choice: FluxChoice,
    exec: Execution,
) -> Result<Vec<Vars>> {
    let speeds = cell_speeds(cells, layout, params)?;
    advance_with_speeds(cells, &speeds, grid, layout, params, dt, choice, exec)
}

#[allow(clippy::too_many_arguments)]
fn advance_with_speeds(
    cells: &[Vars],
    speeds: &[f64],
    grid: &Grid,
    layout: Layout,
    params: &ModelParams,
    dt: f64,
    choice: FluxChoice,
    exec: Execution,
) -> Result<Vec<Vars>> {
    let n = layout.nvars();
    let mut rec = reconstruct_with(cells, grid, layout, exec);
    let rates = predictor_with(&mut rec, cells, grid, layout, params, dt, exec);

    // flux through the face on the right (x) or top (y) of each cell
    let fx = map_cells(exec, cells.len(), |idx| {
        let (i, j) = (idx % grid.nx, idx / grid.nx);
        let nb = grid.idx(grid.wrap_x(i, 1), j);
        let lam = speeds[idx].max(speeds[nb]);
        intercell_flux(&rec.right[idx], &rec.left[nb], Direction::X, layout, params, grid.dx, dt, lam, choice)
    });
    let fy = if grid.dim == 2 {
        map_cells(exec, cells.len(), |idx| {
            let (i, j) = (idx % grid.nx, idx / grid.nx);
            let nb = grid.idx(i, grid.wrap_y(j, 1));
            let lam = speeds[idx].max(speeds[nb]);
            intercell_flux(&rec.top[idx], &rec.bottom[nb], Direction::Y, layout, params, grid.dy, dt, lam, choice)
        })
    } else {
        Vec::new()
    };

    let rx = dt / grid.dx;
    let ry = dt / grid.dy;
    let h = 0.5 * dt;
    Ok(map_cells(exec, cells.len(), |idx| {
        let (i, j) = (idx % grid.nx, idx / grid.nx);
        let mid = axpy(h, &rates[idx], &cells[idx], n);
        let s = physics::source(&mid, layout, params);
        let west = &fx[grid.idx(grid.wrap_x(i, -1), j)];
        let east = &fx[idx];
        let mut out = cells[idx];
        for v in 0..n {
            out[v] += -rx * (east[v] - west[v]) + dt * s[v];
        }
        if grid.dim == 2 {
            let south = &fy[grid.idx(i, grid.wrap_y(j, -1))];
            let north = &fy[idx];
            for v in 0..n {
                out[v] -= ry * (north[v] - south[v]);
            }
        }
        out
    }))
}

fn check_finite(cells: &[Vars], layout: Layout, step: usize, time: f64) -> Result<()> {
    const NAMES_1D: [&str; 5] = ["c", "q1", "w", "p1", "phi"];
    const NAMES_2D: [&str; 7] = ["c", "q1", "q2", "w", "p1", "p2", "phi"];
    let n = layout.nvars();
    for (cell, u) in cells.iter().enumerate() {
        if let Some(v) = u[..n].iter().position(|x| !x.is_finite()) {
            let field = if layout.dim == 1 { NAMES_1D[v] } else { NAMES_2D[v] };
            return Err(Error::BlowUp {
                step,
                time,
                field,
                cell,
            });
        }
    }
    Ok(())
}

fn check_state(state: &FieldState, grid: &Grid) -> Result<Layout> {
    if state.dim() != grid.dim || state.len() != grid.len() {
        return Err(Error::ShapeMismatch {
            field: "state",
            expected: grid.len(),
            actual: state.len(),
        });
    }
    if let Some((field, index)) = state.find_non_finite() {
        return Err(Error::NonFinite { field, index });
    }
    Ok(Layout::new(grid.dim))
}

/// Single CFL-limited step, clipped so as not to overshoot `ctrl.t_end`.
/// Returns the new state and the step size used.
pub fn step(
    state: &FieldState,
    grid: &Grid,
    params: &ModelParams,
    ctrl: &TimeControl,
    choice: FluxChoice,
) -> Result<(FieldState, f64)> {
    ctrl.validate()?;
    let layout = check_state(state, grid)?;
    let cells = pack(state, layout);
    let speeds = cell_speeds(&cells, layout, params)?;
    let lam = speeds.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut dt = cfl_from_speed(grid, lam, ctrl.cfl);
    if let Some(cap) = ctrl.dt_cap {
        dt = dt.min(cap);
    }
    let remaining = ctrl.t_end - state.time;
    if remaining > 0.0 {
        dt = dt.min(remaining);
    }
    let next = advance_with_speeds(&cells, &speeds, grid, layout, params, dt, choice, Execution::Sequential)?;
    check_finite(&next, layout, 1, state.time + dt)?;
    Ok((unpack(&next, layout, state.time + dt), dt))
}

/// Read-only view handed to observers.
pub struct StateView<'a> {
    pub grid: &'a Grid,
    pub layout: Layout,
    pub cells: &'a [Vars],
    pub time: f64,
}

impl StateView<'_> {
    pub fn to_state(&self) -> FieldState {
        unpack(self.cells, self.layout, self.time)
    }
}

/// When an observer fires.
#[derive(Debug, Clone, PartialEq)]
pub enum Cadence {
    EveryStep,
    EveryNSteps(usize),
    /// First step at or after each listed time (ascending).
    Times(Vec<f64>),
}

pub trait Observer {
    fn cadence(&self) -> Cadence {
        Cadence::EveryStep
    }

    fn observe(&mut self, step: usize, view: &StateView<'_>);
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: FieldState,
    pub steps: usize,
}

/// Drives [`advance`] until `ctrl.t_end`, landing exactly on it.
///
/// Observers see step 0 (the initial state) and then every step allowed by
/// their cadence. A blow-up aborts with [`Error::BlowUp`].
pub fn run(
    state: &FieldState,
    grid: &Grid,
    params: &ModelParams,
    ctrl: &TimeControl,
    choice: FluxChoice,
    exec: Execution,
    observers: &mut [&mut dyn Observer],
) -> Result<RunOutput> {
    ctrl.validate()?;
    params.validate_hyperbolic()?;
    let layout = check_state(state, grid)?;
    let mut cells = pack(state, layout);
    let mut time = state.time;
    let mut steps = 0usize;
    let cadences: Vec<Cadence> = observers.iter().map(|o| o.cadence()).collect();
    let mut next_time_idx = vec![0usize; observers.len()];

    let notify = |observers: &mut [&mut dyn Observer], next_time_idx: &mut [usize], steps: usize, cells: &[Vars], time: f64, last: bool| {
        let view = StateView {
            grid,
            layout,
            cells,
            time,
        };
        for (k, obs) in observers.iter_mut().enumerate() {
            let fire = match &cadences[k] {
                Cadence::EveryStep => true,
                Cadence::EveryNSteps(n) => steps % n.max(&1) == 0 || last,
                Cadence::Times(ts) => {
                    let mut hit = false;
                    while next_time_idx[k] < ts.len() && time >= ts[next_time_idx[k]] - 1e-14 * ts[next_time_idx[k]].abs().max(1.0) {
                        next_time_idx[k] += 1;
                        hit = true;
                    }
                    hit
                }
            };
            if fire {
                obs.observe(steps, &view);
            }
        }
    };

    notify(observers, &mut next_time_idx, 0, &cells, time, ctrl.t_end <= time);
    while time < ctrl.t_end {
        let speeds = cell_speeds(&cells, layout, params)?;
        let lam = speeds.iter().fold(0.0f64, |a, &b| a.max(b));
        let mut dt = cfl_from_speed(grid, lam, ctrl.cfl);
        if let Some(cap) = ctrl.dt_cap {
            dt = dt.min(cap);
        }
        let last = time + dt >= ctrl.t_end;
        if last {
            dt = ctrl.t_end - time;
        }
        let next = advance_with_speeds(&cells, &speeds, grid, layout, params, dt, choice, exec)?;
        steps += 1;
        time = if last { ctrl.t_end } else { time + dt };
        check_finite(&next, layout, steps, time)?;
        cells = next;
        notify(observers, &mut next_time_idx, steps, &cells, time, last);
    }
    Ok(RunOutput {
        state: unpack(&cells, layout, time),
        steps,
    })
}
