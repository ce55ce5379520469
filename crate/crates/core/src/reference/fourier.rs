use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::ImplicitOperator;
use crate::grid::Grid;

#[derive(Clone)]
pub(crate) struct FftPlans {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl FftPlans {
    pub(crate) fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx: grid.nx,
            ny: grid.ny,
            fwd_x: planner.plan_fft_forward(grid.nx),
            inv_x: planner.plan_fft_inverse(grid.nx),
            fwd_y: planner.plan_fft_forward(grid.ny),
            inv_y: planner.plan_fft_inverse(grid.ny),
        }
    }

    fn transform(&self, data: &mut [Complex64], forward: bool) {
        let (fx, fy) = if forward { (&self.fwd_x, &self.fwd_y) } else { (&self.inv_x, &self.inv_y) };
        fx.process(data);
        if self.ny > 1 {
            let mut col = vec![Complex64::new(0.0, 0.0); self.ny];
            for i in 0..self.nx {
                for j in 0..self.ny {
                    col[j] = data[j * self.nx + i];
                }
                fy.process(&mut col);
                for j in 0..self.ny {
                    data[j * self.nx + i] = col[j];
                }
            }
        }
    }
}

/// Diagonalises a translation-invariant operator on the periodic grid.
///
/// The symbol is the DFT of the operator's response to a unit impulse, so
/// any constant-coefficient stencil is inverted exactly.
pub struct FourierPreconditioner<'a> {
    plans: &'a FftPlans,
    inv_symbol: Vec<Complex64>,
    buf: Vec<Complex64>,
}

impl<'a> FourierPreconditioner<'a> {
    pub(crate) fn new(plans: &'a FftPlans, op: &ImplicitOperator) -> Self {
        let n = op.grid().len();
        let mut delta = vec![0.0; n];
        delta[0] = 1.0;
        let mut col = vec![0.0; n];
        op.apply(&delta, &mut col);
        let mut sym: Vec<Complex64> = col.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        plans.transform(&mut sym, true);
        let scale = 1.0 / n as f64;
        let inv_symbol = sym
            .iter()
            .map(|s| {
                // a vanishing mode would only appear for a non-invertible
                // operator; leave such a mode untouched
                if s.norm() < 1e-12 {
                    Complex64::new(scale, 0.0)
                } else {
                    scale / s
                }
            })
            .collect();
        Self {
            plans,
            inv_symbol,
            buf: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn apply(&mut self, r: &[f64], z: &mut [f64]) {
        for (b, &v) in self.buf.iter_mut().zip(r) {
            *b = Complex64::new(v, 0.0);
        }
        self.plans.transform(&mut self.buf, true);
        for (b, s) in self.buf.iter_mut().zip(&self.inv_symbol) {
            *b *= s;
        }
        self.plans.transform(&mut self.buf, false);
        for (o, b) in z.iter_mut().zip(&self.buf) {
            *o = b.re;
        }
    }
}
