//! Restarted GMRES for matrix-free operators, with optional right
//! preconditioning.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    pub restart: usize,
    /// Relative residual target `|b - A x| / |b|`.
    pub tol: f64,
    /// Cap on the total number of Krylov iterations.
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            restart: 30,
            tol: 1e-10,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresInfo {
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Identity preconditioner.
pub fn no_precond(r: &[f64], z: &mut [f64]) {
    z.copy_from_slice(r);
}

/// Solves `A x = b` starting from the contents of `x`.
///
/// `apply(v, out)` writes `A v`; `precond(r, out)` writes `M^{-1} r`. With
/// right preconditioning the monitored residual is the true one.
pub fn gmres<A, M>(mut apply: A, mut precond: M, b: &[f64], x: &mut [f64], opts: &GmresOptions) -> Result<GmresInfo>
where
    A: FnMut(&[f64], &mut [f64]),
    M: FnMut(&[f64], &mut [f64]),
{
    let n = b.len();
    assert_eq!(x.len(), n, "gmres: x and b differ in length");
    let m = opts.restart.max(1);
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(GmresInfo {
            iterations: 0,
            residual: 0.0,
        });
    }

    let mut r = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut v: Vec<Vec<f64>> = vec![vec![0.0; n]; m + 1];
    let mut h = vec![vec![0.0; m]; m + 1];
    let mut cs = vec![0.0; m];
    let mut sn = vec![0.0; m];
    let mut g = vec![0.0; m + 1];
    let mut total = 0usize;

    loop {
        apply(x, &mut tmp);
        for i in 0..n {
            r[i] = b[i] - tmp[i];
        }
        let beta = norm(&r);
        let mut rel = beta / bnorm;
        if rel <= opts.tol {
            return Ok(GmresInfo {
                iterations: total,
                residual: rel,
            });
        }
        if total >= opts.max_iter {
            return Err(Error::GmresNotConverged {
                iterations: total,
                residual: rel,
            });
        }
        for i in 0..n {
            v[0][i] = r[i] / beta;
        }
        g.iter_mut().for_each(|e| *e = 0.0);
        g[0] = beta;

        let mut k = 0;
        while k < m && total < opts.max_iter {
            precond(&v[k], &mut z);
            apply(&z, &mut tmp);
            // modified Gram-Schmidt
            for j in 0..=k {
                let hjk = dot(&tmp, &v[j]);
                h[j][k] = hjk;
                for i in 0..n {
                    tmp[i] -= hjk * v[j][i];
                }
            }
            let hn = norm(&tmp);
            h[k + 1][k] = hn;
            if hn > 0.0 {
                for i in 0..n {
                    v[k + 1][i] = tmp[i] / hn;
                }
            }
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let d = h[k][k].hypot(h[k + 1][k]);
            cs[k] = h[k][k] / d;
            sn[k] = h[k + 1][k] / d;
            h[k][k] = d;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k += 1;
            rel = g[k].abs() / bnorm;
            if rel <= opts.tol || hn == 0.0 {
                break;
            }
        }

        // back substitution for y, then x += M^{-1} V y
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for j in i + 1..k {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        tmp.iter_mut().for_each(|e| *e = 0.0);
        for (j, yj) in y.iter().enumerate() {
            for i in 0..n {
                tmp[i] += yj * v[j][i];
            }
        }
        precond(&tmp, &mut z);
        for i in 0..n {
            x[i] += z[i];
        }
    }
}
