use crate::error::{Error, Result};

/// Minimum cells per direction; the widest stencil of the reference scheme
/// spans five cells.
pub const MIN_CELLS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
}

/// Uniform Cartesian grid in one or two dimensions.
///
/// Cell `i` (zero-based) covers `[xl + i*dx, xl + (i+1)*dx]`. In 1D the
/// y-extent is a dummy unit interval with `ny = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub nx: usize,
    pub ny: usize,
    pub xl: f64,
    pub xr: f64,
    pub yl: f64,
    pub yr: f64,
    pub dx: f64,
    pub dy: f64,
    pub boundary: Boundary,
}

impl Grid {
    pub fn new_1d(xl: f64, xr: f64, nx: usize) -> Result<Self> {
        check_axis("x", xl, xr, nx)?;
        Ok(Self {
            dim: 1,
            nx,
            ny: 1,
            xl,
            xr,
            yl: 0.0,
            yr: 1.0,
            dx: (xr - xl) / nx as f64,
            dy: 1.0,
            boundary: Boundary::Periodic,
        })
    }

    pub fn new_2d(xl: f64, xr: f64, yl: f64, yr: f64, nx: usize, ny: usize) -> Result<Self> {
        check_axis("x", xl, xr, nx)?;
        check_axis("y", yl, yr, ny)?;
        Ok(Self {
            dim: 2,
            nx,
            ny,
            xl,
            xr,
            yl,
            yr,
            dx: (xr - xl) / nx as f64,
            dy: (yr - yl) / ny as f64,
            boundary: Boundary::Periodic,
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major flat index, `i` fastest.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Area (or length in 1D) of one cell.
    pub fn cell_volume(&self) -> f64 {
        if self.dim == 1 {
            self.dx
        } else {
            self.dx * self.dy
        }
    }

    pub fn domain_volume(&self) -> f64 {
        if self.dim == 1 {
            self.xr - self.xl
        } else {
            (self.xr - self.xl) * (self.yr - self.yl)
        }
    }

    pub fn x_center(&self, i: usize) -> f64 {
        self.xl + (i as f64 + 0.5) * self.dx
    }

    pub fn y_center(&self, j: usize) -> f64 {
        if self.dim == 1 {
            0.0
        } else {
            self.yl + (j as f64 + 0.5) * self.dy
        }
    }

    /// Periodic neighbour `i + off` along x.
    #[inline]
    pub fn wrap_x(&self, i: usize, off: isize) -> usize {
        (i as isize + off).rem_euclid(self.nx as isize) as usize
    }

    #[inline]
    pub fn wrap_y(&self, j: usize, off: isize) -> usize {
        (j as isize + off).rem_euclid(self.ny as isize) as usize
    }
}

fn check_axis(name: &str, lo: f64, hi: f64, n: usize) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidParameter(format!(
            "{name}-bounds must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    if n < MIN_CELLS {
        return Err(Error::InvalidParameter(format!(
            "n{name} = {n} is below the minimum of {MIN_CELLS} cells"
        )));
    }
    Ok(())
}

/// Midpoints of `n` equal cells covering `[lo, hi]`.
pub fn axis_centers(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect()
}

/// Cell-center coordinates, one `(x, y)` per cell in storage order
/// (`y = 0` in 1D).
pub fn cell_centers(grid: &Grid) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..grid.ny {
        let y = grid.y_center(j);
        for i in 0..grid.nx {
            out.push((grid.x_center(i), y));
        }
    }
    out
}
