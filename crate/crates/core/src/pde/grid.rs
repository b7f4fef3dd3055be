//! Uniform cell-centered grids with reflecting ghost cells.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 1D interval `[0, L]` or a 2D rectangle `[0, Lx] x [0, Ly]`.
///
/// Fields are stored row-major: cell `(i, j)` (x index `i`, y index `j`) is
/// at `j * nx + i`. For 1D grids `ny = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    dim: u8,
}

pub const MIN_CELLS: usize = 4;

fn check_axis(name: &'static str, n: usize, length: f64) -> Result<()> {
    if n < MIN_CELLS {
        return Err(Error::InvalidParameter {
            name,
            value: n as f64,
            reason: format!("need at least {MIN_CELLS} cells"),
        });
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidParameter {
            name: "length",
            value: length,
            reason: "must be finite and > 0".into(),
        });
    }
    Ok(())
}

impl Grid {
    pub fn line(n: usize, length: f64) -> Result<Self> {
        check_axis("n", n, length)?;
        Ok(Grid {
            nx: n,
            ny: 1,
            lx: length,
            ly: 1.0,
            dim: 1,
        })
    }

    pub fn rect(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        check_axis("nx", nx, lx)?;
        check_axis("ny", ny, ly)?;
        Ok(Grid { nx, ny, lx, ly, dim: 2 })
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn cell_volume(&self) -> f64 {
        match self.dim {
            1 => self.hx(),
            _ => self.hx() * self.hy(),
        }
    }

    /// Domain length (1D) or area (2D).
    pub fn measure(&self) -> f64 {
        match self.dim {
            1 => self.lx,
            _ => self.lx * self.ly,
        }
    }

    /// `sum_d 1 / h_d^2`, the scale of the discrete Laplacian.
    pub fn inverse_h2(&self) -> f64 {
        let ix = 1.0 / (self.hx() * self.hx());
        match self.dim {
            1 => ix,
            _ => ix + 1.0 / (self.hy() * self.hy()),
        }
    }

    /// Largest stable forward-Euler step for diffusion at rate `d`, scaled by
    /// `safety`: `safety / (2 d sum_d h_d^-2)`, i.e. `safety h^2 / (2 dim d)` on
    /// square cells.
    pub fn cfl_dt(&self, d: f64, safety: f64) -> f64 {
        safety / (2.0 * d * self.inverse_h2())
    }

    /// Cell-center coordinates `(x, y)` in storage order.
    pub fn centers(&self) -> Vec<(f64, f64)> {
        let (hx, hy) = (self.hx(), self.hy());
        let mut out = Vec::with_capacity(self.len());
        for j in 0..self.ny {
            for i in 0..self.nx {
                let y = if self.dim == 1 { 0.0 } else { (j as f64 + 0.5) * hy };
                out.push(((i as f64 + 0.5) * hx, y));
            }
        }
        out
    }

    pub fn check(&self, field: &[f64]) -> Result<()> {
        if field.len() != self.len() {
            return Err(Error::ShapeMismatch {
                expected: self.len(),
                got: field.len(),
            });
        }
        Ok(())
    }
}

/// Second-order Neumann Laplacian; ghost cells mirror the boundary cells.
pub fn laplacian_neumann(field: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    grid.check(field)?;
    let mut out = vec![0.0; field.len()];
    laplacian_into(field, grid, &mut out);
    Ok(out)
}

#[inline]
fn second_difference(row: &[f64], i: usize) -> f64 {
    let c = row[i];
    let l = if i == 0 { c } else { row[i - 1] };
    let r = if i + 1 == row.len() { c } else { row[i + 1] };
    (l - c) + (r - c)
}

/// Same as [`laplacian_neumann`], writing into `out`; lengths are not checked.
pub(crate) fn laplacian_into(field: &[f64], grid: &Grid, out: &mut [f64]) {
    let nx = grid.nx;
    let ix = 1.0 / (grid.hx() * grid.hx());
    if grid.dim == 1 {
        for (i, o) in out.iter_mut().enumerate() {
            *o = second_difference(field, i) * ix;
        }
        return;
    }
    let iy = 1.0 / (grid.hy() * grid.hy());
    let ny = grid.ny;
    out.par_chunks_mut(nx).enumerate().for_each(|(j, row_out)| {
        let row = &field[j * nx..(j + 1) * nx];
        let below = if j == 0 { row } else { &field[(j - 1) * nx..j * nx] };
        let above = if j + 1 == ny { row } else { &field[(j + 1) * nx..(j + 2) * nx] };
        for i in 0..nx {
            let c = row[i];
            let yy = (below[i] - c) + (above[i] - c);
            row_out[i] = second_difference(row, i) * ix + yy * iy;
        }
    });
}

/// `L1`, `L2` and `Linf` norms of a cell field, summed in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

pub fn field_norms(field: &[f64], grid: &Grid) -> FieldNorms {
    let vol = grid.cell_volume();
    let (mut s1, mut s2, mut m) = (0.0, 0.0, 0.0f64);
    for &v in field {
        s1 += v.abs();
        s2 += v * v;
        m = m.max(v.abs());
    }
    FieldNorms {
        l1: s1 * vol,
        l2: (s2 * vol).sqrt(),
        linf: m,
    }
}

/// Integral of a cell field over the domain.
pub fn integral(field: &[f64], grid: &Grid) -> f64 {
    field.iter().sum::<f64>() * grid.cell_volume()
}
