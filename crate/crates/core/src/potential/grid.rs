//! Midpoint quadrature of kernels against a piecewise-constant grid.
//!
//! Every cell is integrated at two resolutions, s and 2s subcells per
//! axis, with s = 1 away from the anchor and s = 2 for cells within four
//! spacings of it. The anchor stays fixed while a stencil is evaluated,
//! so the discrete integral is a smooth function of the base point.

use rayon::prelude::*;

use super::density::{unravel, Grid};
use super::unit_sphere_area;

const NEAR_CELLS: f64 = 4.0;
const CHUNK: usize = 64;

#[derive(Debug, Clone)]
pub(crate) struct GridSums {
    /// Richardson combination (4 fine − coarse) / 3
    pub value: Vec<f64>,
    /// the finer of the two midpoint sums
    pub fine: Vec<f64>,
    /// |fine − coarse|
    pub error: Vec<f64>,
}

/// Normalized integrals of `width` kernels; `kernel(y, out)` writes the
/// kernel values at y = ζ − x into `out`.
pub(crate) fn grid_integrate<K>(grid: &Grid, x: &[f64], anchor: &[f64], width: usize, kernel: K) -> GridSums
where
    K: Fn(&[f64], &mut [f64]) + Sync,
{
    let n = grid.dim();
    let h = grid.spacing();
    let partials: Vec<(Vec<f64>, Vec<f64>)> = grid
        .occupied()
        .par_chunks(CHUNK)
        .map(|cells| {
            let mut coarse = vec![0.0; width];
            let mut fine = vec![0.0; width];
            let mut buf = vec![0.0; width];
            let mut y = vec![0.0; n];
            for &c in cells {
                let rho = grid.values()[c];
                let corner = grid.cell_corner(c);
                let s: usize = if grid.cell_distance(c, anchor) < NEAR_CELLS * h { 2 } else { 1 };
                for (level, acc) in [(s, &mut coarse), (2 * s, &mut fine)] {
                    let sub = h / level as f64;
                    let weight = rho * sub.powi(n as i32);
                    let count = level.pow(n as u32);
                    let shape = vec![level; n];
                    for flat in 0..count {
                        let idx = unravel(flat, &shape);
                        for k in 0..n {
                            y[k] = corner[k] + (idx[k] as f64 + 0.5) * sub - x[k];
                        }
                        kernel(&y, &mut buf);
                        for (a, b) in acc.iter_mut().zip(&buf) {
                            *a += weight * b;
                        }
                    }
                }
            }
            (coarse, fine)
        })
        .collect();
    let norm = n as f64 / unit_sphere_area(n);
    let mut coarse = vec![0.0; width];
    let mut fine = vec![0.0; width];
    for (c, f) in &partials {
        for k in 0..width {
            coarse[k] += c[k];
            fine[k] += f[k];
        }
    }
    let mut out = GridSums { value: vec![0.0; width], fine: vec![0.0; width], error: vec![0.0; width] };
    for k in 0..width {
        let (c, f) = (norm * coarse[k], norm * fine[k]);
        out.value[k] = (4.0 * f - c) / 3.0;
        out.fine[k] = f;
        out.error[k] = (f - c).abs();
    }
    out
}
