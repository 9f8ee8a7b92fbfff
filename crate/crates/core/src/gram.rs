//! Infinite-width two-layer ReLU kernel and its Gram matrix.

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::Dataset;
use crate::io;

/// Rows per parallel work unit when building the Gram matrix.
pub const DEFAULT_BLOCK_ROWS: usize = 256;

/// `c (π - arccos c) / 2π` for the dot product `c` of two unit vectors.
///
/// `c` is clamped to `[-1, 1]` first; accumulated dot products of unit
/// vectors can overshoot by a few ulps.
#[inline]
pub fn relu_kernel(c: f64) -> f64 {
    let c = c.clamp(-1.0, 1.0);
    c * (PI - c.acos()) / (2.0 * PI)
}

/// Dense symmetric `n x n` kernel matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    data: Vec<f64>,
}

impl GramMatrix {
    /// Wraps a row-major buffer, checking that it is square and exactly symmetric.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::data(format!(
                "Gram buffer has {} values, expected {n} x {n}",
                data.len()
            )));
        }
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::data(format!(
                        "Gram matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        io::write_ddcm(path, self.n, self.n, &self.data)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let (rows, cols, data) = io::read_ddcm(path)?;
        if rows != cols {
            return Err(Error::data(format!(
                "{}: Gram matrix must be square, found {rows} x {cols}",
                path.display()
            )));
        }
        Self::from_row_major(rows, data)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn build_gram(d: &Dataset) -> Result<GramMatrix> {
    build_gram_blocked(d, DEFAULT_BLOCK_ROWS)
}

/// Builds `H_ij = relu_kernel(x_i . x_j)`.
///
/// Row blocks of the upper triangle are filled in parallel and then mirrored,
/// so the result is exactly symmetric and does not depend on the thread count
/// or `block_rows`. Diagonal entries are set to `relu_kernel(1) = 1/2`.
pub fn build_gram_blocked(d: &Dataset, block_rows: usize) -> Result<GramMatrix> {
    let n = d.n();
    if n < 2 {
        return Err(Error::data(format!(
            "Gram matrix needs at least 2 examples, got {n}"
        )));
    }
    let block_rows = block_rows.max(1);
    let mut data = vec![0.0; n * n];
    data.par_chunks_mut(block_rows * n)
        .enumerate()
        .for_each(|(b, block)| {
            for (r, out) in block.chunks_exact_mut(n).enumerate() {
                let i = b * block_rows + r;
                let xi = d.row(i);
                out[i] = relu_kernel(1.0);
                for (j, h) in out.iter_mut().enumerate().skip(i + 1) {
                    *h = relu_kernel(dot(xi, d.row(j)));
                }
            }
        });
    for i in 0..n {
        for j in 0..i {
            data[i * n + j] = data[j * n + i];
        }
    }
    Ok(GramMatrix { n, data })
}
