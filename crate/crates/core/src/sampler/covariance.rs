use rayon::prelude::*;

use super::Grid;
use crate::error::Result;
use crate::kernels::{cross_cov_yc_dv, r_y_table};
use crate::params::ModelParams;

/// Covariance of `(Y_{t_0} - mu, ..., Y_{t_n} - mu, dV_0, ..., dV_{n-1})`.
///
/// Stored as the full symmetric `(2n+1)`-square matrix, row-major; the three
/// blocks are views into it.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceBlocks {
    n: usize,
    step: f64,
    full: Vec<f64>,
}

impl CovarianceBlocks {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// `E[Y^c_{t_i} Y^c_{t_j}]`, `i, j` in `0..=n`.
    pub fn c11(&self, i: usize, j: usize) -> f64 {
        assert!(i <= self.n && j <= self.n);
        self.full(i, j)
    }

    /// `E[Y^c_{t_i} dV_j]`, `i` in `0..=n`, `j` in `0..n`.
    pub fn c12(&self, i: usize, j: usize) -> f64 {
        assert!(i <= self.n && j < self.n);
        self.full(i, self.n + 1 + j)
    }

    /// `E[dV_i dV_j]`.
    pub fn c22(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n);
        self.full(self.n + 1 + i, self.n + 1 + j)
    }

    pub fn full(&self, i: usize, j: usize) -> f64 {
        self.full[i * self.dim() + j]
    }

    /// The assembled matrix, row-major.
    pub fn full_matrix(&self) -> &[f64] {
        &self.full
    }
}

/// Computes the joint covariance on `grid`.
///
/// Both `C11` and `C12` depend on `i - j` only, so each lag is evaluated once:
/// `C12[i][j] = E[Y^c_{t_i} (V_{t_{j+1}} - V_{t_j})]` is the cross-covariance at
/// `t = t_{i-j}, s1 = 0, s2 = t_1`, and vanishes for `i <= j`.
pub fn build_covariance(params: &ModelParams, grid: &Grid) -> Result<CovarianceBlocks> {
    let n = grid.n();
    let dim = 2 * n + 1;
    let step = grid.step();

    let lags: Vec<f64> = (0..=n).map(|k| grid.time(k)).collect();
    let ry: Vec<f64> = r_y_table(params, &lags)?.into_iter().map(|kv| kv.value).collect();
    let cross: Vec<f64> = (1..=n)
        .into_par_iter()
        .map(|k| cross_cov_yc_dv(params, grid.time(k), 0.0, grid.time(1)))
        .collect::<Result<_>>()?;

    let mut full = vec![0.0; dim * dim];
    for i in 0..=n {
        for j in 0..=n {
            full[i * dim + j] = ry[i.abs_diff(j)];
        }
        for j in 0..i.min(n) {
            let v = cross[i - j - 1];
            full[i * dim + n + 1 + j] = v;
            full[(n + 1 + j) * dim + i] = v;
        }
    }
    for j in 0..n {
        full[(n + 1 + j) * dim + n + 1 + j] = step;
    }
    Ok(CovarianceBlocks { n, step, full })
}
