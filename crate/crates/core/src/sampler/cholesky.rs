use super::CovarianceBlocks;
use crate::error::{Error, Result};

/// Relative diagonal jitter for the single retry after a failed factorization.
const JITTER_RELATIVE: f64 = 1e-12;

/// Lower-triangular `L` with `L L^T = C`, stored packed by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    dim: usize,
    packed: Vec<f64>,
    jitter: Option<f64>,
}

fn row_start(i: usize) -> usize {
    i * (i + 1) / 2
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 8];
    let mut ca = a.chunks_exact(8);
    let mut cb = b.chunks_exact(8);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += x * y;
    }
    (acc[0] + acc[4]) + (acc[1] + acc[5]) + (acc[2] + acc[6]) + (acc[3] + acc[7]) + tail
}

impl CholeskyFactor {
    /// Factors a dense symmetric row-major matrix. On failure the diagonal is
    /// shifted once by `1e-12 * max diagonal` and the factorization retried.
    pub fn factor(dim: usize, matrix: &[f64]) -> Result<Self> {
        assert_eq!(matrix.len(), dim * dim, "matrix is not {dim} x {dim}");
        match Self::try_factor(dim, matrix, 0.0) {
            Ok(packed) => Ok(Self {
                dim,
                packed,
                jitter: None,
            }),
            Err(_) => {
                let max_diag = (0..dim).map(|i| matrix[i * dim + i]).fold(0.0, f64::max);
                let jitter = JITTER_RELATIVE * max_diag;
                match Self::try_factor(dim, matrix, jitter) {
                    Ok(packed) => Ok(Self {
                        dim,
                        packed,
                        jitter: Some(jitter),
                    }),
                    Err((pivot, value)) => Err(Error::NotPositiveDefinite {
                        pivot,
                        value,
                        jitter,
                    }),
                }
            }
        }
    }

    fn try_factor(dim: usize, a: &[f64], jitter: f64) -> std::result::Result<Vec<f64>, (usize, f64)> {
        let mut l = vec![0.0; row_start(dim)];
        for i in 0..dim {
            let (done, rest) = l.split_at_mut(row_start(i));
            let row = &mut rest[..=i];
            for j in 0..i {
                let lj = &done[row_start(j)..row_start(j) + j + 1];
                let s = a[i * dim + j] - dot(&row[..j], &lj[..j]);
                row[j] = s / lj[j];
            }
            let d = a[i * dim + i] + jitter - dot(&row[..i], &row[..i]);
            if d.is_nan() || d <= 0.0 {
                return Err((i, d));
            }
            row[i] = d.sqrt();
        }
        Ok(l)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Diagonal shift used, if the plain factorization failed.
    pub fn jitter(&self) -> Option<f64> {
        self.jitter
    }

    /// Row `i` of `L`, entries `0..=i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.packed[row_start(i)..row_start(i) + i + 1]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.row(i)[j]
        }
    }

    /// `L x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim).map(|i| dot(self.row(i), &x[..=i])).collect()
    }

    /// `max |L L^T - C|` over all entries.
    pub fn max_reconstruction_error(&self, matrix: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..=i {
                let v = dot(self.row(i), self.row(j));
                worst = worst.max((v - matrix[i * self.dim + j]).abs());
                worst = worst.max((v - matrix[j * self.dim + i]).abs());
            }
        }
        worst
    }
}

/// Factors the joint covariance of `(Y^c, dV)`.
pub fn cholesky_factor(blocks: &CovarianceBlocks) -> Result<CholeskyFactor> {
    CholeskyFactor::factor(blocks.dim(), blocks.full_matrix())
}
