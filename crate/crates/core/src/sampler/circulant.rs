use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::Grid;
use crate::error::{Error, Result};
use crate::kernels::r_y_table;
use crate::params::ModelParams;
use crate::rng::{ReplicationKey, StreamRole};

/// Eigenvalues above `-CLAMP_RELATIVE * max eigenvalue` are treated as
/// roundoff and clamped to zero; anything lower is a genuine failure.
const CLAMP_RELATIVE: f64 = 1e-10;

/// Circulant embedding of the stationary covariance of `Y` on a grid.
///
/// The first row is `r(0), r(h), ..., r((m/2) h), r((m/2 - 1) h), ..., r(h)`
/// with `m = 2^(ceil(log2(n+1)) + 1)`, and its eigenvalues are its discrete
/// Fourier transform.
#[derive(Clone)]
pub struct CirculantEmbedding {
    n: usize,
    m: usize,
    first_row: Vec<f64>,
    eigenvalues: Vec<f64>,
    amplitudes: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for CirculantEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CirculantEmbedding")
            .field("n", &self.n)
            .field("m", &self.m)
            .finish_non_exhaustive()
    }
}

impl CirculantEmbedding {
    pub fn new(params: &ModelParams, grid: &Grid) -> Result<Self> {
        let n = grid.n();
        let m = 2 * (n + 1).next_power_of_two();
        let half = m / 2;
        let lags: Vec<f64> = (0..=half).map(|k| grid.step() * k as f64).collect();
        let r: Vec<f64> = r_y_table(params, &lags)?.into_iter().map(|kv| kv.value).collect();
        let first_row: Vec<f64> = (0..m).map(|j| r[j.min(m - j)]).collect();

        let fft = FftPlanner::new().plan_fft_forward(m);
        let mut freq: Vec<Complex<f64>> = first_row.iter().map(|&c| Complex::new(c, 0.0)).collect();
        fft.process(&mut freq);
        let mut eigenvalues: Vec<f64> = freq.iter().map(|z| z.re).collect();

        let max = eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let tolerance = CLAMP_RELATIVE * max.max(0.0);
        for (index, ev) in eigenvalues.iter_mut().enumerate() {
            if *ev < -tolerance {
                return Err(Error::EmbeddingNotPsd {
                    index,
                    value: *ev,
                    tolerance,
                });
            }
            if *ev < 0.0 {
                *ev = 0.0;
            }
        }

        let mf = m as f64;
        let amplitudes = eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &ev)| {
                if k == 0 || k == half {
                    (ev / mf).sqrt()
                } else {
                    (ev / (2.0 * mf)).sqrt()
                }
            })
            .collect();

        Ok(Self {
            n,
            m,
            first_row,
            eigenvalues,
            amplitudes,
            fft,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Embedding size `m`.
    pub fn size(&self) -> usize {
        self.m
    }

    pub fn first_row(&self) -> &[f64] {
        &self.first_row
    }

    /// Eigenvalues after clamping; all nonnegative.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Synthesises `Y_{t_0..t_n}` from `m` standard normals.
    ///
    /// `z[0]` and `z[m/2]` drive the two real frequencies; for `0 < k < m/2`,
    /// `z[k]` and `z[m-k]` are the real and imaginary parts of frequency `k`,
    /// whose conjugate sits at `m - k`, so the transform is real.
    pub fn sample_from_normals(&self, mu: f64, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.m, "need one normal per embedding frequency");
        let m = self.m;
        let half = m / 2;
        let a = &self.amplitudes;
        let mut freq = vec![Complex::new(0.0, 0.0); m];
        freq[0] = Complex::new(a[0] * z[0], 0.0);
        freq[half] = Complex::new(a[half] * z[half], 0.0);
        for k in 1..half {
            let w = Complex::new(a[k] * z[k], a[k] * z[m - k]);
            freq[k] = w;
            freq[m - k] = w.conj();
        }
        self.fft.process(&mut freq);
        freq[..=self.n].iter().map(|w| w.re + mu).collect()
    }

    pub fn sample(&self, params: &ModelParams, key: ReplicationKey) -> Vec<f64> {
        let z = key.stream(StreamRole::DavisHarte).standard_normals(self.m);
        self.sample_from_normals(params.mu, &z)
    }
}

/// Samples `Y_{t_0..t_n}` (mean included) by circulant embedding.
///
/// Builds the embedding on every call; reuse a [`CirculantEmbedding`] when
/// drawing many paths.
pub fn sample_fou_davis_harte(
    params: &ModelParams,
    grid: &Grid,
    key: ReplicationKey,
) -> Result<Vec<f64>> {
    Ok(CirculantEmbedding::new(params, grid)?.sample(params, key))
}
