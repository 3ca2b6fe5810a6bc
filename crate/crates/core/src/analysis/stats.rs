use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Streaming mean and variance with an associative merge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Welford {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Welford) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
    }

    /// Unbiased sample variance; `None` below two observations.
    pub fn variance(&self) -> Option<f64> {
        (self.count >= 2).then(|| self.m2 / (self.count - 1) as f64)
    }

    /// Standard error of the mean; `None` below two observations.
    pub fn std_error(&self) -> Option<f64> {
        self.variance().map(|v| (v / self.count as f64).sqrt())
    }
}

/// Least-squares line through `(log n, log rmse)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub rate: f64,
    pub log_constant: f64,
    pub points: usize,
}

/// Fits `log rmse = log_constant + rate * log n` by ordinary least squares.
pub fn fit_rate(points: &[(usize, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "rate fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let mut ns: Vec<usize> = points.iter().map(|p| p.0).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() != points.len() {
        return Err(Error::InsufficientData("rate fit needs distinct n".into()));
    }
    if let Some(&(n, r)) = points.iter().find(|(n, r)| *n == 0 || !(*r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "rate fit needs n > 0 and a positive finite RMSE, got ({n}, {r})"
        )));
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let rate = sxy / sxx;
    Ok(RateFit {
        rate,
        log_constant: ybar - rate * xbar,
        points: points.len(),
    })
}

/// Number of largest-`n` points used by default: the upper half, at least 3.
pub fn default_fit_points(len: usize) -> usize {
    len.div_ceil(2).max(3).min(len)
}
