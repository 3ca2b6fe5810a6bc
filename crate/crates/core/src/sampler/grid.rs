use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform partition `t_k = k T / n`, `k = 0..=n`, of `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    t_final: f64,
}

impl Grid {
    pub fn new(n: usize, t_final: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("grid needs at least one step".into()));
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid horizon must be > 0, got {t_final}")));
        }
        Ok(Self { n, t_final })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn step(&self) -> f64 {
        self.t_final / self.n as f64
    }

    /// `t_k`; exact at both ends.
    pub fn time(&self, k: usize) -> f64 {
        self.t_final * (k as f64 / self.n as f64)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.time(k)).collect()
    }

    /// True when `self` refines `coarse`: same horizon, `n` an integer multiple.
    pub fn is_refinement_of(&self, coarse: &Grid) -> bool {
        self.t_final == coarse.t_final && self.n.is_multiple_of(coarse.n)
    }

    pub fn coarsened(&self, factor: usize) -> Result<Grid> {
        if factor == 0 || !self.n.is_multiple_of(factor) {
            return Err(Error::IncompatibleGrids(format!(
                "cannot coarsen {} steps by a factor of {factor}",
                self.n
            )));
        }
        Grid::new(self.n / factor, self.t_final)
    }
}
