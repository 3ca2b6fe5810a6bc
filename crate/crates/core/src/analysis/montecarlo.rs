use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::constants::{theory_constants, TheoryConstants};
use super::oracle::{oracle_mse_euler_martingale, oracle_mse_trapezoid_martingale};
use super::stats::{default_fit_points, fit_rate, RateFit, Welford};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::{ReplicationKey, StreamRole};
use crate::sampler::{
    build_covariance, cholesky_factor, coarsen, sample_joint, CholeskyFactor, CirculantEmbedding,
    Grid, JointPath,
};
use crate::schemes::{euler_and_trapezoid, trapezoid};

/// Largest fine grid accepted in joint mode.
pub const MAX_JOINT_FINE_STEPS: usize = 4096;

/// Replications per work unit.
const CHUNK: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McMode {
    /// `rho = 0`: `Y` by circulant embedding, `dV` unused.
    FastRho0,
    /// Exact joint sampling of `(Y, dV, dW)` through a Cholesky factor.
    Joint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Strictly increasing step counts.
    pub n_list: Vec<usize>,
    /// The reference grid has `max(n_list) * fine_factor` steps.
    pub fine_factor: usize,
    pub replications: u64,
    pub seed: u64,
    pub mode: McMode,
    /// How many of the largest `n` enter the rate fit; defaults to the upper
    /// half (at least three).
    pub fit_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub replications: u64,
    pub mse_euler: f64,
    pub se_euler: Option<f64>,
    pub mse_trap: f64,
    pub se_trap: Option<f64>,
    pub oracle_euler: f64,
    pub oracle_trap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeFits {
    pub euler: Option<RateFit>,
    pub trapezoid: Option<RateFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub params: ModelParams,
    pub seed: u64,
    pub fine_factor: usize,
    pub n_fine: usize,
    pub n_list: Vec<usize>,
    pub replications: u64,
    pub mode: McMode,
    pub fit_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Fitted slopes of `log RMSE` against `log n`; absent with fewer than
    /// three grid sizes.
    pub fits: SchemeFits,
    pub theory: TheoryConstants,
    pub config: ReportConfig,
}

/// Relative band `((1 - r)^2, (1 + r)^2)` with `r = (n / n_fine)^H` for the
/// mean-square error measured against a fine-grid reference.
pub fn bias_band(hurst: f64, n: usize, n_fine: usize) -> (f64, f64) {
    let r = (n as f64 / n_fine as f64).powf(hurst);
    ((1.0 - r).powi(2), (1.0 + r).powi(2))
}

enum FineSampler {
    Fast(CirculantEmbedding),
    Joint(CholeskyFactor),
}

impl FineSampler {
    fn draw(&self, grid: &Grid, params: &ModelParams, key: ReplicationKey) -> Result<JointPath> {
        match self {
            FineSampler::Fast(emb) => {
                let n = grid.n();
                let y = emb.sample(params, key);
                let sd = grid.step().sqrt();
                let mut dw = key.stream(StreamRole::Dw).standard_normals(n);
                dw.iter_mut().for_each(|z| *z *= sd);
                JointPath::new(*grid, y, vec![0.0; n], dw, Some(key))
            }
            FineSampler::Joint(factor) => sample_joint(factor, grid, params, key),
        }
    }
}

fn validate(params: &ModelParams, config: &McConfig) -> Result<usize> {
    params.validate()?;
    if config.n_list.is_empty() || config.n_list[0] == 0 {
        return Err(Error::InvalidArgument("n_list must hold positive step counts".into()));
    }
    if config.n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("n_list must be strictly increasing".into()));
    }
    if config.fine_factor == 0 {
        return Err(Error::InvalidArgument("fine_factor must be positive".into()));
    }
    if config.replications == 0 {
        return Err(Error::InvalidArgument("replications must be positive".into()));
    }
    let n_fine = config
        .n_list
        .last()
        .and_then(|n| n.checked_mul(config.fine_factor))
        .ok_or_else(|| Error::InvalidArgument("fine grid size overflows".into()))?;
    if let Some(n) = config.n_list.iter().find(|&&n| n_fine % n != 0) {
        return Err(Error::IncompatibleGrids(format!(
            "n = {n} does not divide the fine grid size {n_fine}"
        )));
    }
    match config.mode {
        McMode::FastRho0 if params.rho != 0.0 => Err(Error::InvalidArgument(format!(
            "fast_rho0 mode needs rho = 0, got {}",
            params.rho
        ))),
        McMode::Joint if n_fine > MAX_JOINT_FINE_STEPS => Err(Error::TractabilityExceeded(format!(
            "joint mode allows at most {MAX_JOINT_FINE_STEPS} fine steps, requested {n_fine}"
        ))),
        _ => Ok(n_fine),
    }
}

/// Accumulators for one chunk: per `n`, Euler then trapezoid squared errors.
fn run_chunk(
    sampler: &FineSampler,
    grid: &Grid,
    params: &ModelParams,
    config: &McConfig,
    range: std::ops::Range<u64>,
) -> Result<Vec<(Welford, Welford)>> {
    let mut acc = vec![(Welford::new(), Welford::new()); config.n_list.len()];
    for rep in range {
        let fine = sampler.draw(grid, params, ReplicationKey::new(config.seed, rep))?;
        let reference = trapezoid(&fine, params).value;
        for (slot, &n) in acc.iter_mut().zip(&config.n_list) {
            let coarse = coarsen(&fine, grid.n() / n)?;
            let (e, t) = euler_and_trapezoid(&coarse, params);
            slot.0.push((e.value - reference).powi(2));
            slot.1.push((t.value - reference).powi(2));
        }
    }
    Ok(acc)
}

/// Estimates the strong error of both schemes against a fine-grid
/// trapezoidal reference on coupled paths.
pub fn mc_strong_error(params: &ModelParams, config: &McConfig) -> Result<ConvergenceReport> {
    let n_fine = validate(params, config)?;
    let grid = Grid::new(n_fine, params.t_final)?;
    let sampler = match config.mode {
        McMode::FastRho0 => FineSampler::Fast(CirculantEmbedding::new(params, &grid)?),
        McMode::Joint => FineSampler::Joint(cholesky_factor(&build_covariance(params, &grid)?)?),
    };

    let chunks: Vec<std::ops::Range<u64>> = (0..config.replications.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(config.replications))
        .collect();
    let partials: Vec<Vec<(Welford, Welford)>> = chunks
        .into_par_iter()
        .map(|range| run_chunk(&sampler, &grid, params, config, range))
        .collect::<Result<_>>()?;
    let mut totals = vec![(Welford::new(), Welford::new()); config.n_list.len()];
    for part in &partials {
        for (t, p) in totals.iter_mut().zip(part) {
            t.0.merge(&p.0);
            t.1.merge(&p.1);
        }
    }

    let oracles: Vec<(f64, f64)> = config
        .n_list
        .par_iter()
        .map(|&n| {
            Ok((
                oracle_mse_euler_martingale(params, n)?,
                oracle_mse_trapezoid_martingale(params, n)?,
            ))
        })
        .collect::<Result<_>>()?;

    let rows: Vec<ConvergenceRow> = config
        .n_list
        .iter()
        .zip(&totals)
        .zip(&oracles)
        .map(|((&n, (e, t)), &(oe, ot))| ConvergenceRow {
            n,
            replications: e.count,
            mse_euler: e.mean,
            se_euler: e.std_error(),
            mse_trap: t.mean,
            se_trap: t.std_error(),
            oracle_euler: oe,
            oracle_trap: ot,
        })
        .collect();

    let fit_points = config
        .fit_points
        .unwrap_or_else(|| default_fit_points(rows.len()))
        .min(rows.len());
    let tail = &rows[rows.len() - fit_points..];
    let fit = |mse: fn(&ConvergenceRow) -> f64| {
        let pts: Vec<(usize, f64)> = tail.iter().map(|r| (r.n, mse(r).sqrt())).collect();
        fit_rate(&pts).ok()
    };
    let fits = SchemeFits {
        euler: fit(|r| r.mse_euler),
        trapezoid: fit(|r| r.mse_trap),
    };

    Ok(ConvergenceReport {
        rows,
        fits,
        theory: theory_constants(params),
        config: ReportConfig {
            params: *params,
            seed: config.seed,
            fine_factor: config.fine_factor,
            n_fine,
            n_list: config.n_list.clone(),
            replications: config.replications,
            mode: config.mode,
            fit_points,
        },
    })
}
