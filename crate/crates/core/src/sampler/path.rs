use super::{CholeskyFactor, Grid};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::{ReplicationKey, StreamRole};

/// One sampled path on a grid: `Y` at the grid points (mean included) and
/// the increments of `V` and `W` over each step.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPath {
    pub grid: Grid,
    pub y: Vec<f64>,
    pub dv: Vec<f64>,
    pub dw: Vec<f64>,
    /// The replication that produced the path; `None` for hand-built paths.
    pub seed_info: Option<ReplicationKey>,
}

impl JointPath {
    pub fn new(
        grid: Grid,
        y: Vec<f64>,
        dv: Vec<f64>,
        dw: Vec<f64>,
        seed_info: Option<ReplicationKey>,
    ) -> Result<Self> {
        let n = grid.n();
        if y.len() != n + 1 || dv.len() != n || dw.len() != n {
            return Err(Error::IncompatibleGrids(format!(
                "path lengths (y {}, dv {}, dw {}) do not fit a grid with {n} steps",
                y.len(),
                dv.len(),
                dw.len()
            )));
        }
        Ok(Self {
            grid,
            y,
            dv,
            dw,
            seed_info,
        })
    }
}

/// Builds a path from externally supplied standard normals: `xi` (length
/// `2n+1`) feeds the Cholesky factor, `eta` (length `n`) the `W` increments.
pub fn sample_joint_from_normals(
    factor: &CholeskyFactor,
    grid: &Grid,
    params: &ModelParams,
    xi: &[f64],
    eta: &[f64],
    seed_info: Option<ReplicationKey>,
) -> Result<JointPath> {
    let n = grid.n();
    if factor.dim() != 2 * n + 1 {
        return Err(Error::IncompatibleGrids(format!(
            "factor of dimension {} does not match a grid with {n} steps",
            factor.dim()
        )));
    }
    if xi.len() != 2 * n + 1 || eta.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected {} joint and {n} independent normals, got {} and {}",
            2 * n + 1,
            xi.len(),
            eta.len()
        )));
    }
    let joint = factor.apply(xi);
    let y = joint[..=n].iter().map(|v| v + params.mu).collect();
    let dv = joint[n + 1..].to_vec();
    let sd = grid.step().sqrt();
    let dw = eta.iter().map(|z| sd * z).collect();
    JointPath::new(*grid, y, dv, dw, seed_info)
}

/// Draws one exact sample of `(Y, dV, dW)` for replication `key`.
pub fn sample_joint(
    factor: &CholeskyFactor,
    grid: &Grid,
    params: &ModelParams,
    key: ReplicationKey,
) -> Result<JointPath> {
    let n = grid.n();
    let xi = key.stream(StreamRole::Joint).standard_normals(2 * n + 1);
    let eta = key.stream(StreamRole::Dw).standard_normals(n);
    sample_joint_from_normals(factor, grid, params, &xi, &eta, Some(key))
}

/// Restricts a path to the grid with `n / factor_m` steps: `Y` is subsampled
/// and increments are summed in consecutive blocks.
pub fn coarsen(path: &JointPath, factor_m: usize) -> Result<JointPath> {
    let grid = path.grid.coarsened(factor_m)?;
    let y = path.y.iter().step_by(factor_m).copied().collect();
    let block_sums =
        |v: &[f64]| -> Vec<f64> { v.chunks_exact(factor_m).map(|c| c.iter().sum()).collect() };
    JointPath::new(
        grid,
        y,
        block_sums(&path.dv),
        block_sums(&path.dw),
        path.seed_info,
    )
}
