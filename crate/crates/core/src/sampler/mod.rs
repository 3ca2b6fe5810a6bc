//! Exact simulation of the log-volatility and the driving Brownian motions on
//! a uniform grid.
//!
//! The joint law of `(Y_{t_0..t_n} - mu, dV_0..dV_{n-1})` is sampled through a
//! dense Cholesky factor of its explicitly computed covariance; `dW` is
//! independent and drawn separately. `Y` alone can also be sampled in
//! `O(n log n)` per path by circulant embedding.

mod circulant;
mod cholesky;
mod covariance;
mod grid;
mod path;

pub use circulant::{sample_fou_davis_harte, CirculantEmbedding};
pub use cholesky::{cholesky_factor, CholeskyFactor};
pub use covariance::{build_covariance, CovarianceBlocks};
pub use grid::Grid;
pub use path::{coarsen, sample_joint, sample_joint_from_normals, JointPath};
