//! Simulation and strong-error analysis for a rough volatility model whose
//! log-volatility is a stationary fractional Ornstein-Uhlenbeck process with
//! Hurst index `H < 1/2`.
//!
//! - [`kernels`]: covariance functions and small-lag constants.
//! - [`sampler`]: exact joint sampling of `(Y, dV, dW)` on a uniform grid and a
//!   circulant-embedding sampler for `Y` alone.
//! - [`schemes`]: the Euler and trapezoidal approximations of the log-price.
//! - [`analysis`]: asymptotic error constants, deterministic mean-square-error
//!   oracles and Monte Carlo convergence studies.

pub mod analysis;
pub mod error;
pub mod kernels;
pub mod params;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod schemes;
pub mod special;

pub use error::{Error, Result};
pub use params::ModelParams;
