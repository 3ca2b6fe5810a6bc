//! Asymptotic error constants, exact mean-square-error oracles for the
//! martingale part of each scheme, and Monte Carlo convergence studies.

mod constants;
mod montecarlo;
mod oracle;
mod stats;

pub use constants::{theory_constants, TheoryConstants};
pub use montecarlo::{
    bias_band, mc_strong_error, ConvergenceReport, ConvergenceRow, McConfig, McMode, ReportConfig,
    SchemeFits, MAX_JOINT_FINE_STEPS,
};
pub use oracle::{
    oracle_mse_euler_martingale, oracle_mse_euler_martingale_with_kernel,
    oracle_mse_trapezoid_martingale, oracle_mse_trapezoid_martingale_with_kernel,
    StationaryKernel, VolatilityKernel,
};
pub use stats::{default_fit_points, fit_rate, RateFit, Welford};
