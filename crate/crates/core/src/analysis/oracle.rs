use crate::error::Result;
use crate::kernels::{r_z, r_z_decrement};
use crate::params::ModelParams;
use crate::quadrature::{integrate, Tolerance};

const ORACLE_TOLERANCE: f64 = 1e-12;

/// A stationary covariance `r(tau)` seen through its decrement
/// `r(0) - r(tau)`, which is what the oracles integrate.
pub trait StationaryKernel: Sync {
    fn covariance(&self, lag: f64) -> Result<f64>;

    fn decrement(&self, lag: f64) -> Result<f64> {
        Ok(self.covariance(0.0)? - self.covariance(lag)?)
    }

    /// Exponent `p` with `r(0) - r(tau) ~ tau^p` near zero, used to flatten
    /// the integrand at the origin. Any positive value is correct.
    fn small_lag_exponent(&self) -> f64 {
        1.0
    }
}

/// The covariance of `exp(Y_t - mu)`.
#[derive(Debug, Clone, Copy)]
pub struct VolatilityKernel<'a> {
    pub params: &'a ModelParams,
}

impl StationaryKernel for VolatilityKernel<'_> {
    fn covariance(&self, lag: f64) -> Result<f64> {
        r_z(self.params, 1.0, lag)
    }

    fn decrement(&self, lag: f64) -> Result<f64> {
        r_z_decrement(self.params, 1.0, lag)
    }

    fn small_lag_exponent(&self) -> f64 {
        2.0 * self.params.hurst
    }
}

/// `int_0^dt (r(0) - r(u)) du` with `u = dt * s^(1/p)`.
fn integrated_decrement<K: StationaryKernel>(kernel: &K, dt: f64) -> Result<f64> {
    let q = 1.0 / kernel.small_lag_exponent();
    let error = std::cell::Cell::new(None);
    let f = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        match kernel.decrement(dt * s.powf(q)) {
            Ok(d) => d * dt * q * s.powf(q - 1.0),
            Err(e) => {
                error.set(Some(e));
                f64::NAN
            }
        }
    };
    let value = integrate(&f, 0.0, 1.0, Tolerance::relative(ORACLE_TOLERANCE));
    match error.take() {
        Some(e) => Err(e),
        None => value,
    }
}

fn check_steps(n: usize) -> Result<()> {
    if n == 0 {
        return Err(crate::Error::InvalidArgument("oracle needs n >= 1".into()));
    }
    Ok(())
}

pub fn oracle_mse_euler_martingale_with_kernel<K: StationaryKernel>(
    kernel: &K,
    params: &ModelParams,
    n: usize,
) -> Result<f64> {
    check_steps(n)?;
    let dt = params.t_final / n as f64;
    let d = integrated_decrement(kernel, dt)?;
    Ok(n as f64 * 2.0 * (2.0 * params.mu).exp() * d)
}

/// Exact mean-square error of the `dV` and `dW` sums of the Euler scheme:
/// `n * 2 e^{2 mu} int_0^dt (c0 - r_z(u)) du`.
pub fn oracle_mse_euler_martingale(params: &ModelParams, n: usize) -> Result<f64> {
    oracle_mse_euler_martingale_with_kernel(&VolatilityKernel { params }, params, n)
}

/// The trapezoidal `dW` sum contributes, per step,
/// `int_0^dt [d(t) + d(dt - t) - d(dt)/2] dt = 2 int_0^dt d - dt d(dt) / 2`
/// with `d = r(0) - r`; the `dV` sum keeps the Euler per-step error.
pub fn oracle_mse_trapezoid_martingale_with_kernel<K: StationaryKernel>(
    kernel: &K,
    params: &ModelParams,
    n: usize,
) -> Result<f64> {
    check_steps(n)?;
    let dt = params.t_final / n as f64;
    let d = integrated_decrement(kernel, dt)?;
    let end = kernel.decrement(dt)?;
    let rho2 = params.rho * params.rho;
    let per_step = 2.0 * d - (1.0 - rho2) * dt * end / 2.0;
    Ok(n as f64 * (2.0 * params.mu).exp() * per_step)
}

/// Exact mean-square error of the `dV` and `dW` sums of the trapezoidal
/// scheme.
pub fn oracle_mse_trapezoid_martingale(params: &ModelParams, n: usize) -> Result<f64> {
    oracle_mse_trapezoid_martingale_with_kernel(&VolatilityKernel { params }, params, n)
}
