//! Model parameters of the rough volatility model.
//!
//! The log-price is driven by `exp(Y)` where `Y` is a stationary fractional
//! Ornstein-Uhlenbeck process with Hurst index below one half.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The parameter tuple `(H, lambda, theta, mu, rho, s0, T)`.
///
/// Construction always validates, including deserialization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    /// Hurst index of the driving fBm, in `(0, 1/2)`.
    pub hurst: f64,
    /// Mean-reversion rate of the log-volatility.
    pub lambda: f64,
    /// Vol-of-vol, the diffusion coefficient of the Langevin equation.
    pub theta: f64,
    /// Long-run mean of the log-volatility.
    pub mu: f64,
    /// Leverage correlation between the volatility noise and the price.
    pub rho: f64,
    /// Initial asset price.
    pub s0: f64,
    /// Horizon `T`.
    pub t_final: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    hurst: f64,
    lambda: f64,
    theta: f64,
    mu: f64,
    rho: f64,
    s0: f64,
    t_final: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        ModelParams::new(r.hurst, r.lambda, r.theta, r.mu, r.rho, r.s0, r.t_final)
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            hurst: 0.25,
            lambda: 1.0,
            theta: 1.0,
            mu: 0.0,
            rho: 0.0,
            s0: 1.0,
            t_final: 1.0,
        }
    }
}

impl ModelParams {
    pub fn new(
        hurst: f64,
        lambda: f64,
        theta: f64,
        mu: f64,
        rho: f64,
        s0: f64,
        t_final: f64,
    ) -> Result<Self> {
        let p = Self {
            hurst,
            lambda,
            theta,
            mu,
            rho,
            s0,
            t_final,
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks every range constraint; the first violation wins.
    pub fn validate(&self) -> Result<()> {
        fn check(name: &'static str, value: f64, ok: bool, bound: &'static str) -> Result<()> {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, value, bound })
            }
        }
        check(
            "hurst",
            self.hurst,
            self.hurst > 0.0 && self.hurst < 0.5,
            "must lie in (0, 0.5)",
        )?;
        check("lambda", self.lambda, self.lambda > 0.0, "must be > 0")?;
        check("theta", self.theta, self.theta > 0.0, "must be > 0")?;
        check("mu", self.mu, true, "must be finite")?;
        check(
            "rho",
            self.rho,
            self.rho > -1.0 && self.rho < 1.0,
            "must lie in (-1, 1)",
        )?;
        check("s0", self.s0, self.s0 > 0.0, "must be > 0")?;
        check("t_final", self.t_final, self.t_final > 0.0, "must be > 0")?;
        Ok(())
    }

    pub fn with_hurst(self, hurst: f64) -> Result<Self> {
        Self { hurst, ..self }.validated()
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self { lambda, ..self }.validated()
    }

    pub fn with_theta(self, theta: f64) -> Result<Self> {
        Self { theta, ..self }.validated()
    }

    pub fn with_mu(self, mu: f64) -> Result<Self> {
        Self { mu, ..self }.validated()
    }

    pub fn with_rho(self, rho: f64) -> Result<Self> {
        Self { rho, ..self }.validated()
    }

    pub fn with_t_final(self, t_final: f64) -> Result<Self> {
        Self { t_final, ..self }.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate().map(|_| self)
    }

    /// `sqrt(1 - rho^2)`, the weight of the independent noise.
    pub fn rho_complement(&self) -> f64 {
        (1.0 - self.rho * self.rho).sqrt()
    }
}
