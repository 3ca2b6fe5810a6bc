//! Covariance functions of the stationary fOU log-volatility and of its
//! exponentials, together with their small-lag constants and the
//! cross-covariance between `Y` and increments of the Brownian motion `V`.
//!
//! All functions are pure and thread-safe.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::quadrature::{integrate, integrate_pieces, Tolerance};
use crate::special::gamma;

/// Lag (in units of `lambda * tau`) above which the covariance is evaluated
/// through the exponentially split form instead of the `cosh` form.
const COSH_FORM_MAX_SCALED_LAG: f64 = 1.0;

/// Exponential decay cut-off (`lambda * x`) for semi-infinite integrals.
const EXP_TAIL_CUTOFF: f64 = 45.0;

/// A covariance value at a given lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub lag: f64,
    pub value: f64,
}

/// Small-lag constants of the exponential process `Z^(a) = exp(a (Y - mu))`:
/// `R_Z(tau) = c0 - c1 tau^(2H) + o(tau^(2H))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    pub a: f64,
    pub c0: f64,
    pub c1: f64,
    pub variance_y: f64,
}

/// Stationary variance `theta^2 Gamma(2H+1) / (2 lambda^(2H))`.
pub fn variance_y(params: &ModelParams) -> f64 {
    params.theta * params.theta * unit_variance(params)
}

fn unit_variance(p: &ModelParams) -> f64 {
    gamma(2.0 * p.hurst + 1.0) / (2.0 * p.lambda.powf(2.0 * p.hurst))
}

fn check_lag(tau: f64) -> Result<()> {
    if tau >= 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("lag must be finite and >= 0, got {tau}")))
    }
}

/// `H * int_0^tau cosh(lambda (tau - u)) u^(2H-1) du`, with `v = u^(2H)`
/// removing the endpoint singularity.
fn cosh_integral(p: &ModelParams, tau: f64) -> Result<f64> {
    let inv = 1.0 / (2.0 * p.hurst);
    let upper = tau.powf(2.0 * p.hurst);
    let f = |v: f64| (p.lambda * (tau - v.powf(inv))).cosh();
    Ok(0.5 * integrate(&f, 0.0, upper, Tolerance::DEFAULT)?)
}

/// Covariance divided by `theta^2`, in the split form
/// `(H/2) e^{lt} int_t^inf e^{-lu} u^{2H-1} du + (1/2) e^{-lt} (K - H int_0^t e^{lu} u^{2H-1} du)`.
fn split_form_unit(p: &ModelParams, tau: f64) -> Result<f64> {
    let h = p.hurst;
    let lam = p.lambda;
    let tol = Tolerance::DEFAULT;

    // int_0^inf e^{-lam x} (x + tau)^{2H-1} dx
    let f1 = |x: f64| (-lam * x).exp() * (x + tau).powf(2.0 * h - 1.0);
    let scale = 1.0 / lam;
    let mut pts = vec![0.0];
    let mut x = scale;
    while x < EXP_TAIL_CUTOFF * scale {
        pts.push(x);
        x *= 2.0;
    }
    pts.push(EXP_TAIL_CUTOFF * scale);
    let upper_tail = integrate_pieces(&f1, &pts, tol)?;

    // H int_0^tau e^{-lam (tau - u)} u^{2H-1} du, singular part substituted
    let split = (0.5 * tau).max(tau - EXP_TAIL_CUTOFF * scale);
    let inv = 1.0 / (2.0 * h);
    let near_zero = |v: f64| (-lam * (tau - v.powf(inv))).exp();
    let lower = 0.5 * integrate(&near_zero, 0.0, split.powf(2.0 * h), tol)?;
    let near_tau = |u: f64| h * (-lam * (tau - u)).exp() * u.powf(2.0 * h - 1.0);
    let upper = integrate(&near_tau, split, tau, tol)?;

    Ok(0.5 * h * upper_tail + 0.5 * (-lam * tau).exp() * unit_variance(p) - 0.5 * (lower + upper))
}

/// Autocovariance `R_Y(tau)` of the stationary fOU process.
pub fn r_y(params: &ModelParams, tau: f64) -> Result<f64> {
    check_lag(tau)?;
    let th2 = params.theta * params.theta;
    if tau == 0.0 {
        return Ok(variance_y(params));
    }
    if params.lambda * tau <= COSH_FORM_MAX_SCALED_LAG {
        let k = unit_variance(params);
        Ok(th2 * (k * (params.lambda * tau).cosh() - cosh_integral(params, tau)?))
    } else {
        Ok(th2 * split_form_unit(params, tau)?)
    }
}

/// `R_Y(0) - R_Y(tau)`, evaluated without cancellation at small lags.
pub fn r_y_decrement(params: &ModelParams, tau: f64) -> Result<f64> {
    check_lag(tau)?;
    if tau == 0.0 {
        return Ok(0.0);
    }
    let th2 = params.theta * params.theta;
    let k = unit_variance(params);
    if params.lambda * tau <= COSH_FORM_MAX_SCALED_LAG {
        let s = (0.5 * params.lambda * tau).sinh();
        Ok(th2 * (cosh_integral(params, tau)? - 2.0 * k * s * s))
    } else {
        Ok(th2 * (k - split_form_unit(params, tau)?))
    }
}

/// `(R_Y(0) - R_Y(tau)) / tau^(2H)`, which tends to `theta^2 / 2` as `tau -> 0`.
pub fn r_y_small_lag_check(params: &ModelParams, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidArgument(format!("small-lag check needs 0 < tau <= 1, got {tau}")));
    }
    Ok(r_y_decrement(params, tau)? / tau.powf(2.0 * params.hurst))
}

fn check_a(a: f64) -> Result<()> {
    if a != 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("exponent a must be finite and nonzero, got {a}")))
    }
}

/// Autocovariance of `Z^(a) = exp(a (Y - mu))`:
/// `exp(a^2 R_Y(0)) (exp(a^2 R_Y(tau)) - 1)`.
pub fn r_z(params: &ModelParams, a: f64, tau: f64) -> Result<f64> {
    check_a(a)?;
    let a2 = a * a;
    Ok((a2 * variance_y(params)).exp() * (a2 * r_y(params, tau)?).exp_m1())
}

/// `c0 - R_Z(tau)` for `Z^(a)`, evaluated without cancellation.
pub fn r_z_decrement(params: &ModelParams, a: f64, tau: f64) -> Result<f64> {
    check_a(a)?;
    let a2 = a * a;
    let v = variance_y(params);
    let dec = r_y_decrement(params, tau)?;
    Ok((a2 * (2.0 * v - dec)).exp() * (a2 * dec).exp_m1())
}

pub fn asymptotic_constants(params: &ModelParams, a: f64) -> Result<AsymptoticConstants> {
    check_a(a)?;
    let v = variance_y(params);
    let a2 = a * a;
    let e = (a2 * v).exp();
    Ok(AsymptoticConstants {
        a,
        c0: e * (a2 * v).exp_m1(),
        c1: 0.5 * a2 * params.theta * params.theta * (2.0 * a2 * v).exp(),
        variance_y: v,
    })
}

/// Evaluates `R_Y` at each lag (in parallel for long tables).
pub fn r_y_table(params: &ModelParams, lags: &[f64]) -> Result<Vec<KernelValue>> {
    lags.par_iter()
        .with_min_len(64)
        .map(|&lag| r_y(params, lag).map(|value| KernelValue { lag, value }))
        .collect()
}

/// Normalising constant `G(H)` of the Mandelbrot-van Ness representation,
/// `G(H)^2 = 2H Gamma(3/2 - H) / (Gamma(H + 1/2) Gamma(2 - 2H))`.
pub fn mvn_scale(hurst: f64) -> f64 {
    (2.0 * hurst * gamma(1.5 - hurst) / (gamma(hurst + 0.5) * gamma(2.0 - 2.0 * hurst))).sqrt()
}

/// Cross-covariance `E[B_t V_s]` induced by the Mandelbrot-van Ness
/// representation; zero for `t <= 0` and constant in `s` for `s >= t`.
pub fn gamma_mvn(hurst: f64, t: f64, s: f64) -> f64 {
    if t <= 0.0 || s < 0.0 {
        return 0.0;
    }
    let e = hurst + 0.5;
    mvn_scale(hurst) / e * (t.powf(e) - (t - t.min(s)).powf(e))
}

/// `gamma(u, s2) - gamma(u, s1)` for `u >= 0`, written as a difference of
/// shifted powers so no large terms cancel.
fn gamma_mvn_increment(scale: f64, e: f64, u: f64, s1: f64, s2: f64) -> f64 {
    let pos = |x: f64| if x > 0.0 { x.powf(e) } else { 0.0 };
    scale / e * (pos(u - s1) - pos(u - s2))
}

/// `E[(Y_t - mu) (V_{s2} - V_{s1})]` for the Mandelbrot-van Ness coupling.
///
/// Exactly zero when `t <= s1`: the increment lies in the future of `Y_t`.
pub fn cross_cov_yc_dv(params: &ModelParams, t: f64, s1: f64, s2: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite() && s1 >= 0.0 && s2 > s1 && s2.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "cross covariance needs t >= 0 and 0 <= s1 < s2, got t={t}, s1={s1}, s2={s2}"
        )));
    }
    if t <= s1 {
        return Ok(0.0);
    }
    let h = params.hurst;
    let lam = params.lambda;
    let e = h + 0.5;
    let scale = mvn_scale(h);
    let d = |u: f64| gamma_mvn_increment(scale, e, u, s1, s2);

    // The increment vanishes on [0, s1]; it has power-type kinks at s1 and s2,
    // so each remaining piece starts at a kink and is mapped by u = lo + len w^2.
    let mut total = 0.0;
    let mid = t.min(s2);
    for (lo, hi) in [(s1, mid), (mid, t)] {
        if hi <= lo {
            continue;
        }
        let len = hi - lo;
        let f = |w: f64| {
            let u = lo + len * w * w;
            2.0 * len * w * (-lam * (t - u)).exp() * d(u)
        };
        total += integrate(&f, 0.0, 1.0, Tolerance::DEFAULT)?;
    }
    Ok(params.theta * (d(t) - lam * total))
}
