//! Euler and trapezoidal approximations of the log-price `X_T` from a
//! sampled path.
//!
//! Both schemes read `Y` with its mean already included. The `dV` sum is
//! left-endpoint in both; the trapezoidal scheme averages the endpoints in
//! the Riemann and `dW` sums.

use serde::{Deserialize, Serialize};

use crate::params::ModelParams;
use crate::sampler::JointPath;

/// Paths with at least this many steps are summed with compensation.
pub const COMPENSATED_SUM_MIN_STEPS: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Euler,
    Trapezoid,
}

/// A scheme value and its three summands.
///
/// `value` is computed as `(riemann_part + dv_part) + dw_part` from the
/// stored parts, so the assembly identity holds bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeResult {
    pub value: f64,
    pub riemann_part: f64,
    pub dv_part: f64,
    pub dw_part: f64,
    pub scheme: SchemeKind,
    pub grid_n: usize,
}

impl SchemeResult {
    fn assemble(scheme: SchemeKind, grid_n: usize, riemann: f64, dv: f64, dw: f64) -> Self {
        Self {
            value: riemann + dv + dw,
            riemann_part: riemann,
            dv_part: dv,
            dw_part: dw,
            scheme,
            grid_n,
        }
    }
}

/// Left-to-right summation, compensated (Neumaier) when requested.
#[derive(Debug, Clone, Copy)]
struct Accumulator {
    sum: f64,
    carry: f64,
    compensated: bool,
}

impl Accumulator {
    fn new(compensated: bool) -> Self {
        Self {
            sum: 0.0,
            carry: 0.0,
            compensated,
        }
    }

    #[inline]
    fn add(&mut self, x: f64) {
        if self.compensated {
            let t = self.sum + x;
            if self.sum.abs() >= x.abs() {
                self.carry += (self.sum - t) + x;
            } else {
                self.carry += (x - t) + self.sum;
            }
            self.sum = t;
        } else {
            self.sum += x;
        }
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

fn exponentials(y: &[f64]) -> Vec<f64> {
    y.iter().map(|v| v.exp()).collect()
}

fn euler_from_exp(path: &JointPath, e: &[f64], params: &ModelParams) -> SchemeResult {
    let n = path.grid.n();
    let comp = n >= COMPENSATED_SUM_MIN_STEPS;
    let (mut r, mut v, mut w) = (
        Accumulator::new(comp),
        Accumulator::new(comp),
        Accumulator::new(comp),
    );
    for ((&ek, &dv), &dw) in e[..n].iter().zip(&path.dv).zip(&path.dw) {
        r.add(ek * ek);
        v.add(ek * dv);
        w.add(ek * dw);
    }
    SchemeResult::assemble(
        SchemeKind::Euler,
        n,
        -0.5 * path.grid.step() * r.total(),
        params.rho * v.total(),
        params.rho_complement() * w.total(),
    )
}

fn trapezoid_from_exp(path: &JointPath, e: &[f64], params: &ModelParams) -> SchemeResult {
    let n = path.grid.n();
    let comp = n >= COMPENSATED_SUM_MIN_STEPS;
    let (mut r, mut v, mut w) = (
        Accumulator::new(comp),
        Accumulator::new(comp),
        Accumulator::new(comp),
    );
    for ((pair, &dv), &dw) in e.windows(2).zip(&path.dv).zip(&path.dw) {
        let (a, b) = (pair[0], pair[1]);
        r.add(a * a + b * b);
        v.add(a * dv);
        w.add((a + b) * dw);
    }
    SchemeResult::assemble(
        SchemeKind::Trapezoid,
        n,
        -0.25 * path.grid.step() * r.total(),
        params.rho * v.total(),
        0.5 * params.rho_complement() * w.total(),
    )
}

/// `X_n^E = -(1/2) sum e^{2Y_k} dt + rho sum e^{Y_k} dV_k + sqrt(1-rho^2) sum e^{Y_k} dW_k`.
///
/// The step is taken from the path's grid; only `rho` is read from `params`.
pub fn euler(path: &JointPath, params: &ModelParams) -> SchemeResult {
    euler_from_exp(path, &exponentials(&path.y), params)
}

/// `X_n^Tr = -(1/4) sum (e^{2Y_k} + e^{2Y_{k+1}}) dt + rho sum e^{Y_k} dV_k
///   + (1/2) sqrt(1-rho^2) sum (e^{Y_k} + e^{Y_{k+1}}) dW_k`.
pub fn trapezoid(path: &JointPath, params: &ModelParams) -> SchemeResult {
    trapezoid_from_exp(path, &exponentials(&path.y), params)
}

/// Evaluates both schemes, computing each `e^{Y_k}` once.
pub fn euler_and_trapezoid(path: &JointPath, params: &ModelParams) -> (SchemeResult, SchemeResult) {
    let e = exponentials(&path.y);
    (
        euler_from_exp(path, &e, params),
        trapezoid_from_exp(path, &e, params),
    )
}

pub fn evaluate(kind: SchemeKind, path: &JointPath, params: &ModelParams) -> SchemeResult {
    match kind {
        SchemeKind::Euler => euler(path, params),
        SchemeKind::Trapezoid => trapezoid(path, params),
    }
}

/// `S = s0 e^x`.
pub fn price_from_logprice(x: f64, params: &ModelParams) -> f64 {
    params.s0 * x.exp()
}
