//! Adaptive composite Gauss-Legendre quadrature.
//!
//! Each panel is integrated with a 16-point rule and compared against the sum
//! over its two halves; panels whose estimates disagree are bisected until the
//! local share of the tolerance is met. Integrands with endpoint singularities
//! must be transformed by the caller so that they are continuous.

use std::sync::LazyLock;

use crate::error::{Error, Result};

const ORDER: usize = 16;
const MAX_PANELS: usize = 1 << 16;
const MAX_DEPTH: u32 = 60;

/// Nodes and weights on `[-1, 1]`, computed once by Newton iteration on P_16.
static RULE: LazyLock<([f64; ORDER], [f64; ORDER])> = LazyLock::new(legendre_rule);

fn legendre_rule() -> ([f64; ORDER], [f64; ORDER]) {
    let mut nodes = [0.0; ORDER];
    let mut weights = [0.0; ORDER];
    let n = ORDER as f64;
    for i in 0..ORDER / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=ORDER {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[ORDER - 1 - i] = x;
        weights[i] = w;
        weights[ORDER - 1 - i] = w;
    }
    (nodes, weights)
}

/// Fixed 16-point Gauss-Legendre estimate on `[a, b]`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = &*RULE;
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Stopping criterion: stop once the refinement changes the estimate by less
/// than `max(abs, rel * |integral|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance {
        rel: 1e-12,
        abs: 1e-300,
    };

    pub fn relative(rel: f64) -> Self {
        Self { rel, abs: 1e-300 }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Integrates `f` over `[a, b]` by adaptive bisection.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mid = 0.5 * (a + b);
    let left = gauss_legendre(f, a, mid);
    let right = gauss_legendre(f, mid, b);
    let whole = left + right;
    let target = tol.abs.max(tol.rel * whole.abs());
    let width = b - a;

    let mut stack = vec![(a, mid, left, 1u32), (mid, b, right, 1u32)];
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut panels = 2usize;
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let m = 0.5 * (lo + hi);
        let l = gauss_legendre(f, lo, m);
        let r = gauss_legendre(f, m, hi);
        let refined = l + r;
        let err = (refined - est).abs();
        let share = target * ((hi - lo) / width).abs();
        if err <= share {
            // Neumaier summation of accepted panels
            let t = sum + refined;
            if sum.abs() >= refined.abs() {
                comp += (sum - t) + refined;
            } else {
                comp += (refined - t) + sum;
            }
            sum = t;
            continue;
        }
        panels += 2;
        if panels > MAX_PANELS || depth >= MAX_DEPTH || !refined.is_finite() {
            return Err(Error::QuadratureNotConverged {
                lower: a,
                upper: b,
                panels,
                estimate: err,
            });
        }
        stack.push((lo, m, l, depth + 1));
        stack.push((m, hi, r, depth + 1));
    }
    Ok(sum + comp)
}

/// Integrates over consecutive pieces `[p0, p1], [p1, p2], ...`, skipping
/// empty ones. Each piece gets the full tolerance.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: &F, points: &[f64], tol: Tolerance) -> Result<f64> {
    let mut total = 0.0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            total += integrate(f, w[0], w[1], tol)?;
        }
    }
    Ok(total)
}
