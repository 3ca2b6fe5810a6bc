//! Independent reference computations shared by the integration tests and
//! the acceptance runner. Nothing here calls the library's quadrature or
//! gamma function.

#![allow(dead_code)]

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::gamma;

/// Tanh-sinh quadrature on `[a, b]`, refining the step until two levels
/// agree to `rel` relative accuracy. Tolerates integrable endpoint
/// singularities; nodes are placed by their distance to the nearer endpoint
/// so no cancellation occurs there.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let half = 0.5 * (b - a);
    let t_max = 4.0;
    let level_sum = |h: f64, odd_only: bool| -> f64 {
        let mut s = 0.0;
        let kmax = (t_max / h).ceil() as i64;
        for k in -kmax..=kmax {
            if odd_only && k % 2 == 0 {
                continue;
            }
            let t = k as f64 * h;
            let u = 0.5 * PI * t.sinh();
            let w = 0.5 * PI * t.cosh() / u.cosh().powi(2);
            // distance from the nearer endpoint, in units of `half`
            let d = 2.0 / ((2.0 * u.abs()).exp() + 1.0);
            let x = if t >= 0.0 { b - half * d } else { a + half * d };
            if d == 0.0 || w == 0.0 || x <= a.min(b) || x >= a.max(b) {
                continue;
            }
            let fx = f(x);
            if fx.is_finite() {
                s += w * fx;
            }
        }
        s
    };
    let mut h = 0.5;
    let mut sum = level_sum(h, false);
    let mut est = half * h * sum;
    for _ in 0..12 {
        h *= 0.5;
        sum += level_sum(h, true);
        let next = half * h * sum;
        if (next - est).abs() <= rel * next.abs() {
            return next;
        }
        est = next;
    }
    est
}

/// Wynn's epsilon algorithm: the accelerated limit of a sequence of partial
/// sums, taken from the deepest even column.
pub fn wynn_epsilon(s: &[f64]) -> f64 {
    let n = s.len();
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = s.to_vec();
    let mut best = *s.last().unwrap();
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff == 0.0 {
                return cur[i + 1];
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        col += 1;
        prev = cur;
        cur = next;
        if col % 2 == 0 {
            best = *cur.last().unwrap();
        }
    }
    best
}

/// `R_Y(tau)` from the spectral representation
/// `theta^2 Gamma(2H+1) sin(pi H) / pi * int_0^inf cos(tau x) x^{1-2H} / (lambda^2 + x^2) dx`,
/// integrated between successive zeros of the cosine and summed with Wynn
/// acceleration. `tau` must be positive.
pub fn fourier_r_y(hurst: f64, lambda: f64, theta: f64, tau: f64) -> f64 {
    assert!(tau > 0.0);
    let p = 1.0 - 2.0 * hurst;
    // in y = tau x the integrand is cos(y) y^p tau^{2H} / ((lambda tau)^2 + y^2)
    let lt2 = (lambda * tau).powi(2);
    let g = |y: f64| y.cos() * y.powf(p) / (lt2 + y * y);
    let mut first = 0.0;
    // the first quarter period, split where the denominator changes scale
    let mut pts = vec![0.0];
    let mut c = lambda * tau;
    while c < 0.5 * PI {
        pts.push(c);
        c *= 4.0;
    }
    pts.push(0.5 * PI);
    for w in pts.windows(2) {
        first += tanh_sinh(g, w[0], w[1], 1e-14);
    }
    let terms = 60;
    let mut partial = Vec::with_capacity(terms);
    let mut acc = first;
    for k in 0..terms {
        let lo = 0.5 * PI + k as f64 * PI;
        acc += tanh_sinh(g, lo, lo + PI, 1e-14);
        partial.push(acc);
    }
    let a = wynn_epsilon(&partial);
    let b = wynn_epsilon(&partial[..terms - 10]);
    assert!(
        (a - b).abs() <= 1e-11 * a.abs().max(1e-3),
        "Fourier oracle did not settle at tau = {tau}: {a} vs {b}"
    );
    let pref = theta * theta * gamma(2.0 * hurst + 1.0) * (PI * hurst).sin() / PI;
    pref * tau.powf(2.0 * hurst) * a
}

/// `theta^2 Gamma(2H+1) / (2 lambda^{2H})` with an independent gamma.
pub fn variance_oracle(hurst: f64, lambda: f64, theta: f64) -> f64 {
    theta * theta * gamma(2.0 * hurst + 1.0) / (2.0 * lambda.powf(2.0 * hurst))
}

/// Empirical second moments `E[x_i x_j]` of zero-mean samples with their
/// standard errors.
pub struct MomentEstimate {
    pub dim: usize,
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
}

impl MomentEstimate {
    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        (self.mean[i * self.dim + j], self.std_error[i * self.dim + j])
    }
}

pub struct MomentAccumulator {
    dim: usize,
    count: u64,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl MomentAccumulator {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            count: 0,
            sum: vec![0.0; dim * dim],
            sum_sq: vec![0.0; dim * dim],
        }
    }

    pub fn push(&mut self, x: &[f64]) {
        assert_eq!(x.len(), self.dim);
        self.count += 1;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let p = x[i] * x[j];
                self.sum[i * self.dim + j] += p;
                self.sum_sq[i * self.dim + j] += p * p;
            }
        }
    }

    pub fn finish(&self) -> MomentEstimate {
        let n = self.count as f64;
        let mean: Vec<f64> = self.sum.iter().map(|s| s / n).collect();
        let std_error = self
            .sum_sq
            .iter()
            .zip(&mean)
            .map(|(sq, m)| ((sq / n - m * m) * n / (n - 1.0) / n).sqrt())
            .collect();
        MomentEstimate {
            dim: self.dim,
            mean,
            std_error,
        }
    }
}

/// `G(H)` of the moving-average representation, with an independent gamma.
pub fn mvn_scale(h: f64) -> f64 {
    (2.0 * h * gamma(1.5 - h) / (gamma(h + 0.5) * gamma(2.0 - 2.0 * h))).sqrt()
}

/// Brute-force construction of the centered fOU from a two-sided Brownian
/// motion `V`: `Y_t = int k(t - r) dV_r` with
/// `k(x) = theta G [x^a - lambda int_0^x e^{-lambda(x-y)} y^a dy]`, `a = H - 1/2`.
///
/// `V` is discretized on cells graded toward every target time and `k` is
/// replaced by its cell average, which keeps `E[Y_t (V_b - V_a)]` exact for
/// cell-aligned `[a, b]`.
pub struct MvnSimulator {
    /// cell boundaries, increasing, from `-horizon` to the last target
    edges: Vec<f64>,
    /// `weights[i][c]` multiplies the unit normal of cell `c` for target `i`
    weights: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl MvnSimulator {
    pub fn new(hurst: f64, lambda: f64, theta: f64, targets: &[f64], horizon: f64, rel: f64) -> Self {
        let a = hurst - 0.5;
        let h_min = 1e-9;
        let w_max = 0.25;
        let mut pts = vec![-horizon];
        let mut knots: Vec<f64> = targets.to_vec();
        knots.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut left = -horizon;
        for &t in &knots {
            // graded toward both ends of [left, t]
            let mid = 0.5 * (left + t);
            let mut from_left = vec![];
            let mut x = left;
            if left > -horizon {
                while x < mid {
                    x += (rel * (x - left)).clamp(h_min, w_max);
                    if x < mid {
                        from_left.push(x);
                    }
                }
            }
            let mut from_right = vec![];
            let mut x = t;
            let stop = if left > -horizon { mid } else { left };
            while x > stop {
                x -= (rel * (t - x)).clamp(h_min, w_max);
                if x > stop {
                    from_right.push(x);
                }
            }
            pts.extend(from_left);
            if left > -horizon {
                pts.push(mid);
            }
            pts.extend(from_right.into_iter().rev());
            pts.push(t);
            left = t;
        }
        pts.dedup();
        // F(x) = int_0^x e^{-lambda u} (x - u)^a du
        let big_f = |x: f64| -> f64 {
            if x <= 0.0 {
                return 0.0;
            }
            let cut = x.min(40.0 / lambda);
            let g = |u: f64| (-lambda * u).exp() * (x - u).powf(a);
            let mut s = 0.0;
            let mut lo = 0.0;
            while lo < cut {
                let hi = (lo + 2.0 / lambda).min(cut);
                s += tanh_sinh(g, lo, hi, 1e-13);
                lo = hi;
            }
            s
        };
        let scale = theta * mvn_scale(hurst);
        let weights = targets
            .iter()
            .map(|&t| {
                let f_at: Vec<f64> = pts.iter().map(|&r| big_f(t - r)).collect();
                pts.windows(2)
                    .zip(f_at.windows(2))
                    .map(|(e, f)| {
                        let len = e[1] - e[0];
                        // int over the cell of k(t - r) dr, divided by sqrt(len)
                        scale * (f[0] - f[1]) / len.sqrt()
                    })
                    .collect()
            })
            .collect();
        Self {
            edges: pts,
            weights,
            targets: targets.to_vec(),
        }
    }

    pub fn cells(&self) -> usize {
        self.edges.len() - 1
    }

    /// One draw: `(Y_{targets}, V(b) - V(a) for each [a, b] in increments)`.
    /// The interval endpoints must be cell edges.
    pub fn sample_into(
        &self,
        rng: &mut ChaCha20Rng,
        z: &mut [f64],
        increments: &[(usize, usize)],
        out: &mut Vec<f64>,
    ) {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(rng);
        }
        out.clear();
        for w in &self.weights {
            out.push(w.iter().zip(z.iter()).map(|(a, b)| a * b).sum());
        }
        for &(lo, hi) in increments {
            let mut s = 0.0;
            for c in lo..hi {
                s += (self.edges[c + 1] - self.edges[c]).sqrt() * z[c];
            }
            out.push(s);
        }
    }

    /// Index of the cell edge equal to `x`.
    pub fn edge_index(&self, x: f64) -> usize {
        self.edges
            .iter()
            .position(|&e| e == x)
            .unwrap_or_else(|| panic!("{x} is not a cell edge"))
    }

    pub fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }
}
