use serde::{Deserialize, Serialize};

use crate::kernels::asymptotic_constants;
use crate::params::ModelParams;

/// Limits of `n^{2H}` times the mean-square error of each scheme, and the
/// constant in the lower bound for any method using the same information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub c_euler: f64,
    pub c_trapezoid: f64,
    pub lower_bound: f64,
    /// The rate exponent: RMSE decays like `n^{-H}`.
    pub hurst: f64,
}

pub fn theory_constants(params: &ModelParams) -> TheoryConstants {
    let c1 = asymptotic_constants(params, 1.0)
        .expect("a = 1 is always admissible")
        .c1;
    let h = params.hurst;
    let scale = (2.0 * params.mu).exp() * c1 * params.t_final.powf(2.0 * h + 1.0);
    let rho_c2 = 1.0 - params.rho * params.rho;
    let c_euler = 2.0 * scale / (2.0 * h + 1.0);
    TheoryConstants {
        c_euler,
        c_trapezoid: c_euler - rho_c2 * scale / 2.0,
        lower_bound: rho_c2 * 2.0 / ((2.0 * h + 1.0) * (2.0 * h + 2.0)) * scale,
        hurst: h,
    }
}
