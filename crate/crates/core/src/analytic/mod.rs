//! Numerical critical probabilities and bounds.

use serde::{Deserialize, Serialize};

pub mod anchored;
pub mod binomial;
pub mod gw;
pub mod regular;

pub use anchored::{anchored_bound, AnchoredBoundReport};
pub use gw::{gw_critical, gw_fort_fixed_point};
pub use regular::{
    asymptotic_gamma_check, closed_form_k2, closed_form_kd, critical_p_regular, eval_b, iterate_b, q_lower_bound,
    smallest_fixed_point, z_fixed_point, CriticalMethod, CriticalResult, DEFAULT_P_TOL,
};

/// Fixed-point iterations stop once a step moves less than this.
pub const FIXED_POINT_TOL: f64 = 1e-12;
/// Iteration cap for fixed-point solvers.
pub const FIXED_POINT_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult {
    pub value: f64,
    pub iterations: usize,
    /// `|F(value) - value|`.
    pub residual: f64,
}

/// Bisection for the switch point of a predicate that holds at `a` and
/// fails at `b`. Returns the final bracket.
pub(crate) fn bisect_predicate(mut a: f64, mut b: f64, tol: f64, pred: impl Fn(f64) -> bool) -> (f64, f64) {
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if pred(mid) {
            a = mid;
        } else {
            b = mid;
        }
    }
    (a, b)
}
