//! Lower bound on the critical probability of graphs with anchored
//! expansion.
//!
//! An internally spanned set of `n` vertices must start with at least
//! `c n` occupied vertices, `c = (h - d + 2k) / (2k)`, and there are at most
//! `((d-1)e)^n` connected sets of that size around a vertex. Large
//! deviations then kill the expected count once
//! `I_p(c) > log(d-1) + 1`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// `I_p(c) = c log(c/p) + (1-c) log((1-c)/(1-p))`.
pub fn rate(c: f64, p: f64) -> f64 {
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    term(c, p) + term(1.0 - c, 1.0 - p)
}

/// `K(c) = c (1-c)^((1-c)/c)`, equal to 1 at `c = 1`.
pub fn k_constant(c: f64) -> f64 {
    if c >= 1.0 {
        1.0
    } else {
        c * (1.0 - c).powf((1.0 - c) / c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnchoredBoundReport {
    pub d: usize,
    pub k: usize,
    pub h: f64,
    pub c: f64,
    #[serde(rename = "K")]
    pub k_const: f64,
    /// `K(c) / (de - e)^(1/c)`.
    pub p_bound: f64,
    /// Solution of `I_p(c) = log(d-1) + 1` in `(0, c)`.
    pub p_bound_sharp: f64,
    /// `I_p(c)` at `p_bound`.
    pub rate_at_bound: f64,
    /// `log(d-1) + 1`.
    pub target_rate: f64,
}

/// Bound for a `d`-regular graph with anchored expansion constant `h`
/// under the k-rule.
pub fn anchored_bound(d: usize, k: usize, h: f64) -> Result<AnchoredBoundReport> {
    if d < 3 {
        return Err(invalid("degree must be at least 3"));
    }
    if k < 1 {
        return Err(invalid("k must be at least 1"));
    }
    if !h.is_finite() || h < 0.0 {
        return Err(invalid(format!("expansion constant must be non-negative, got {h}")));
    }
    let lhs = h + 2.0 * k as f64;
    if lhs <= d as f64 {
        return Err(Error::AnchoredInapplicable { lhs, d });
    }
    if h > d as f64 {
        return Err(invalid(format!("expansion constant {h} exceeds the degree {d}")));
    }
    let c = (lhs - d as f64) / (2.0 * k as f64);
    let k_const = k_constant(c);
    let e = std::f64::consts::E;
    let p_bound = k_const / (d as f64 * e - e).powf(1.0 / c);
    let target_rate = ((d - 1) as f64).ln() + 1.0;
    // I_p(c) decreases from infinity to 0 as p runs over (0, c)
    let (mut a, mut b) = (0.0f64, c);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if rate(c, mid) > target_rate {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(AnchoredBoundReport {
        d,
        k,
        h,
        c,
        k_const,
        p_bound,
        p_bound_sharp: a,
        rate_at_bound: rate(c, p_bound),
        target_rate,
    })
}
