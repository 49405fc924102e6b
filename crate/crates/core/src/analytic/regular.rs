//! Critical probabilities on regular trees.
//!
//! With `x` the probability that a vertex has no vacant `(d+1-k)`-ary
//! subtree below it, `x = B(x)` where
//! `B(x) = P(Binom(d, (1-x)(1-p)) <= d-k)`. The relevant solution is the
//! smallest one; complete occupation has positive probability exactly when
//! it equals 1.

use serde::{Deserialize, Serialize};

use super::binomial;
use super::{bisect_predicate, FixedPointResult, FIXED_POINT_CAP, FIXED_POINT_TOL};
use crate::error::{invalid, Error, Result};

/// How a critical value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalMethod {
    Bisection,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalResult {
    pub p_crit: f64,
    pub bracket_width: f64,
    pub method: CriticalMethod,
}

pub(crate) fn check_dk(d: usize, k: usize) -> Result<()> {
    if k < 2 || k > d {
        return Err(invalid(format!("need 2 <= k <= d, got d = {d}, k = {k}")));
    }
    Ok(())
}

pub(crate) fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in [0, 1], got {v}")))
    }
}

/// `B_{d,k,p}(x) = P(Binom(d, (1-x)(1-p)) <= d-k)`.
pub fn eval_b(d: usize, k: usize, p: f64, x: f64) -> Result<f64> {
    check_dk(d, k)?;
    check_unit("p", p)?;
    check_unit("x", x)?;
    Ok(b_unchecked(d, k, p, x))
}

pub(crate) fn b_unchecked(d: usize, k: usize, p: f64, x: f64) -> f64 {
    binomial::cdf_le(d, (1.0 - x) * (1.0 - p), d - k)
}

/// Least fixed point of `B` by iterating `y_{n+1} = B(y_n)` from `y_0 = 0`.
pub fn smallest_fixed_point(d: usize, k: usize, p: f64, tol: f64) -> Result<FixedPointResult> {
    check_dk(d, k)?;
    check_unit("p", p)?;
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let mut y = 0.0;
    for it in 1..=FIXED_POINT_CAP {
        let next = b_unchecked(d, k, p, y);
        let step = (next - y).abs();
        y = next;
        if step <= tol {
            let residual = (b_unchecked(d, k, p, y) - y).abs();
            return Ok(FixedPointResult { value: y, iterations: it, residual });
        }
    }
    Err(Error::IterationCap { cap: FIXED_POINT_CAP, last: y, residual: (b_unchecked(d, k, p, y) - y).abs() })
}

/// `y_n`: `n` iterations of `B` from 0.
pub fn iterate_b(d: usize, k: usize, p: f64, n: usize) -> Result<f64> {
    check_dk(d, k)?;
    check_unit("p", p)?;
    let mut y = 0.0;
    for _ in 0..n {
        y = b_unchecked(d, k, p, y);
    }
    Ok(y)
}

/// Shape analysis of `G(u) = u - T(u)`, `T(u) = P(Binom(d, (1-p)u) >= m)`,
/// `m = d+1-k`, where `u = 1 - x`.
///
/// `T'(u) = (1-p) d P(Binom(d-1, (1-p)u) = m-1)`, whose mode sits at
/// `(1-p)u = (m-1)/(d-1)`. So `T` is convex then concave, and `G` is concave
/// on `[0, u_c]` and convex on `[u_c, 1]`. Since `G(0) = 0` and `G` starts
/// out non-decreasing, a positive root exists iff the minimum of `G` over
/// the convex part is at most 0 and is attained away from 0.
struct Shape {
    d: usize,
    m: usize,
    keep: f64,
}

impl Shape {
    fn new(d: usize, k: usize, p: f64) -> Self {
        Self { d, m: d + 1 - k, keep: 1.0 - p }
    }

    fn g(&self, u: f64) -> f64 {
        u - binomial::tail_ge(self.d, self.keep * u, self.m)
    }

    fn g_prime(&self, u: f64) -> f64 {
        1.0 - self.keep * self.d as f64 * binomial::pmf(self.d - 1, self.keep * u, self.m - 1)
    }

    fn minimiser(&self) -> f64 {
        let u_c = if self.m == 1 { 0.0 } else { (((self.m - 1) as f64 / (self.d - 1) as f64) / self.keep).min(1.0) };
        if self.g_prime(1.0) <= 0.0 {
            return 1.0;
        }
        if self.g_prime(u_c) >= 0.0 {
            return u_c;
        }
        let (mut a, mut b) = (u_c, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if self.g_prime(mid) < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }

    /// Largest root of `G`, if positive.
    fn largest_root(&self) -> Option<f64> {
        if self.keep <= 0.0 {
            return None;
        }
        let u_min = self.minimiser();
        if u_min <= 0.0 || self.g(u_min) > 0.0 {
            return None;
        }
        // G(u_min) <= 0 <= G(1), G convex and increasing past u_min
        let (mut a, mut b) = (u_min, 1.0);
        if self.g(1.0) <= 0.0 {
            return Some(1.0);
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if self.g(mid) <= 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        Some(a)
    }
}

/// Least fixed point of `B` located from the shape of `B` rather than by
/// iteration, so it stays accurate close to the critical point.
pub fn fixed_point_direct(d: usize, k: usize, p: f64) -> Result<f64> {
    check_dk(d, k)?;
    check_unit("p", p)?;
    Ok(match Shape::new(d, k, p).largest_root() {
        Some(u) => 1.0 - u,
        None => 1.0,
    })
}

/// Whether `B` has a fixed point below 1.
pub fn has_nontrivial_fixed_point(d: usize, k: usize, p: f64) -> Result<bool> {
    check_dk(d, k)?;
    check_unit("p", p)?;
    Ok(Shape::new(d, k, p).largest_root().is_some())
}

/// Default bisection tolerance in `p`.
pub const DEFAULT_P_TOL: f64 = 1e-10;

/// Critical probability of the `(d+1)`-regular tree under the k-rule: the
/// supremum of `p` for which `B` has a fixed point below 1.
pub fn critical_p_regular(d: usize, k: usize, tol: f64) -> Result<CriticalResult> {
    check_dk(d, k)?;
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let shape = |p: f64| Shape::new(d, k, p).largest_root().is_some();
    let (a, b) = bisect_predicate(0.0, 1.0, tol, shape);
    Ok(CriticalResult { p_crit: 0.5 * (a + b), bracket_width: b - a, method: CriticalMethod::Bisection })
}

/// `p(T_d, d) = 1 - 1/d`.
pub fn closed_form_kd(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(invalid("need d >= 2"));
    }
    Ok(1.0 - 1.0 / d as f64)
}

/// `p(T_d, 2) = 1 - (d-1)^(2d-3) / (d^(d-1) (d-2)^(d-2))`.
pub fn closed_form_k2(d: usize) -> Result<f64> {
    if d < 3 {
        return Err(invalid("need d >= 3"));
    }
    let f = d as f64;
    let ln_ratio = (2.0 * f - 3.0) * (f - 1.0).ln() - (f - 1.0) * f.ln() - (f - 2.0) * (f - 2.0).ln();
    Ok(-ln_ratio.exp_m1())
}

/// One row of [`asymptotic_gamma_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaRow {
    pub d: usize,
    pub k: usize,
    pub p_crit: f64,
    /// `(k-1)/d`.
    pub upper_bound: f64,
    pub within_bound: bool,
}

/// `p(T_d, ceil(γ d))` for each listed `d`, with the bound `(k-1)/d`.
pub fn asymptotic_gamma_check(gamma: f64, d_list: &[usize]) -> Result<Vec<GammaRow>> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(invalid(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    d_list
        .iter()
        .map(|&d| {
            let k = (gamma * d as f64 - 1e-12).ceil() as usize;
            if k < 2 || k > d {
                return Err(invalid(format!("ceil({gamma} * {d}) = {k} is outside 2..={d}")));
            }
            let p_crit = critical_p_regular(d, k, DEFAULT_P_TOL)?.p_crit;
            let upper_bound = (k - 1) as f64 / d as f64;
            Ok(GammaRow { d, k, p_crit, upper_bound, within_bound: p_crit <= upper_bound + 1e-9 })
        })
        .collect()
}

/// `z(p) = (1-p) P(Binom(d-1, u) >= d+1-k)`, with `u` the largest fixed
/// point of `u = (1-p) P(Binom(d, u) >= d+1-k)` (found by iterating down
/// from 1).
pub fn z_fixed_point(d: usize, k: usize, p: f64, tol: f64) -> Result<f64> {
    check_dk(d, k)?;
    check_unit("p", p)?;
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let m = d + 1 - k;
    let step = |u: f64| (1.0 - p) * binomial::tail_ge(d, u, m);
    let mut u = 1.0;
    let mut converged = false;
    for _ in 0..FIXED_POINT_CAP {
        let next = step(u);
        let delta = (u - next).abs();
        u = next;
        if delta <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::IterationCap { cap: FIXED_POINT_CAP, last: u, residual: (step(u) - u).abs() });
    }
    Ok((1.0 - p) * binomial::tail_ge(d - 1, u, m))
}

/// Largest `p` (to `tol`) with `sqrt(1 - z(p)^2) < 1/d`: a lower bound on
/// the density needed for an infinite occupied cluster.
pub fn q_lower_bound(d: usize, k: usize, tol: f64) -> Result<CriticalResult> {
    check_dk(d, k)?;
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let threshold = 1.0 / d as f64;
    let ok = |p: f64| match z_fixed_point(d, k, p, FIXED_POINT_TOL) {
        Ok(z) => z > 0.0 && (1.0 - z * z).max(0.0).sqrt() < threshold,
        Err(_) => false,
    };
    let (a, b) = bisect_predicate(0.0, 1.0, tol, ok);
    if a <= 0.0 {
        return Err(Error::Inconclusive("z(p) is too small for every p > 0".into()));
    }
    Ok(CriticalResult { p_crit: a, bracket_width: b - a, method: CriticalMethod::Bisection })
}
