//! Fort recursion on Galton–Watson trees.
//!
//! A non-root vertex whose parent lies in an infinite vacant (k-1)-fort
//! joins it when it is vacant and at least `j-k+1` of its `j` children do,
//! so the probability `q` of that event solves
//! `q = Σ_j P(ξ=j) (1-p) P(Binom(j, q) >= j-k+1)`.

use super::binomial;
use super::regular::{check_unit, CriticalMethod, CriticalResult};
use super::{bisect_predicate, FixedPointResult, FIXED_POINT_CAP};
use crate::distribution::OffspringDistribution;
use crate::error::{invalid, Error, Result};

fn check(dist: &OffspringDistribution, k: usize) -> Result<()> {
    if k < 2 {
        return Err(invalid("k must be at least 2"));
    }
    if dist.prob_below(k) > 0.0 {
        return Err(Error::DegenerateOffspring { k });
    }
    Ok(())
}

/// `Σ_j P(ξ=j) P(Binom(j, q) >= j-k+1)`, the update without the `(1-p)`.
pub fn gw_fort_map(dist: &OffspringDistribution, k: usize, q: f64) -> f64 {
    dist.atoms().iter().map(|&(j, pj)| pj * binomial::tail_ge(j, q, (j + 1).saturating_sub(k))).sum()
}

/// Largest fixed point of the fort recursion, iterating down from 1.
pub fn gw_fort_fixed_point(dist: &OffspringDistribution, k: usize, p: f64, tol: f64) -> Result<FixedPointResult> {
    check(dist, k)?;
    check_unit("p", p)?;
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let step = |q: f64| (1.0 - p) * gw_fort_map(dist, k, q);
    let mut q = 1.0;
    for it in 1..=FIXED_POINT_CAP {
        let next = step(q);
        let delta = (q - next).abs();
        q = next;
        if delta <= tol {
            return Ok(FixedPointResult { value: q, iterations: it, residual: (step(q) - q).abs() });
        }
    }
    Err(Error::IterationCap { cap: FIXED_POINT_CAP, last: q, residual: (step(q) - q).abs() })
}

/// `sup_{0<q<=1} Φ(q)/q` for the map `Φ` of [`gw_fort_map`], with the
/// argmax. The `q -> 0` limit is `k P(ξ=k)`.
pub fn gw_ratio_max(dist: &OffspringDistribution, k: usize) -> (f64, f64) {
    let f = |q: f64| gw_fort_map(dist, k, q) / q;
    let n = 4000;
    let (mut best, mut arg) = (f64::MIN, 1.0);
    for i in 1..=n {
        let q = i as f64 / n as f64;
        let v = f(q);
        if v > best {
            best = v;
            arg = q;
        }
    }
    let h = 1.0 / n as f64;
    let (mut a, mut b) = ((arg - h).max(1e-300), (arg + h).min(1.0));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let e = a + phi * (b - a);
        if f(c) > f(e) {
            b = e;
        } else {
            a = c;
        }
    }
    let mid = 0.5 * (a + b);
    if f(mid) > best {
        best = f(mid);
        arg = mid;
    }
    let at_zero = dist.atoms().iter().filter(|&&(j, _)| j == k).map(|&(j, pj)| j as f64 * pj).sum::<f64>();
    if at_zero > best {
        (at_zero, 0.0)
    } else {
        (best, arg)
    }
}

/// Supremum of `p` for which the fort recursion has a positive fixed point.
///
/// A positive fixed point exists iff `(1-p) Φ(q) >= q` somewhere in
/// `(0, 1]`, which is what the bisection tests.
pub fn gw_critical(dist: &OffspringDistribution, k: usize, tol: f64) -> Result<CriticalResult> {
    check(dist, k)?;
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let (max_ratio, _) = gw_ratio_max(dist, k);
    let (a, b) = bisect_predicate(0.0, 1.0, tol, |p| (1.0 - p) * max_ratio >= 1.0);
    Ok(CriticalResult { p_crit: 0.5 * (a + b), bracket_width: b - a, method: CriticalMethod::Bisection })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::regular::critical_p_regular;

    fn example() -> OffspringDistribution {
        OffspringDistribution::parse("2:0.5,4:0.5").unwrap()
    }

    #[test]
    fn example_map_is_the_explicit_polynomial() {
        let dist = example();
        for i in 0..=20 {
            let q = i as f64 / 20.0;
            let p = 0.07;
            let explicit = 0.5 * (1.0 - p) * (2.0 * q - q * q) + 0.5 * (1.0 - p) * (4.0 * q.powi(3) - 3.0 * q.powi(4));
            assert!(((1.0 - p) * gw_fort_map(&dist, 2, q) - explicit).abs() < 1e-15);
        }
    }

    #[test]
    fn example_critical_value() {
        let pc = gw_critical(&example(), 2, 1e-12).unwrap().p_crit;
        assert!((pc - 0.10504).abs() < 1e-4, "{pc}");
        assert!(pc < 1.0 / 9.0);
        let below = gw_fort_fixed_point(&example(), 2, pc - 1e-3, 1e-13).unwrap().value;
        let above = gw_fort_fixed_point(&example(), 2, pc + 1e-3, 1e-13).unwrap().value;
        assert!(below > 0.1 && above < 1e-6, "{below} {above}");
    }

    #[test]
    fn point_masses_agree_with_regular_solver() {
        for d in 2..=6 {
            for k in 2..=d {
                let gw = gw_critical(&OffspringDistribution::point_mass(d), k, 1e-12).unwrap().p_crit;
                let reg = critical_p_regular(d, k, 1e-12).unwrap().p_crit;
                assert!((gw - reg).abs() < 1e-6, "d={d} k={k}: {gw} vs {reg}");
            }
        }
    }

    #[test]
    fn degenerate_and_trivial_cases() {
        let d = OffspringDistribution::parse("1:0.1,3:0.9").unwrap();
        assert_eq!(gw_critical(&d, 2, 1e-9), Err(Error::DegenerateOffspring { k: 2 }));
        assert_eq!(gw_fort_fixed_point(&example(), 2, 1.0, 1e-12).unwrap().value, 0.0);
    }
}
