use bootperc::analytic::binomial;
use bootperc::analytic::{critical_p_regular, iterate_b, smallest_fixed_point, FIXED_POINT_TOL};
use bootperc::montecarlo::mc_extinction_depth_n;
use bootperc::RngSeed;
use proptest::prelude::*;

#[test]
fn fixed_point_against_simulation() {
    let y = smallest_fixed_point(3, 2, 0.2, FIXED_POINT_TOL).unwrap().value;
    let y12 = iterate_b(3, 2, 0.2, 12).unwrap();
    assert!(y12 <= y + 1e-12);
    let row = mc_extinction_depth_n(3, 2, 0.2, 12, 50_000, RngSeed(17)).unwrap();
    assert!((row.estimate - y12).abs() <= 3.0 * row.std_err);
    // depth 12 is already close to the limit at this p
    assert!((row.estimate - y).abs() <= 3.0 * row.std_err + (y - y12));
}

#[test]
fn fixed_point_solves_the_recursion() {
    // independent evaluation of B(y) = P(Binom(d, (1-y)(1-p)) <= d-k) by direct summation
    let direct = |d: u64, k: u64, p: f64, y: f64| -> f64 {
        let q = (1.0 - y) * (1.0 - p);
        let mut c = 1.0f64;
        let mut total = 0.0;
        for j in 0..=d - k {
            if j > 0 {
                c = c * (d - j + 1) as f64 / j as f64;
            }
            total += c * q.powi(j as i32) * (1.0 - q).powi((d - j) as i32);
        }
        total
    };
    for (d, k, p) in [(3, 2, 0.05), (3, 2, 0.2), (4, 3, 0.3), (5, 5, 0.9), (6, 4, 0.45)] {
        let r = smallest_fixed_point(d, k, p, FIXED_POINT_TOL).unwrap();
        assert!((direct(d as u64, k as u64, p, r.value) - r.value).abs() < 1e-9, "d={d} k={k} p={p}");
    }
}

#[test]
fn below_and_above_criticality() {
    for (d, k) in [(3, 2), (4, 2), (4, 3), (5, 3)] {
        let pc = critical_p_regular(d, k, 1e-12).unwrap().p_crit;
        let below = smallest_fixed_point(d, k, pc - 1e-3, FIXED_POINT_TOL).unwrap().value;
        let above = smallest_fixed_point(d, k, pc + 1e-3, FIXED_POINT_TOL).unwrap().value;
        assert!(below < 0.99 && above > 1.0 - 1e-6, "d={d} k={k}: {below} {above}");
    }
}

proptest! {
    #[test]
    fn finite_depth_values_are_monotone(d in 2usize..7, dk in 0usize..5, p in 0.0f64..1.0, n in 0usize..15) {
        let k = 2 + dk % (d - 1);
        let y = iterate_b(d, k, p, n).unwrap();
        prop_assert!(iterate_b(d, k, p, n + 1).unwrap() >= y - 1e-12);
        prop_assert!(iterate_b(d, k, (p + 0.05).min(1.0), n).unwrap() >= y - 1e-12);
    }

    #[test]
    fn binomial_tail_matches_complement(n in 0usize..120, q in 0.0f64..1.0, m in 0usize..121) {
        let tail = binomial::tail_ge(n, q, m);
        let cdf = if m == 0 { 0.0 } else { binomial::cdf_le(n, q, m - 1) };
        prop_assert!((tail + cdf - 1.0).abs() < 1e-9);
    }
}
