//! Binomial probabilities. Tails are summed term by term, never as `1 - x`,
//! and switch to log space above 60 trials.

const DIRECT_LIMIT: usize = 60;

fn degenerate(n: usize, q: f64, lo: usize, hi: usize) -> Option<f64> {
    if lo > hi || lo > n {
        return Some(0.0);
    }
    if q <= 0.0 {
        return Some(if lo == 0 { 1.0 } else { 0.0 });
    }
    if q >= 1.0 {
        return Some(if hi >= n { 1.0 } else { 0.0 });
    }
    None
}

/// `P(lo <= Binom(n, q) <= hi)`.
pub fn range(n: usize, q: f64, lo: usize, hi: usize) -> f64 {
    let hi = hi.min(n);
    if let Some(v) = degenerate(n, q, lo, hi) {
        return v;
    }
    if n <= DIRECT_LIMIT {
        let r = 1.0 - q;
        let mut choose = 1.0f64;
        for j in 0..lo {
            choose = choose * (n - j) as f64 / (j + 1) as f64;
        }
        let mut sum = 0.0;
        for j in lo..=hi {
            sum += choose * q.powi(j as i32) * r.powi((n - j) as i32);
            choose = choose * (n - j) as f64 / (j + 1) as f64;
        }
        sum.min(1.0)
    } else {
        let (lq, lr) = (q.ln(), (-q).ln_1p());
        let mut ln_choose = 0.0f64;
        for j in 0..lo {
            ln_choose += ((n - j) as f64 / (j + 1) as f64).ln();
        }
        let terms: Vec<f64> = (lo..=hi)
            .map(|j| {
                let t = ln_choose + j as f64 * lq + (n - j) as f64 * lr;
                if j < n {
                    ln_choose += ((n - j) as f64 / (j + 1) as f64).ln();
                }
                t
            })
            .collect();
        let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return 0.0;
        }
        (top.exp() * terms.iter().map(|t| (t - top).exp()).sum::<f64>()).min(1.0)
    }
}

/// `P(Binom(n, q) >= m)`.
pub fn tail_ge(n: usize, q: f64, m: usize) -> f64 {
    range(n, q, m, n)
}

/// `P(Binom(n, q) <= m)`.
pub fn cdf_le(n: usize, q: f64, m: usize) -> f64 {
    range(n, q, 0, m)
}

/// `P(Binom(n, q) = j)`.
pub fn pmf(n: usize, q: f64, j: usize) -> f64 {
    range(n, q, j, j)
}
