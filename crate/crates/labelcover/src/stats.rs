//! Exact binomial arithmetic and small-sample summaries, used as the oracle
//! side of every Monte Carlo comparison. Tails are computed by direct
//! summation of log-space pmf terms; nothing here is approximated beyond
//! f64 rounding.

/// ln(n!) computed as a cumulative sum of logs. Fine for the desk-scale
/// n (≤ ~10^5) this crate deals in.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut table = vec![0.0; n + 1];
    for i in 1..=n {
        table[i] = table[i - 1] + (i as f64).ln();
    }
    table
}

/// ln C(n, k); 0 when k > n or k = 0.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    let n = n as f64;
    let mut acc = 0.0;
    for i in 1..=k {
        acc += (n - (k - i) as f64).ln() - (i as f64).ln();
    }
    acc
}

/// P[Binomial(n, p) ≥ k], exact summation.
pub fn binomial_tail_ge(n: u64, p: f64, k: u64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "p out of range: {p}");
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    if p == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return 1.0;
    }
    let table = ln_factorials(n as usize);
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut sum = 0.0;
    for j in k..=n {
        let ln_term = table[n as usize] - table[j as usize] - table[(n - j) as usize]
            + j as f64 * lp
            + (n - j) as f64 * lq;
        sum += ln_term.exp();
    }
    sum.min(1.0)
}

/// P[Binomial(n, p) < t] for a real threshold t (strict inequality).
pub fn binomial_tail_lt(n: u64, p: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    // largest integer strictly below t
    let kmax = if t.fract() == 0.0 { t as i64 - 1 } else { t.floor() as i64 };
    if kmax < 0 {
        return 0.0;
    }
    let kmax = (kmax as u64).min(n);
    assert!((0.0..=1.0).contains(&p), "p out of range: {p}");
    if p == 0.0 {
        return 1.0;
    }
    if p == 1.0 {
        return if kmax >= n { 1.0 } else { 0.0 };
    }
    let table = ln_factorials(n as usize);
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut sum = 0.0;
    for j in 0..=kmax {
        let ln_term = table[n as usize] - table[j as usize] - table[(n - j) as usize]
            + j as f64 * lp
            + (n - j) as f64 * lq;
        sum += ln_term.exp();
    }
    sum.min(1.0)
}

/// Sample mean and unbiased variance.
pub fn mean_variance(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (mean, ss / (n - 1) as f64)
}
