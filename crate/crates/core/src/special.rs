//! Log-space probability kernels.
//!
//! The Poisson mass function uses the saddle-point form
//! `p(k; λ) = exp(-stirlerr(k) - bd0(k, λ)) / sqrt(2πk)`, which keeps full
//! relative accuracy for large `k` and `λ` where `k ln λ - λ - ln k!`
//! loses digits to cancellation.

use std::f64::consts::PI;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln k!`.
pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

// ln k! - (k + 1/2) ln k + k - ln sqrt(2π), for k = 0..=15.
const STIRLERR_TABLE: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_26,
    0.041_340_695_955_409_3,
    0.027_677_925_684_998_34,
    0.020_790_672_103_765_093,
    0.016_644_691_189_821_193,
    0.013_876_128_823_070_748,
    0.011_896_709_945_891_77,
    0.010_411_265_261_972_096,
    0.009_255_462_182_712_733,
    0.008_330_563_433_362_87,
    0.007_573_675_487_951_841,
    0.006_942_840_107_209_53,
    0.006_408_994_188_004_207,
    0.005_951_370_112_758_847_5,
    0.005_554_733_551_962_801,
];

/// Error of Stirling's approximation to `ln k!`.
pub fn stirlerr(k: u64) -> f64 {
    if k < 16 {
        return STIRLERR_TABLE[k as usize];
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let n = k as f64;
    let nn = n * n;
    if k > 500 {
        (S0 - S1 / nn) / n
    } else if k > 80 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if k > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `k ln(k/μ) + μ - k`, evaluated without cancellation when
/// `k` is close to `μ`.
pub fn bd0(k: f64, mu: f64) -> f64 {
    if (k - mu).abs() < 0.1 * (k + mu) {
        let v = (k - mu) / (k + mu);
        let mut s = (k - mu) * v;
        let mut ej = 2.0 * k * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        k * (k / mu).ln() + mu - k
    }
}

/// `ln P(K = k)` for `K ~ Poisson(λ)`; `-∞` for impossible outcomes.
pub fn poisson_ln_pmf(k: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if k == 0 {
        return -lambda;
    }
    let kf = k as f64;
    -stirlerr(k) - bd0(kf, lambda) - 0.5 * (2.0 * PI * kf).ln()
}

/// `P(K = k)` for `K ~ Poisson(λ)`.
pub fn poisson_pmf(k: u64, lambda: f64) -> f64 {
    poisson_ln_pmf(k, lambda).exp()
}

/// `ln P(R = r)` for `R` negative-binomial with real shape `r_shape > 0`
/// and success probability 1/2:
/// `(r_shape)_r / r! · 2^{-(r_shape + r)}`.
pub fn neg_binomial_half_ln_pmf(r: u64, shape: f64) -> f64 {
    let rf = r as f64;
    ln_gamma(shape + rf) - ln_gamma(shape) - ln_factorial(r) - (shape + rf) * std::f64::consts::LN_2
}

/// Sum of `exp(v)` over `values`, accumulated relative to the maximum.
/// Returns the log of the sum; `-∞` when every entry is `-∞`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if values.len() == 1 {
        return max;
    }
    let s: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_pmf(k: u64, lambda: f64) -> f64 {
        let mut p = (-lambda).exp();
        for j in 1..=k {
            p *= lambda / j as f64;
        }
        p
    }

    #[test]
    fn stirlerr_table_matches_series_at_boundary() {
        // Past the table the series is used; continuity at 15/16 is a sanity check.
        let direct = |k: u64| {
            let n = k as f64;
            ln_factorial(k) - (n + 0.5) * n.ln() + n - 0.5 * (2.0 * PI).ln()
        };
        for k in [1u64, 5, 15] {
            assert!((stirlerr(k) - direct(k)).abs() < 1e-13, "k = {k}");
        }
        for k in [16u64, 40, 100, 600] {
            assert!((stirlerr(k) - direct(k)).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn poisson_small_cases() {
        assert_eq!(poisson_pmf(0, 0.0), 1.0);
        assert_eq!(poisson_pmf(3, 0.0), 0.0);
        let e1 = (-1.0f64).exp();
        assert!((poisson_pmf(2, 1.0) - e1 / 2.0).abs() < 1e-16);
        let p = poisson_pmf(4, 4.0);
        assert!((p - 0.195_366_814_813_165).abs() < 1e-14, "{p}");
    }

    #[test]
    fn poisson_matches_product_form() {
        for &lambda in &[0.3, 2.5, 17.0, 90.0] {
            for k in 0..150u64 {
                let a = poisson_pmf(k, lambda);
                let b = naive_pmf(k, lambda);
                if b > 1e-250 {
                    assert!(((a - b) / b).abs() < 1e-12, "k={k} lambda={lambda} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn poisson_sums_to_one_at_large_rate() {
        let lambda = 1024.0;
        let s: f64 = (0..2000).map(|k| poisson_pmf(k, lambda)).sum();
        assert!((s - 1.0).abs() < 1e-13, "{s}");
    }

    #[test]
    fn neg_binomial_half_sums_to_one() {
        for &shape in &[0.5, 1.0, 1.5, 3.0] {
            let s: f64 = (0..400).map(|r| neg_binomial_half_ln_pmf(r, shape).exp()).sum();
            assert!((s - 1.0).abs() < 1e-13, "shape {shape}: {s}");
        }
        assert_eq!(neg_binomial_half_ln_pmf(0, 1.0), -std::f64::consts::LN_2);
    }

    #[test]
    fn log_sum_exp_single_term_is_exact() {
        let v = -123.456_789;
        assert_eq!(log_sum_exp(&[v]), v);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
        let s = log_sum_exp(&[0.0, 0.0]);
        assert!((s - 2f64.ln()).abs() < 1e-15);
    }
}
