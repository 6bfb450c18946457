//! Log-space helpers shared by the likelihood and the samplers.

/// `ln(sum(exp(x)))` over a slice. Returns `-inf` for an empty slice or when
/// every term is `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

/// `ln(exp(a) + exp(b))`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(k!)` via log-gamma.
#[inline]
pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else {
        libm::lgamma(k as f64 + 1.0)
    }
}

/// `ln C(n, k)`; `-inf` when `k > n`.
#[inline]
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Poisson log-pmf at `k` with mean `mean > 0`.
#[inline]
pub fn poisson_ln_pmf(k: u64, mean: f64) -> f64 {
    if k == 0 {
        -mean
    } else {
        k as f64 * mean.ln() - mean - ln_factorial(k)
    }
}

/// `k * ln(p)` with the convention `0 * ln(0) = 0`.
#[inline]
pub(crate) fn xlogy(k: u64, ln_p: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * ln_p
    }
}

/// Binomial log-pmf: `ln P(Bin(n, p) = k)`, exact at `p ∈ {0, 1}`.
#[inline]
pub fn binomial_ln_pmf(k: u64, n: u64, p: f64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if p <= 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p >= 1.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    ln_choose(n, k) + xlogy(k, p.ln()) + xlogy(n - k, (-p).ln_1p())
}
