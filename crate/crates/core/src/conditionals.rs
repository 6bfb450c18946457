//! Full conditional distributions of the contaminated INAR(1) posterior.
//!
//! The α and λ conditionals are not log-concave and are exposed as log
//! kernels for the ARMS step. Each precomputes the parameter-free part of
//! every transition's convolution terms once, so repeated evaluation inside
//! the sampler only pays for the terms that involve its own argument.

use rand::Rng;
use rand_distr::{Beta, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::math::{
    binomial_ln_pmf, ln_choose, ln_factorial, log_add_exp, log_sum_exp, poisson_ln_pmf,
};
use crate::posterior::{Hyperparams, LatentConfig};
use crate::process::{transition_log_pmf, InarParams};

/// Posterior probability that the observation at `time` (1-based) is an
/// outlier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutlierProbability {
    pub time: usize,
    pub p: f64,
}

/// One convolution term: `weight + survivors·ln α + failures·ln(1-α)` for
/// the α kernel, or `weight + arrivals·ln λ` for the λ kernel.
#[derive(Debug, Clone, Copy)]
struct Term {
    weight: f64,
    k1: f64,
    k2: f64,
}

fn eval_transition(terms: &[Term], u: f64, v: f64, scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.extend(terms.iter().map(|t| {
        let mut s = t.weight;
        if t.k1 != 0.0 {
            s += t.k1 * u;
        }
        if t.k2 != 0.0 {
            s += t.k2 * v;
        }
        s
    }));
    log_sum_exp(scratch)
}

/// `ln π(α | Y, λ, δ, η, ε)` up to a constant, for a fixed latent series.
#[derive(Debug, Clone)]
pub struct AlphaKernel {
    a: f64,
    b: f64,
    transitions: Vec<Vec<Term>>,
}

impl AlphaKernel {
    /// `x` is the latent series `Y - ηδ`.
    pub fn new(x: &[u64], lambda: f64, hyper: &Hyperparams) -> Self {
        let ln_lambda = lambda.ln();
        let transitions = x
            .windows(2)
            .filter(|w| w[0] > 0)
            .map(|w| {
                let (prev, curr) = (w[0], w[1]);
                (0..=prev.min(curr))
                    .map(|i| Term {
                        // ln T(t, i) = (x_t - i) ln λ - ln (x_t - i)! + ln C(x_{t-1}, i)
                        weight: (curr - i) as f64 * ln_lambda - ln_factorial(curr - i)
                            + ln_choose(prev, i),
                        k1: i as f64,
                        k2: (prev - i) as f64,
                    })
                    .collect()
            })
            .collect();
        Self {
            a: hyper.a,
            b: hyper.b,
            transitions,
        }
    }

    pub fn log_density(&self, alpha: f64) -> f64 {
        if !(alpha > 0.0 && alpha < 1.0) {
            return f64::NEG_INFINITY;
        }
        let (ln_a, ln_b) = (alpha.ln(), (-alpha).ln_1p());
        let mut scratch = Vec::new();
        let mut total = (self.a - 1.0) * ln_a + (self.b - 1.0) * ln_b;
        for terms in &self.transitions {
            total += eval_transition(terms, ln_a, ln_b, &mut scratch);
        }
        total
    }
}

/// `ln π(λ | Y, α, δ, η, ε)` up to a constant, for a fixed latent series.
/// The exponential factor has rate `d + (n - 1)`, one `e^{-λ}` per transition.
#[derive(Debug, Clone)]
pub struct LambdaKernel {
    c: f64,
    rate: f64,
    transitions: Vec<Vec<Term>>,
}

impl LambdaKernel {
    pub fn new(x: &[u64], alpha: f64, hyper: &Hyperparams) -> Self {
        let transitions = x
            .windows(2)
            .map(|w| {
                let (prev, curr) = (w[0], w[1]);
                (0..=prev.min(curr))
                    .filter_map(|i| {
                        // ln U(t, i) = ln C(x_{t-1}, i) α^i (1-α)^{x_{t-1}-i} - ln (x_t - i)!
                        let weight = binomial_ln_pmf(i, prev, alpha) - ln_factorial(curr - i);
                        (weight > f64::NEG_INFINITY).then_some(Term {
                            weight,
                            k1: (curr - i) as f64,
                            k2: 0.0,
                        })
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let rate = hyper.d + (x.len() - 1) as f64;
        Self {
            c: hyper.c,
            rate,
            transitions,
        }
    }

    pub fn log_density(&self, lambda: f64) -> f64 {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return f64::NEG_INFINITY;
        }
        let ln_l = lambda.ln();
        let mut scratch = Vec::new();
        let mut total = (self.c - 1.0) * ln_l - self.rate * lambda;
        for terms in &self.transitions {
            total += eval_transition(terms, ln_l, 0.0, &mut scratch);
        }
        total
    }
}

/// Log-likelihood of the transitions touched by the latent value at
/// `index`, with `x_j` substituted there: `f(x_j | x_{j-1})` and, unless
/// `index` is the last position, `f(x_{j+1} | x_j)`.
pub(crate) fn local_log_likelihood(
    x_prev: u64,
    x_j: u64,
    x_next: Option<u64>,
    params: &InarParams,
) -> f64 {
    let mut ll = transition_log_pmf(x_prev, x_j, params);
    if let Some(next) = x_next {
        ll += transition_log_pmf(x_j, next, params);
    }
    ll
}

/// Latent neighbours of `index` under the current configuration.
fn neighbours(y: &[u64], config: &LatentConfig, index: usize) -> (u64, Option<u64>) {
    let prev = config
        .latent_at(y, index - 1)
        .expect("current configuration must be feasible");
    let next = (index + 1 < y.len()).then(|| {
        config
            .latent_at(y, index + 1)
            .expect("current configuration must be feasible")
    });
    (prev, next)
}

fn odds_to_probability(ln_num: f64, ln_other: f64) -> f64 {
    if ln_num == f64::NEG_INFINITY {
        return 0.0;
    }
    (ln_num - log_add_exp(ln_num, ln_other)).exp()
}

/// `P(δ_j = 1 | Y, α, λ, η, ε, δ_{-j})` at 0-based `index ≥ 1`, holding the
/// current size `η_j` fixed.
pub fn delta_probability(
    y: &[u64],
    params: &InarParams,
    config: &LatentConfig,
    index: usize,
) -> OutlierProbability {
    assert!(
        index >= 1 && index < y.len(),
        "index {index} outside 1..{}",
        y.len()
    );
    let eps = config.epsilon;
    let time = index + 1;
    let Some(x_outlier) = y[index].checked_sub(config.eta[index]) else {
        return OutlierProbability { time, p: 0.0 };
    };
    let (prev, next) = neighbours(y, config, index);
    let ll_outlier = local_log_likelihood(prev, x_outlier, next, params);
    let ll_clean = local_log_likelihood(prev, y[index], next, params);
    if ll_outlier == f64::NEG_INFINITY && ll_clean == f64::NEG_INFINITY {
        return OutlierProbability { time, p: eps };
    }
    let p = odds_to_probability(eps.ln() + ll_outlier, (-eps).ln_1p() + ll_clean);
    OutlierProbability { time, p }
}

/// Log-weights `ln[Po(η; β) f(x_j, x_{j+1} | η, δ_j = 1)]` for
/// `η = 0..=y_j`. Larger sizes have zero likelihood.
pub(crate) fn eta_log_weights(
    y: &[u64],
    params: &InarParams,
    config: &LatentConfig,
    index: usize,
    beta: f64,
) -> Vec<f64> {
    let (prev, next) = neighbours(y, config, index);
    (0..=y[index])
        .map(|eta| {
            poisson_ln_pmf(eta, beta) + local_log_likelihood(prev, y[index] - eta, next, params)
        })
        .collect()
}

/// Full conditional of the outlier size at one time.
#[derive(Debug, Clone, PartialEq)]
pub enum EtaConditional {
    /// No outlier flagged: the data carry no information, the prior applies.
    Prior { beta: f64 },
    /// Outlier flagged: normalized pmf over `η = 0..=y_j`.
    Support(Vec<f64>),
}

impl EtaConditional {
    pub fn pmf(&self, eta: u64) -> f64 {
        match self {
            EtaConditional::Prior { beta } => poisson_ln_pmf(eta, *beta).exp(),
            EtaConditional::Support(p) => p.get(eta as usize).copied().unwrap_or(0.0),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            EtaConditional::Prior { beta } => *beta,
            EtaConditional::Support(p) => p.iter().enumerate().map(|(k, &w)| k as f64 * w).sum(),
        }
    }

    pub fn mode(&self) -> u64 {
        match self {
            EtaConditional::Prior { beta } => beta.floor() as u64,
            EtaConditional::Support(p) => p
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(k, _)| k as u64)
                .unwrap_or(0),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            EtaConditional::Prior { beta } => sample_poisson(*beta, rng),
            EtaConditional::Support(p) => sample_discrete(p, rng),
        }
    }
}

pub(crate) fn sample_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    Poisson::new(mean)
        .expect("Poisson mean must be positive")
        .sample(rng) as u64
}

/// Inversion sampling from normalized probabilities.
pub(crate) fn sample_discrete<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k as u64;
        }
    }
    // Round-off: fall back to the last point with positive mass.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0) as u64
}

/// Normalizes log-weights into probabilities.
pub(crate) fn normalize_log_weights(log_w: &[f64]) -> Vec<f64> {
    let total = log_sum_exp(log_w);
    log_w.iter().map(|&w| (w - total).exp()).collect()
}

/// `π(η_j | Y, α, λ, ε, δ_j, η_{-j})` at 0-based `index ≥ 1`.
pub fn eta_conditional_pmf(
    y: &[u64],
    params: &InarParams,
    config: &LatentConfig,
    index: usize,
    beta: f64,
) -> EtaConditional {
    assert!(
        index >= 1 && index < y.len(),
        "index {index} outside 1..{}",
        y.len()
    );
    if !config.delta[index] {
        return EtaConditional::Prior { beta };
    }
    EtaConditional::Support(normalize_log_weights(&eta_log_weights(
        y, params, config, index, beta,
    )))
}

/// `P(δ_j = 1 | Y, α, λ, ε, δ_{-j}, η_{-j})` with `η_j` summed out against
/// its Poisson(β) prior. Used by the blocked `(δ_j, η_j)` site update.
pub fn delta_probability_marginal(
    y: &[u64],
    params: &InarParams,
    config: &LatentConfig,
    index: usize,
    beta: f64,
) -> OutlierProbability {
    let log_w = eta_log_weights(y, params, config, index, beta);
    let (prev, next) = neighbours(y, config, index);
    let ll_clean = local_log_likelihood(prev, y[index], next, params);
    let eps = config.epsilon;
    let p = odds_to_probability(eps.ln() + log_sum_exp(&log_w), (-eps).ln_1p() + ll_clean);
    OutlierProbability { time: index + 1, p }
}

/// Shape parameters `(h + k, g + n - 1 - k)` of the conjugate ε update.
pub fn epsilon_posterior(delta: &[bool], hyper: &Hyperparams) -> (f64, f64) {
    let n = delta.len();
    let k = delta.iter().skip(1).filter(|&&d| d).count();
    (hyper.h + k as f64, hyper.g + (n - 1 - k) as f64)
}

/// One draw of ε from its Beta full conditional, kept strictly inside (0, 1).
pub fn epsilon_draw<R: Rng + ?Sized>(delta: &[bool], hyper: &Hyperparams, rng: &mut R) -> f64 {
    let (s1, s2) = epsilon_posterior(delta, hyper);
    let draw: f64 = Beta::new(s1, s2)
        .expect("Beta shapes are positive")
        .sample(rng);
    draw.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posterior::{latent_log_likelihood, log_posterior};
    use crate::process::CountSeries;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hyper() -> Hyperparams {
        Hyperparams::default()
    }

    #[test]
    fn alpha_kernel_on_zero_series_is_prior() {
        let x = vec![0; 10];
        let h = Hyperparams {
            a: 2.0,
            b: 3.0,
            ..hyper()
        };
        let k = AlphaKernel::new(&x, 1.3, &h);
        for alpha in [0.1, 0.4, 0.9] {
            let prior = 1.0 * f64::ln(alpha) + 2.0 * (1.0 - alpha).ln();
            assert!((k.log_density(alpha) - prior).abs() < 1e-12);
        }
        assert_eq!(k.log_density(0.0), f64::NEG_INFINITY);
        assert_eq!(k.log_density(1.0), f64::NEG_INFINITY);
    }

    #[test]
    fn alpha_kernel_two_points_by_hand() {
        // x = [2, 1], λ = 1.5: Σ_i T(i) α^i (1-α)^{2-i} with
        // T(0) = 1.5, T(1) = 2.
        let h = Hyperparams {
            a: 2.0,
            b: 2.0,
            ..hyper()
        };
        let k = AlphaKernel::new(&[2, 1], 1.5, &h);
        for alpha in [0.2f64, 0.5, 0.7] {
            let sum = 1.5 * (1.0 - alpha) * (1.0 - alpha) + 2.0 * alpha * (1.0 - alpha);
            let want = (alpha * (1.0 - alpha)).ln() + sum.ln();
            assert!((k.log_density(alpha) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_kernel_on_zero_series_is_gamma() {
        let x = vec![0; 7];
        let h = Hyperparams {
            c: 3.0,
            d: 2.0,
            ..hyper()
        };
        let k = LambdaKernel::new(&x, 0.4, &h);
        for lambda in [0.1, 1.0, 5.0] {
            let want = 2.0 * f64::ln(lambda) - (2.0 + 6.0) * lambda;
            assert!((k.log_density(lambda) - want).abs() < 1e-12);
        }
        assert_eq!(k.log_density(0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn lambda_kernel_three_points_by_hand() {
        // x = [1, 2, 0], α = 0.25; transitions 1→2 and 2→0.
        let h = Hyperparams {
            c: 2.0,
            d: 1.0,
            ..hyper()
        };
        let k = LambdaKernel::new(&[1, 2, 0], 0.25, &h);
        for lambda in [0.5f64, 1.0, 2.5] {
            let t1 = 0.75 * lambda * lambda / 2.0 + 0.25 * lambda;
            let t2: f64 = 0.75 * 0.75;
            let want = lambda.ln() - (1.0 + 2.0) * lambda + t1.ln() + t2.ln();
            assert!((k.log_density(lambda) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn kernels_differ_from_joint_by_constant() {
        let y = CountSeries::new(vec![3, 5, 2, 9, 4, 4, 1, 0, 2, 6]).unwrap();
        let cfg = LatentConfig {
            delta: vec![
                false, false, false, true, false, false, false, false, false, false,
            ],
            eta: vec![0, 3, 1, 5, 0, 2, 0, 0, 8, 1],
            epsilon: 0.07,
        };
        let h = hyper();
        let x = cfg.latent_series(y.values()).unwrap();
        let ak = AlphaKernel::new(&x, 1.8, &h);
        let diffs: Vec<f64> = (1..=20)
            .map(|i| {
                let a = i as f64 / 21.0;
                ak.log_density(a) - log_posterior(&y, &InarParams::new(a, 1.8).unwrap(), &cfg, &h)
            })
            .collect();
        let spread = diffs.iter().cloned().fold(f64::MIN, f64::max)
            - diffs.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-8, "alpha spread {spread}");

        let lk = LambdaKernel::new(&x, 0.35, &h);
        let diffs: Vec<f64> = (1..=20)
            .map(|i| {
                let l = 0.25 * i as f64;
                lk.log_density(l) - log_posterior(&y, &InarParams::new(0.35, l).unwrap(), &cfg, &h)
            })
            .collect();
        let spread = diffs.iter().cloned().fold(f64::MIN, f64::max)
            - diffs.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-8, "lambda spread {spread}");
    }

    #[test]
    fn delta_with_zero_size_is_prior() {
        let y = [2, 6, 1, 3];
        let p = InarParams::new(0.5, 1.0).unwrap();
        let cfg = LatentConfig {
            delta: vec![false; 4],
            eta: vec![0, 0, 0, 0],
            epsilon: 0.05,
        };
        let prob = delta_probability(&y, &p, &cfg, 1);
        assert_eq!(prob.time, 2);
        assert!((prob.p - 0.05).abs() < 1e-15);
    }

    #[test]
    fn delta_with_oversized_eta_is_zero() {
        let y = [2, 3, 1, 3];
        let p = InarParams::new(0.5, 1.0).unwrap();
        let cfg = LatentConfig {
            delta: vec![false; 4],
            eta: vec![0, 5, 0, 0],
            epsilon: 0.05,
        };
        assert_eq!(delta_probability(&y, &p, &cfg, 1).p, 0.0);
    }

    #[test]
    fn delta_approaches_one_as_epsilon_does() {
        let y = [2, 3, 1, 3];
        let p = InarParams::new(0.5, 1.0).unwrap();
        let cfg = LatentConfig {
            delta: vec![false; 4],
            eta: vec![0, 2, 0, 0],
            epsilon: 1.0 - 1e-12,
        };
        assert!(delta_probability(&y, &p, &cfg, 1).p > 1.0 - 1e-9);
    }

    #[test]
    fn delta_at_last_index_uses_one_transition() {
        let y = [2, 3, 12];
        let p = InarParams::new(0.5, 1.0).unwrap();
        let cfg = LatentConfig {
            delta: vec![false; 3],
            eta: vec![0, 0, 10],
            epsilon: 0.05,
        };
        let l1 = transition_log_pmf(3, 2, &p);
        let l0 = transition_log_pmf(3, 12, &p);
        let want = 0.05 * l1.exp() / (0.05 * l1.exp() + 0.95 * l0.exp());
        assert!((delta_probability(&y, &p, &cfg, 2).p - want).abs() < 1e-14);
    }

    #[test]
    fn eta_prior_branch() {
        let y = [1, 4, 2];
        let p = InarParams::new(0.5, 1.0).unwrap();
        let cfg = LatentConfig::clean(3, 0.05);
        let c = eta_conditional_pmf(&y, &p, &cfg, 1, 30.0);
        assert_eq!(c.mean(), 30.0);
        let mass: f64 = (0..200).map(|k| c.pmf(k)).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        let mean: f64 = (0..200).map(|k| k as f64 * c.pmf(k)).sum();
        assert!((mean - 30.0).abs() < 1e-9);
    }

    #[test]
    fn eta_point_mass_when_observation_is_zero() {
        let y = [1, 0, 2];
        let p = InarParams::new(0.5, 1.0).unwrap();
        let cfg = LatentConfig {
            delta: vec![false, true, false],
            eta: vec![0, 0, 0],
            epsilon: 0.05,
        };
        let c = eta_conditional_pmf(&y, &p, &cfg, 1, 30.0);
        assert_eq!(c, EtaConditional::Support(vec![1.0]));
        assert_eq!(c.sample(&mut ChaCha8Rng::seed_from_u64(0)), 0);
    }

    #[test]
    fn eta_matches_direct_enumeration() {
        let y = [2, 7, 1, 3];
        let p = InarParams::new(0.5, 1.0).unwrap();
        let cfg = LatentConfig {
            delta: vec![false, true, false, false],
            eta: vec![0, 3, 0, 0],
            epsilon: 0.05,
        };
        let c = eta_conditional_pmf(&y, &p, &cfg, 1, 4.0);
        let fact = |k: u64| -> f64 { (1..=k).map(|v| v as f64).product::<f64>() };
        let raw: Vec<f64> = (0..=7u64)
            .map(|e| {
                let x = [2, 7 - e, 1, 3];
                (-4.0f64).exp() * 4.0f64.powi(e as i32) / fact(e)
                    * latent_log_likelihood(&x, &p).exp()
            })
            .collect();
        let z: f64 = raw.iter().sum();
        let EtaConditional::Support(pmf) = &c else {
            panic!("expected finite support")
        };
        assert_eq!(pmf.len(), 8);
        for (got, want) in pmf.iter().zip(raw.iter().map(|r| r / z)) {
            assert!((got - want).abs() < 1e-12);
        }
        let total: f64 = pmf.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eta_mode_tracks_excess_over_prediction() {
        let p = InarParams::new(0.5, 1.0).unwrap();
        let mut last_mode = 0;
        for spike in [4u64, 8, 12, 16, 20] {
            let y = [2, spike, 2, 2];
            let cfg = LatentConfig {
                delta: vec![false, true, false, false],
                eta: vec![0; 4],
                epsilon: 0.05,
            };
            let mode = eta_conditional_pmf(&y, &p, &cfg, 1, 30.0).mode();
            assert!(
                mode >= last_mode,
                "spike {spike}: mode {mode} < {last_mode}"
            );
            last_mode = mode;
        }
        assert!(last_mode >= 15);
    }

    #[test]
    fn epsilon_posterior_shapes() {
        let h = hyper();
        let mut delta = vec![false; 100];
        assert_eq!(epsilon_posterior(&delta, &h), (5.0, 194.0));
        for i in [4, 40, 80] {
            delta[i] = true;
        }
        let (s1, s2) = epsilon_posterior(&delta, &h);
        assert_eq!((s1, s2), (8.0, 191.0));
        assert!((s1 / (s1 + s2) - 8.0 / 199.0).abs() < 1e-15);
    }

    #[test]
    fn epsilon_draw_moments() {
        let h = hyper();
        let mut delta = vec![false; 100];
        delta[10] = true;
        delta[50] = true;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let draws = 100_000;
        let samples: Vec<f64> = (0..draws)
            .map(|_| epsilon_draw(&delta, &h, &mut rng))
            .collect();
        let (s1, s2) = (7.0f64, 192.0f64);
        let mean = s1 / (s1 + s2);
        let var = s1 * s2 / ((s1 + s2).powi(2) * (s1 + s2 + 1.0));
        let emp = samples.iter().sum::<f64>() / draws as f64;
        assert!(
            (emp - mean).abs() < 3.0 * (var / draws as f64).sqrt(),
            "{emp} vs {mean}"
        );
    }

    #[test]
    fn marginal_delta_sums_over_sizes() {
        let y = [2, 9, 1, 3];
        let p = InarParams::new(0.5, 1.0).unwrap();
        let beta = 5.0f64;
        let cfg = LatentConfig {
            delta: vec![false; 4],
            eta: vec![0, 40, 0, 0],
            epsilon: 0.05,
        };
        let fact = |k: u64| -> f64 { (1..=k).map(|v| v as f64).product::<f64>() };
        let l1: f64 = (0..=9u64)
            .map(|e| {
                (-beta).exp() * beta.powi(e as i32) / fact(e)
                    * latent_log_likelihood(&[2, 9 - e, 1, 3], &p).exp()
            })
            .sum();
        let l0 = latent_log_likelihood(&y, &p).exp();
        let want = 0.05 * l1 / (0.05 * l1 + 0.95 * l0);
        let got = delta_probability_marginal(&y, &p, &cfg, 1, beta).p;
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        // The conditional version is blind to this spike because η_2 = 40 > y_2.
        assert_eq!(delta_probability(&y, &p, &cfg, 1).p, 0.0);
    }
}
