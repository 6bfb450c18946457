//! Unnormalized log densities of the contaminated INAR(1) model: the
//! likelihood conditional on the first observation, the joint prior, and
//! their sum.
//!
//! The likelihood is the product of the `n - 1` one-step transition
//! probabilities of the latent series, each carrying its own `e^{-λ}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{ln_factorial, xlogy};
use crate::process::{transition_log_pmf, CountSeries, InarParams};

/// Prior hyperparameters: α ~ Beta(a, b), λ ~ Gamma(c, d) (shape, rate),
/// ε ~ Beta(h, g), and η_t ~ Poisson(beta).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub h: f64,
    pub g: f64,
    pub beta: f64,
}

impl Default for Hyperparams {
    /// Vague Beta/Gamma priors, prior outlier rate 0.05, and the
    /// non-informative size prior mean 30.
    fn default() -> Self {
        Self {
            a: 0.001,
            b: 0.001,
            c: 0.001,
            d: 0.001,
            h: 5.0,
            g: 95.0,
            beta: 30.0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("h", self.h),
            ("g", self.g),
            ("beta", self.beta),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "hyperparameter {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_beta(self, beta: f64) -> Self {
        Self { beta, ..self }
    }

    /// Prior mean of the outlier probability, `h / (h + g)`.
    pub fn epsilon_prior_mean(&self) -> f64 {
        self.h / (self.h + self.g)
    }
}

/// Outlier indicators δ, sizes η and occurrence probability ε.
///
/// Vectors are indexed like the series. Position 0 (the first observation)
/// never carries an outlier; its entries are ignored by every density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentConfig {
    pub delta: Vec<bool>,
    pub eta: Vec<u64>,
    pub epsilon: f64,
}

impl LatentConfig {
    /// No outliers, all sizes zero.
    pub fn clean(n: usize, epsilon: f64) -> Self {
        Self {
            delta: vec![false; n],
            eta: vec![0; n],
            epsilon,
        }
    }

    /// The latent count at `index`, or `None` if it would be negative.
    #[inline]
    pub fn latent_at(&self, y: &[u64], index: usize) -> Option<u64> {
        if index > 0 && self.delta[index] {
            y[index].checked_sub(self.eta[index])
        } else {
            Some(y[index])
        }
    }

    /// `X = Y - η δ`, or `None` if any entry is negative.
    pub fn latent_series(&self, y: &[u64]) -> Option<Vec<u64>> {
        (0..y.len()).map(|i| self.latent_at(y, i)).collect()
    }

    /// Number of flagged times (`k`).
    pub fn outlier_count(&self) -> usize {
        self.delta.iter().skip(1).filter(|&&d| d).count()
    }
}

/// Sum of transition log-probabilities of a latent path.
pub fn latent_log_likelihood(x: &[u64], params: &InarParams) -> f64 {
    x.windows(2)
        .map(|w| transition_log_pmf(w[0], w[1], params))
        .sum()
}

/// `ln L(α, λ, δ, η | y)`, conditional on `y_1`. Infeasible configurations
/// (a negative latent count) give `-inf`.
pub fn conditional_log_likelihood(
    series: &CountSeries,
    params: &InarParams,
    config: &LatentConfig,
) -> f64 {
    match config.latent_series(series.values()) {
        Some(x) => latent_log_likelihood(&x, params),
        None => f64::NEG_INFINITY,
    }
}

/// Log of the joint prior kernel, normalizing constants dropped. Includes
/// the Bernoulli(ε) terms for δ_2..δ_n. Out-of-support values give `-inf`.
pub fn log_prior(params: &InarParams, config: &LatentConfig, hyper: &Hyperparams) -> f64 {
    let (alpha, lambda, eps) = (params.alpha(), params.lambda(), config.epsilon);
    if !(alpha > 0.0 && alpha < 1.0 && lambda > 0.0 && eps > 0.0 && eps < 1.0) {
        return f64::NEG_INFINITY;
    }
    let (ln_eps, ln_not_eps) = (eps.ln(), (-eps).ln_1p());
    let mut lp = (hyper.a - 1.0) * alpha.ln() + (hyper.b - 1.0) * (-alpha).ln_1p();
    lp += (hyper.c - 1.0) * lambda.ln() - hyper.d * lambda;
    lp += (hyper.h - 1.0) * ln_eps + (hyper.g - 1.0) * ln_not_eps;
    let ln_beta = hyper.beta.ln();
    for (&d, &e) in config.delta.iter().zip(&config.eta).skip(1) {
        lp += if d { ln_eps } else { ln_not_eps };
        lp += -hyper.beta + xlogy(e, ln_beta) - ln_factorial(e);
    }
    lp
}

/// Log joint posterior kernel: prior plus conditional likelihood.
pub fn log_posterior(
    series: &CountSeries,
    params: &InarParams,
    config: &LatentConfig,
    hyper: &Hyperparams,
) -> f64 {
    let prior = log_prior(params, config, hyper);
    if prior == f64::NEG_INFINITY {
        return prior;
    }
    prior + conditional_log_likelihood(series, params, config)
}
