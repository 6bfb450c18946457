//! Gibbs sampler for the contaminated INAR(1) model.
//!
//! Each sweep draws α and λ with ARMS, then visits `t = 2..n` in order
//! updating the pair `(δ_t, η_t)`, and finally draws ε from its Beta
//! conditional. After `burn_in` sweeps, every `thin`-th of the next
//! `iterations` sweeps is retained.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arms::{arms_draw, Domain};
use crate::cls::{cls_fit, ClsFit};
use crate::conditionals::{
    delta_probability, epsilon_draw, eta_conditional_pmf, eta_log_weights, local_log_likelihood,
    normalize_log_weights, sample_discrete, sample_poisson, AlphaKernel, LambdaKernel,
    OutlierProbability,
};
use crate::error::{Error, Result};
use crate::math::{log_add_exp, log_sum_exp};
use crate::posterior::{Hyperparams, LatentConfig};
use crate::process::{CountSeries, InarParams};

/// How the prior mean β of the outlier sizes is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaMode {
    /// Use `Hyperparams::beta` as given (30 by default).
    #[default]
    NonInformative,
    /// Three times the standard deviation of the CLS one-step residuals.
    Informative,
}

/// How each `(δ_t, η_t)` pair is refreshed during a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SiteUpdate {
    /// Draw δ_t given the current η_t, then η_t given δ_t.
    #[default]
    SingleSite,
    /// Draw δ_t with η_t summed out against its prior, then η_t given δ_t.
    Blocked,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GibbsConfig {
    pub burn_in: usize,
    /// Sweeps after burn-in.
    pub iterations: usize,
    pub thin: usize,
    pub seed: u64,
    pub hyper: Hyperparams,
    /// Times with posterior outlier probability strictly above this are flagged.
    pub threshold: f64,
    pub beta_mode: BetaMode,
    pub site_update: SiteUpdate,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        Self {
            burn_in: 2500,
            iterations: 2500,
            thin: 5,
            seed: 0,
            hyper: Hyperparams::default(),
            threshold: 0.5,
            beta_mode: BetaMode::NonInformative,
            site_update: SiteUpdate::SingleSite,
        }
    }
}

impl GibbsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(Error::InvalidConfig("thin must be >= 1".into()));
        }
        if self.iterations < self.thin {
            return Err(Error::InvalidConfig(format!(
                "iterations ({}) must be >= thin ({})",
                self.iterations, self.thin
            )));
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "threshold must lie in (0, 1], got {}",
                self.threshold
            )));
        }
        self.hyper.validate()
    }

    /// Number of draws a chain keeps: `floor(iterations / thin)`.
    pub fn retained(&self) -> usize {
        self.iterations / self.thin
    }
}

/// `3 · sd` of the CLS one-step prediction errors of `series`.
pub fn compute_beta_info(series: &CountSeries, cls: &ClsFit) -> Result<f64> {
    let residuals = cls.residuals(series);
    let m = residuals.len();
    if m < 2 {
        return Err(Error::DegenerateSeries(
            "too few residuals for a variance".into(),
        ));
    }
    let mean = residuals.iter().sum::<f64>() / m as f64;
    let var = residuals.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    let beta = 3.0 * var.sqrt();
    if !(beta > 1e-12 && beta.is_finite()) {
        return Err(Error::DegenerateSeries(format!(
            "prediction-error standard deviation is zero; informative beta would be {beta}"
        )));
    }
    Ok(beta)
}

/// One full parameter block of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub params: InarParams,
    pub latent: LatentConfig,
}

/// Retained draws of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    pub series: CountSeries,
    pub initial_cls: ClsFit,
    /// Prior mean of the outlier sizes actually used.
    pub beta: f64,
    pub alpha: Vec<f64>,
    pub lambda: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub delta: Vec<Vec<bool>>,
    pub eta: Vec<Vec<u64>>,
    /// Per-position mean of the retained δ draws.
    pub delta_mean: Vec<f64>,
    /// ARMS draws that exhausted the rejection budget.
    pub arms_fallbacks: usize,
}

impl ChainTrace {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    fn push(&mut self, state: &ChainState) {
        self.alpha.push(state.params.alpha());
        self.lambda.push(state.params.lambda());
        self.epsilon.push(state.latent.epsilon);
        self.delta.push(state.latent.delta.clone());
        self.eta.push(state.latent.eta.clone());
    }
}

/// A running chain. Most callers want [`run_chain`].
pub struct GibbsSampler {
    y: Vec<u64>,
    hyper: Hyperparams,
    site_update: SiteUpdate,
    state: ChainState,
    latent: Vec<u64>,
    rng: ChaCha8Rng,
    arms_fallbacks: usize,
}

impl GibbsSampler {
    /// Starts from the clamped CLS fit, no outliers, sizes drawn from the
    /// size prior, and ε at its prior mean.
    pub fn new(
        series: &CountSeries,
        config: &GibbsConfig,
        cls: &ClsFit,
        beta: f64,
    ) -> Result<Self> {
        let hyper = config.hyper.with_beta(beta);
        hyper.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let y = series.values().to_vec();
        let n = y.len();
        let mut eta = vec![0; n];
        for e in eta.iter_mut().skip(1) {
            *e = sample_poisson(beta, &mut rng);
        }
        let state = ChainState {
            params: cls.initial_params(),
            latent: LatentConfig {
                delta: vec![false; n],
                eta,
                epsilon: hyper.epsilon_prior_mean(),
            },
        };
        Ok(Self {
            latent: y.clone(),
            y,
            hyper,
            site_update: config.site_update,
            state,
            rng,
            arms_fallbacks: 0,
        })
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    /// Latent series `Y - ηδ` of the current state.
    pub fn latent_series(&self) -> &[u64] {
        &self.latent
    }

    pub fn sweep(&mut self) -> Result<()> {
        self.update_alpha()?;
        self.update_lambda()?;
        for j in 1..self.y.len() {
            self.update_site(j);
        }
        self.state.latent.epsilon =
            epsilon_draw(&self.state.latent.delta, &self.hyper, &mut self.rng);
        debug_assert!(
            self.state.latent.latent_series(&self.y).as_deref() == Some(&self.latent[..])
        );
        Ok(())
    }

    fn update_alpha(&mut self) -> Result<()> {
        let lambda = self.state.params.lambda();
        let kernel = AlphaKernel::new(&self.latent, lambda, &self.hyper);
        let domain = Domain::unit();
        let draw = arms_draw(
            |a| kernel.log_density(a),
            domain,
            &domain.default_abscissae(),
            self.state.params.alpha(),
            &mut self.rng,
        )?;
        self.arms_fallbacks += draw.fallback as usize;
        self.state.params = InarParams::new_unchecked(draw.value, lambda);
        Ok(())
    }

    fn update_lambda(&mut self) -> Result<()> {
        let alpha = self.state.params.alpha();
        let current = self.state.params.lambda();
        let kernel = LambdaKernel::new(&self.latent, alpha, &self.hyper);
        let domain = Domain::positive_from(current);
        let draw = arms_draw(
            |l| kernel.log_density(l),
            domain,
            &domain.default_abscissae(),
            current,
            &mut self.rng,
        )?;
        self.arms_fallbacks += draw.fallback as usize;
        self.state.params = InarParams::new_unchecked(alpha, draw.value);
        Ok(())
    }

    fn update_site(&mut self, j: usize) {
        let params = self.state.params;
        let beta = self.hyper.beta;
        let latent = &mut self.state.latent;
        let is_outlier = match self.site_update {
            SiteUpdate::Blocked => {
                let log_w = eta_log_weights(&self.y, &params, latent, j, beta);
                let next = self.latent.get(j + 1).copied();
                let ll_clean = local_log_likelihood(self.latent[j - 1], self.y[j], next, &params);
                let ln_num = latent.epsilon.ln() + log_sum_exp(&log_w);
                let ln_den = log_add_exp(ln_num, (-latent.epsilon).ln_1p() + ll_clean);
                let p = if ln_num == f64::NEG_INFINITY {
                    0.0
                } else {
                    (ln_num - ln_den).exp()
                };
                let flag = self.rng.random::<f64>() < p;
                latent.delta[j] = flag;
                latent.eta[j] = if flag {
                    sample_discrete(&normalize_log_weights(&log_w), &mut self.rng)
                } else {
                    sample_poisson(beta, &mut self.rng)
                };
                flag
            }
            SiteUpdate::SingleSite => {
                let p = delta_probability(&self.y, &params, latent, j).p;
                let flag = self.rng.random::<f64>() < p;
                latent.delta[j] = flag;
                latent.eta[j] =
                    eta_conditional_pmf(&self.y, &params, latent, j, beta).sample(&mut self.rng);
                flag
            }
        };
        self.latent[j] = if is_outlier {
            self.y[j] - latent.eta[j]
        } else {
            self.y[j]
        };
    }
}

/// Runs one chain: `burn_in + iterations` sweeps, keeping every `thin`-th
/// state after burn-in. Fully determined by `config.seed`.
pub fn run_chain(series: &CountSeries, config: &GibbsConfig) -> Result<ChainTrace> {
    config.validate()?;
    let cls = cls_fit(series)?;
    let beta = match config.beta_mode {
        BetaMode::NonInformative => config.hyper.beta,
        BetaMode::Informative => compute_beta_info(series, &cls)?,
    };
    let mut sampler = GibbsSampler::new(series, config, &cls, beta)?;
    let keep = config.retained();
    let n = series.len();
    let mut trace = ChainTrace {
        series: series.clone(),
        initial_cls: cls,
        beta,
        alpha: Vec::with_capacity(keep),
        lambda: Vec::with_capacity(keep),
        epsilon: Vec::with_capacity(keep),
        delta: Vec::with_capacity(keep),
        eta: Vec::with_capacity(keep),
        delta_mean: vec![0.0; n],
        arms_fallbacks: 0,
    };
    for _ in 0..config.burn_in {
        sampler.sweep()?;
    }
    for it in 1..=keep * config.thin {
        sampler.sweep()?;
        if it % config.thin == 0 {
            trace.push(sampler.state());
        }
    }
    for draw in &trace.delta {
        for (m, &d) in trace.delta_mean.iter_mut().zip(draw) {
            *m += d as u8 as f64;
        }
    }
    let retained = trace.len().max(1) as f64;
    trace.delta_mean.iter_mut().for_each(|m| *m /= retained);
    trace.arms_fallbacks = sampler.arms_fallbacks;
    Ok(trace)
}

/// Runs `chains` independent chains on separate threads, seeded
/// `config.seed, config.seed + 1, ...`.
pub fn run_chains(
    series: &CountSeries,
    config: &GibbsConfig,
    chains: usize,
) -> Result<Vec<ChainTrace>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..chains as u64)
            .map(|i| {
                let cfg = GibbsConfig {
                    seed: config.seed.wrapping_add(i),
                    ..*config
                };
                scope.spawn(move || run_chain(series, &cfg))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("chain thread panicked"))
            .collect()
    })
}

/// Concatenates the retained draws of chains run on the same series. Draws
/// are appended chain by chain, never interleaved; the initial CLS fit and
/// β are taken from the first chain.
pub fn pool_traces(traces: &[ChainTrace]) -> Result<ChainTrace> {
    let Some(first) = traces.first() else {
        return Err(Error::EmptyTrace);
    };
    if traces.iter().any(|t| t.series != first.series) {
        return Err(Error::InvalidConfig(
            "cannot pool chains run on different series".into(),
        ));
    }
    let mut pooled = ChainTrace {
        alpha: Vec::new(),
        lambda: Vec::new(),
        epsilon: Vec::new(),
        delta: Vec::new(),
        eta: Vec::new(),
        delta_mean: vec![0.0; first.series.len()],
        arms_fallbacks: 0,
        ..first.clone()
    };
    for t in traces {
        pooled.alpha.extend_from_slice(&t.alpha);
        pooled.lambda.extend_from_slice(&t.lambda);
        pooled.epsilon.extend_from_slice(&t.epsilon);
        pooled.delta.extend(t.delta.iter().cloned());
        pooled.eta.extend(t.eta.iter().cloned());
        pooled.arms_fallbacks += t.arms_fallbacks;
        for (m, &d) in pooled.delta_mean.iter_mut().zip(&t.delta_mean) {
            *m += d * t.len() as f64;
        }
    }
    let total = pooled.len().max(1) as f64;
    pooled.delta_mean.iter_mut().for_each(|m| *m /= total);
    Ok(pooled)
}

/// Geweke-style comparison of the first 10% and last 50% of a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GewekeDiagnostic {
    pub parameter: String,
    /// `None` when either window has zero variance.
    pub z: Option<f64>,
}

pub fn geweke_z(draws: &[f64]) -> Option<f64> {
    let n = draws.len();
    let (na, nb) = (n / 10, n / 2);
    if na < 2 || nb < 2 {
        return None;
    }
    let stats = |w: &[f64]| {
        let m = w.iter().sum::<f64>() / w.len() as f64;
        let v = w.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (w.len() - 1) as f64;
        (m, v / w.len() as f64)
    };
    let (ma, va) = stats(&draws[..na]);
    let (mb, vb) = stats(&draws[n - nb..]);
    let se = (va + vb).sqrt();
    (se > 0.0).then(|| (ma - mb) / se)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlaggedOutlier {
    /// 1-based time.
    pub time: usize,
    pub probability: f64,
    /// Rounded posterior mean size over the draws that flag this time.
    pub size: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub threshold: f64,
    /// Posterior outlier probability per position; position 0 is always 0.
    pub p_hat: Vec<f64>,
    pub flagged: Vec<FlaggedOutlier>,
    pub alpha_hat: f64,
    pub lambda_hat: f64,
    pub epsilon_hat: f64,
    pub cleaned_series: CountSeries,
    pub retained: usize,
    pub convergence: Vec<GewekeDiagnostic>,
}

impl DetectionReport {
    /// `(time, p_hat)` for times `2..=n`.
    pub fn probabilities(&self) -> Vec<OutlierProbability> {
        self.p_hat
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &p)| OutlierProbability { time: i + 1, p })
            .collect()
    }

    pub fn flagged_times(&self) -> Vec<usize> {
        self.flagged.iter().map(|f| f.time).collect()
    }

    pub fn size_at(&self, time: usize) -> Option<u64> {
        self.flagged.iter().find(|f| f.time == time).map(|f| f.size)
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Posterior means, per-time outlier probabilities, and the `p̂ > threshold`
/// detection rule.
pub fn summarize(trace: &ChainTrace, threshold: f64) -> Result<DetectionReport> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let y = trace.series.values();
    let n = y.len();
    let draws = trace.len();
    let mut p_hat = vec![0.0; n];
    let mut size_sum = vec![0u64; n];
    for (delta, eta) in trace.delta.iter().zip(&trace.eta) {
        for t in 1..n {
            if delta[t] {
                p_hat[t] += 1.0;
                size_sum[t] += eta[t];
            }
        }
    }
    let mut flagged = Vec::new();
    let mut cleaned = y.to_vec();
    for t in 1..n {
        let hits = p_hat[t];
        p_hat[t] /= draws as f64;
        if p_hat[t] > threshold {
            let size = (size_sum[t] as f64 / hits).round() as u64;
            // A zero-size outlier leaves the observation unchanged.
            let size = size.max(1).min(y[t]);
            if size == 0 {
                continue;
            }
            cleaned[t] -= size;
            flagged.push(FlaggedOutlier {
                time: t + 1,
                probability: p_hat[t],
                size,
            });
        }
    }
    let convergence = [
        ("alpha", &trace.alpha),
        ("lambda", &trace.lambda),
        ("epsilon", &trace.epsilon),
    ]
    .into_iter()
    .map(|(name, d)| GewekeDiagnostic {
        parameter: name.into(),
        z: geweke_z(d),
    })
    .collect();
    Ok(DetectionReport {
        threshold,
        p_hat,
        flagged,
        alpha_hat: mean(&trace.alpha),
        lambda_hat: mean(&trace.lambda),
        epsilon_hat: mean(&trace.epsilon),
        cleaned_series: CountSeries::new(cleaned)?,
        retained: draws,
        convergence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{simulate, Initialization};

    fn small_config(seed: u64) -> GibbsConfig {
        GibbsConfig {
            burn_in: 50,
            iterations: 100,
            thin: 5,
            seed,
            ..GibbsConfig::default()
        }
    }

    fn series(seed: u64, alpha: f64, lambda: f64, n: usize) -> CountSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        simulate(
            &InarParams::new(alpha, lambda).unwrap(),
            n,
            Initialization::Stationary,
            &mut rng,
        )
        .unwrap()
    }

    fn fake_trace(delta: Vec<Vec<bool>>, eta: Vec<Vec<u64>>, y: Vec<u64>) -> ChainTrace {
        let draws = delta.len();
        ChainTrace {
            series: CountSeries::new(y).unwrap(),
            initial_cls: ClsFit {
                alpha_hat: 0.5,
                lambda_hat: 1.0,
                residual_variance: 1.0,
            },
            beta: 30.0,
            alpha: vec![0.5; draws],
            lambda: vec![1.0; draws],
            epsilon: vec![0.05; draws],
            delta,
            eta,
            delta_mean: Vec::new(),
            arms_fallbacks: 0,
        }
    }

    #[test]
    fn config_validation() {
        assert!(GibbsConfig::default().validate().is_ok());
        assert!(GibbsConfig {
            thin: 0,
            ..GibbsConfig::default()
        }
        .validate()
        .is_err());
        assert!(GibbsConfig {
            iterations: 3,
            thin: 5,
            ..GibbsConfig::default()
        }
        .validate()
        .is_err());
        assert!(GibbsConfig {
            threshold: 0.0,
            ..GibbsConfig::default()
        }
        .validate()
        .is_err());
        assert!(GibbsConfig {
            threshold: 1.0,
            ..GibbsConfig::default()
        }
        .validate()
        .is_ok());
        assert_eq!(GibbsConfig::default().retained(), 500);
        assert_eq!(
            GibbsConfig {
                iterations: 12,
                thin: 5,
                ..GibbsConfig::default()
            }
            .retained(),
            2
        );
    }

    #[test]
    fn single_retained_draw_when_iterations_equal_thin() {
        let y = series(1, 0.5, 1.0, 30);
        let cfg = GibbsConfig {
            burn_in: 5,
            iterations: 7,
            thin: 7,
            ..GibbsConfig::default()
        };
        let trace = run_chain(&y, &cfg).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.delta.len(), 1);
    }

    #[test]
    fn same_seed_same_trace() {
        let y = series(2, 0.85, 1.0, 40);
        let a = run_chain(&y, &small_config(7)).unwrap();
        let b = run_chain(&y, &small_config(7)).unwrap();
        assert_eq!(a, b);
        let c = run_chain(&y, &small_config(8)).unwrap();
        assert_ne!(a.alpha, c.alpha);
    }

    #[test]
    fn retained_states_are_feasible() {
        let mut y = series(3, 0.5, 2.0, 60).into_vec();
        y[20] += 15;
        let y = CountSeries::new(y).unwrap();
        for site_update in [SiteUpdate::Blocked, SiteUpdate::SingleSite] {
            let trace = run_chain(
                &y,
                &GibbsConfig {
                    site_update,
                    ..small_config(3)
                },
            )
            .unwrap();
            for (delta, eta) in trace.delta.iter().zip(&trace.eta) {
                for t in 0..y.len() {
                    assert!(!delta[t] || eta[t] <= y.values()[t]);
                }
                assert!(!delta[0]);
            }
            assert!(trace.alpha.iter().all(|&a| a > 0.0 && a < 1.0));
            assert!(trace.lambda.iter().all(|&l| l > 0.0));
        }
    }

    #[test]
    fn constant_series_fails_initialization() {
        let y = CountSeries::new(vec![2; 20]).unwrap();
        assert!(matches!(
            run_chain(&y, &small_config(0)),
            Err(Error::DegenerateSeries(_))
        ));
    }

    #[test]
    fn informative_beta() {
        let y = series(4, 0.0, 3.0, 10_000);
        let cls = cls_fit(&y).unwrap();
        let beta = compute_beta_info(&y, &cls).unwrap();
        assert!((beta - 3.0 * 3f64.sqrt()).abs() < 0.3, "{beta}");
        let flat = CountSeries::new([2, 1].repeat(10)).unwrap();
        let cls = cls_fit(&flat).unwrap();
        assert!(matches!(
            compute_beta_info(&flat, &cls),
            Err(Error::DegenerateSeries(_))
        ));
        assert_eq!(GibbsConfig::default().hyper.beta, 30.0);
    }

    #[test]
    fn summarize_without_flags() {
        let y = vec![1, 2, 3, 2];
        let trace = fake_trace(vec![vec![false; 4]; 10], vec![vec![5; 4]; 10], y.clone());
        let r = summarize(&trace, 0.5).unwrap();
        assert!(r.flagged.is_empty());
        assert!(r.p_hat.iter().all(|&p| p == 0.0));
        assert_eq!(r.cleaned_series.values(), &y[..]);
    }

    #[test]
    fn summarize_counts_and_sizes() {
        let y = vec![1, 2, 12, 2];
        let mut delta = Vec::new();
        let mut eta = Vec::new();
        for i in 0..500 {
            let on = i < 400;
            delta.push(vec![false, false, on, false]);
            // conditional on δ = 1 the sizes average 9.5; the others are prior noise
            eta.push(vec![0, 30, if on { 9 + (i % 2) as u64 } else { 40 }, 25]);
        }
        let r = summarize(&fake_trace(delta, eta, y), 0.5).unwrap();
        assert!((r.p_hat[2] - 0.8).abs() < 1e-15);
        assert_eq!(r.flagged_times(), vec![3]);
        assert_eq!(r.size_at(3), Some(10));
        assert_eq!(r.cleaned_series.values(), &[1, 2, 2, 2]);
    }

    #[test]
    fn threshold_ties_are_not_flagged() {
        let delta: Vec<Vec<bool>> = (0..10).map(|i| vec![false, i % 2 == 0, false]).collect();
        let trace = fake_trace(delta, vec![vec![0, 3, 0]; 10], vec![1, 5, 1]);
        assert!(summarize(&trace, 0.5).unwrap().flagged.is_empty());
        assert_eq!(summarize(&trace, 0.4).unwrap().flagged_times(), vec![2]);
    }

    #[test]
    fn pooling_appends_chains() {
        let y = vec![1, 5, 1];
        let mut a = fake_trace(
            vec![vec![false, true, false]; 3],
            vec![vec![0, 4, 0]; 3],
            y.clone(),
        );
        let mut b = fake_trace(vec![vec![false; 3]; 1], vec![vec![0, 9, 0]; 1], y.clone());
        b.alpha = vec![0.9];
        a.delta_mean = vec![0.0, 1.0, 0.0];
        b.delta_mean = vec![0.0; 3];
        let pooled = pool_traces(&[a, b]).unwrap();
        assert_eq!(pooled.len(), 4);
        assert_eq!(pooled.alpha, vec![0.5, 0.5, 0.5, 0.9]);
        assert!((pooled.delta_mean[1] - 0.75).abs() < 1e-15);
        let other = fake_trace(vec![vec![false; 3]], vec![vec![0; 3]], vec![1, 2, 3]);
        assert!(pool_traces(&[pooled, other]).is_err());
        assert_eq!(pool_traces(&[]), Err(Error::EmptyTrace));
    }

    #[test]
    fn empty_trace_is_an_error() {
        let trace = fake_trace(Vec::new(), Vec::new(), vec![1, 2]);
        assert_eq!(summarize(&trace, 0.5), Err(Error::EmptyTrace));
    }

    #[test]
    fn geweke_on_stationary_noise_is_moderate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..1000).map(|_| rng.random::<f64>()).collect();
        let z = geweke_z(&xs).unwrap();
        assert!(z.abs() < 4.0);
        let drift: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert!(geweke_z(&drift).unwrap().abs() > 10.0);
        assert_eq!(geweke_z(&[1.0; 100]), None);
    }

    #[test]
    fn multiple_chains_use_distinct_seeds() {
        let y = series(6, 0.5, 1.0, 30);
        let traces = run_chains(&y, &small_config(10), 3).unwrap();
        assert_eq!(traces.len(), 3);
        assert_eq!(traces[1], run_chain(&y, &small_config(11)).unwrap());
        assert_ne!(traces[0].alpha, traces[1].alpha);
    }
}
