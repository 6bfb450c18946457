//! The Poisson INAR(1) process, `X_t = α ∘ X_{t-1} + e_t`, with binomial
//! thinning `∘` and Poisson(λ) innovations, plus additive-outlier
//! contamination of an observed path.
//!
//! Times are 1-based wherever an API says "time"; slice positions are
//! 0-based and called "index".

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{binomial_ln_pmf, log_sum_exp, poisson_ln_pmf};

/// An observed or latent count series of length at least two.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct CountSeries(Vec<u64>);

impl CountSeries {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSeries(format!(
                "need at least 2 observations, got {}",
                values.len()
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Value at 1-based `time`.
    pub fn at(&self, time: usize) -> u64 {
        self.0[time - 1]
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<u64>() as f64 / self.0.len() as f64
    }
}

impl TryFrom<Vec<u64>> for CountSeries {
    type Error = Error;

    fn try_from(values: Vec<u64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<CountSeries> for Vec<u64> {
    fn from(series: CountSeries) -> Self {
        series.0
    }
}

impl AsRef<[u64]> for CountSeries {
    fn as_ref(&self) -> &[u64] {
        &self.0
    }
}

/// Thinning probability `alpha ∈ [0, 1]` and innovation mean `lambda > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InarParams {
    alpha: f64,
    lambda: f64,
}

impl InarParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        Ok(Self { alpha, lambda })
    }

    /// Skips validation; callers inside the samplers guarantee the support.
    pub(crate) fn new_unchecked(alpha: f64, lambda: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&alpha) && lambda > 0.0);
        Self { alpha, lambda }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Mean of the stationary Poisson marginal, `λ / (1 - α)`; `None` when α = 1.
    pub fn stationary_mean(&self) -> Option<f64> {
        (self.alpha < 1.0).then(|| self.lambda / (1.0 - self.alpha))
    }
}

/// A single additive outlier: `size` added to the observation at `time`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outlier {
    pub time: usize,
    pub size: u64,
}

/// A set of additive outliers at distinct times `>= 2`, kept sorted by time.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contamination {
    outliers: Vec<Outlier>,
}

impl Contamination {
    pub fn new(mut outliers: Vec<Outlier>) -> Result<Self> {
        outliers.sort_by_key(|o| o.time);
        for o in &outliers {
            if o.time <= 1 {
                return Err(Error::OutlierAtFirstObservation);
            }
            if o.size == 0 {
                return Err(Error::InvalidParameter(format!(
                    "outlier at time {} must have size >= 1",
                    o.time
                )));
            }
        }
        if let Some(w) = outliers.windows(2).find(|w| w[0].time == w[1].time) {
            return Err(Error::InvalidParameter(format!(
                "duplicate outlier time {}",
                w[0].time
            )));
        }
        Ok(Self { outliers })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn outliers(&self) -> &[Outlier] {
        &self.outliers
    }

    pub fn is_empty(&self) -> bool {
        self.outliers.is_empty()
    }
}

/// How the first value of a simulated path is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Initialization {
    /// Draw from the stationary Poisson(λ / (1 - α)) marginal.
    #[default]
    Stationary,
    Fixed(u64),
}

/// `α ∘ x`: the number of successes among `x` independent Bernoulli(α) trials.
pub fn binomial_thin<R: Rng + ?Sized>(x: u64, alpha: f64, rng: &mut R) -> u64 {
    if alpha <= 0.0 {
        return 0;
    }
    if alpha >= 1.0 {
        return x;
    }
    (0..x).filter(|_| rng.random_bool(alpha)).count() as u64
}

/// `ln P(X_t = x_curr | X_{t-1} = x_prev)`: the convolution of a
/// Binomial(x_prev, α) survivor count with a Poisson(λ) arrival count.
pub fn transition_log_pmf(x_prev: u64, x_curr: u64, params: &InarParams) -> f64 {
    let (alpha, lambda) = (params.alpha, params.lambda);
    if x_prev == 0 || alpha == 0.0 {
        return poisson_ln_pmf(x_curr, lambda);
    }
    if alpha == 1.0 {
        return if x_curr >= x_prev {
            poisson_ln_pmf(x_curr - x_prev, lambda)
        } else {
            f64::NEG_INFINITY
        };
    }
    let m = x_prev.min(x_curr);
    // Small supports dominate in practice; avoid the heap for them.
    let mut buf = [0.0f64; 32];
    let mut heap;
    let terms: &mut [f64] = if (m as usize) < buf.len() {
        &mut buf[..=m as usize]
    } else {
        heap = vec![0.0; m as usize + 1];
        &mut heap
    };
    for (i, slot) in terms.iter_mut().enumerate() {
        let i = i as u64;
        *slot = binomial_ln_pmf(i, x_prev, alpha) + poisson_ln_pmf(x_curr - i, lambda);
    }
    log_sum_exp(terms)
}

/// Simulates `n` observations of the INAR(1) process.
pub fn simulate<R: Rng + ?Sized>(
    params: &InarParams,
    n: usize,
    init: Initialization,
    rng: &mut R,
) -> Result<CountSeries> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "series length must be >= 2, got {n}"
        )));
    }
    let innovations = Poisson::new(params.lambda)
        .map_err(|e| Error::InvalidParameter(format!("innovation mean: {e}")))?;
    let first = match init {
        Initialization::Fixed(x) => x,
        Initialization::Stationary => {
            let mean = params.stationary_mean().ok_or(Error::NonStationary)?;
            Poisson::new(mean)
                .map_err(|e| Error::InvalidParameter(format!("stationary mean: {e}")))?
                .sample(rng) as u64
        }
    };
    let mut values = Vec::with_capacity(n);
    values.push(first);
    for t in 1..n {
        let survivors = binomial_thin(values[t - 1], params.alpha, rng);
        values.push(survivors + innovations.sample(rng) as u64);
    }
    CountSeries::new(values)
}

/// Adds each outlier's size to the observation at its time.
pub fn contaminate(series: &CountSeries, contamination: &Contamination) -> Result<CountSeries> {
    let mut values = series.values().to_vec();
    for o in contamination.outliers() {
        if o.time <= 1 {
            return Err(Error::OutlierAtFirstObservation);
        }
        if o.time > values.len() {
            return Err(Error::OutlierOutOfRange {
                time: o.time,
                len: values.len(),
            });
        }
        values[o.time - 1] += o.size;
    }
    CountSeries::new(values)
}

/// Recovers the latent series `X_t = Y_t - η_t δ_t`.
///
/// `delta` and `eta` are indexed like the series; position 0 must not be
/// flagged.
pub fn decontaminate(series: &CountSeries, delta: &[bool], eta: &[u64]) -> Result<CountSeries> {
    let y = series.values();
    if delta.len() != y.len() || eta.len() != y.len() {
        return Err(Error::InvalidParameter(format!(
            "indicator/size vectors must have length {}, got {} and {}",
            y.len(),
            delta.len(),
            eta.len()
        )));
    }
    if delta[0] {
        return Err(Error::OutlierAtFirstObservation);
    }
    let values = y
        .iter()
        .zip(delta.iter().zip(eta))
        .enumerate()
        .map(|(i, (&obs, (&flag, &size)))| {
            if !flag {
                Ok(obs)
            } else {
                obs.checked_sub(size).ok_or(Error::NegativeLatentCount {
                    time: i + 1,
                    observed: obs,
                    size,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    CountSeries::new(values)
}

/// Draws `count` distinct outlier times uniformly from `2..=n`, sorted.
pub fn random_outlier_times<R: Rng + ?Sized>(
    n: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if count > n.saturating_sub(1) {
        return Err(Error::InvalidParameter(format!(
            "cannot place {count} outliers in times 2..={n}"
        )));
    }
    let mut times: Vec<usize> = rand::seq::index::sample(rng, n - 1, count)
        .into_iter()
        .map(|i| i + 2)
        .collect();
    times.sort_unstable();
    Ok(times)
}
