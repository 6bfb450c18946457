//! Descriptive statistics for model identification: moments, sample ACF and
//! PACF.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::CountSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub mean: f64,
    /// Sample variance with the `n - 1` denominator.
    pub variance: f64,
    /// `variance / mean`; 1 for an equidispersed (Poisson) marginal.
    pub dispersion_index: f64,
    /// `acf[k]` for lags `0..=max_lag`; `acf[0] = 1`.
    pub acf: Vec<f64>,
    /// `pacf[k]` for lags `0..=max_lag`; `pacf[0] = 1` by convention.
    pub pacf: Vec<f64>,
}

impl SeriesSummary {
    /// Approximate 95% white-noise band, `2 / sqrt(n)`.
    pub fn white_noise_band(n: usize) -> f64 {
        2.0 / (n as f64).sqrt()
    }
}

pub fn summarize_series(series: &CountSeries, max_lag: usize) -> Result<SeriesSummary> {
    let x: Vec<f64> = series.values().iter().map(|&v| v as f64).collect();
    let n = x.len();
    if max_lag == 0 || 2 * max_lag >= n {
        return Err(Error::InvalidParameter(format!(
            "max_lag must satisfy 0 < max_lag < n/2 (n = {n}), got {max_lag}"
        )));
    }
    let acf = sample_acf(&x, max_lag)?;
    let pacf = durbin_levinson(&acf);
    let mean = x.iter().sum::<f64>() / n as f64;
    let variance = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let dispersion_index = if mean > 0.0 {
        variance / mean
    } else {
        f64::NAN
    };
    Ok(SeriesSummary {
        mean,
        variance,
        dispersion_index,
        acf,
        pacf,
    })
}

/// Sample autocorrelations with the biased `1/n` autocovariance estimator.
pub fn sample_acf(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let autocov = |k: usize| -> f64 {
        centered[..n - k]
            .iter()
            .zip(&centered[k..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64
    };
    let c0 = autocov(0);
    if c0 == 0.0 {
        return Err(Error::DegenerateSeries(
            "constant series has undefined autocorrelation".into(),
        ));
    }
    Ok((0..=max_lag.min(n - 1)).map(|k| autocov(k) / c0).collect())
}

/// Partial autocorrelations from an autocorrelation sequence.
pub fn durbin_levinson(acf: &[f64]) -> Vec<f64> {
    let max_lag = acf.len().saturating_sub(1);
    let mut pacf = vec![1.0; max_lag + 1];
    let mut phi: Vec<f64> = Vec::with_capacity(max_lag);
    let mut v = 1.0;
    for k in 1..=max_lag {
        let num = acf[k]
            - phi
                .iter()
                .enumerate()
                .map(|(j, p)| p * acf[k - 1 - j])
                .sum::<f64>();
        let kk = if v > 0.0 { num / v } else { 0.0 };
        let next: Vec<f64> = phi
            .iter()
            .enumerate()
            .map(|(j, p)| p - kk * phi[k - 2 - j])
            .chain(std::iter::once(kk))
            .collect();
        phi = next;
        v *= 1.0 - kk * kk;
        pacf[k] = kk;
    }
    pacf
}
