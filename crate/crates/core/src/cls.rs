//! Conditional least squares for INAR(1): regress `X_t` on `X_{t-1}` with
//! slope α and intercept λ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs::DetectionReport;
use crate::process::{decontaminate, CountSeries, InarParams};

const ALPHA_CLAMP: (f64, f64) = (0.01, 0.99);
const LAMBDA_FLOOR: f64 = 0.01;

/// Raw CLS estimates. `alpha_hat` and `lambda_hat` are not clamped and can
/// leave the parameter space on pathological series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClsFit {
    pub alpha_hat: f64,
    pub lambda_hat: f64,
    /// Mean squared one-step residual.
    pub residual_variance: f64,
}

impl ClsFit {
    /// Interior starting point for a sampler: α clamped to [0.01, 0.99],
    /// λ floored at 0.01.
    pub fn initial_params(&self) -> InarParams {
        let alpha = self.alpha_hat.clamp(ALPHA_CLAMP.0, ALPHA_CLAMP.1);
        let lambda = if self.lambda_hat.is_finite() {
            self.lambda_hat.max(LAMBDA_FLOOR)
        } else {
            LAMBDA_FLOOR
        };
        InarParams::new_unchecked(alpha, lambda)
    }

    /// One-step residuals `x_t - α̂ x_{t-1} - λ̂` for `t = 2..n`.
    pub fn residuals(&self, series: &CountSeries) -> Vec<f64> {
        series
            .values()
            .windows(2)
            .map(|w| w[1] as f64 - self.alpha_hat * w[0] as f64 - self.lambda_hat)
            .collect()
    }
}

pub fn cls_fit(series: &CountSeries) -> Result<ClsFit> {
    let x = series.values();
    if x.len() < 3 {
        return Err(Error::InvalidSeries(format!(
            "CLS needs at least 3 observations, got {}",
            x.len()
        )));
    }
    let m = (x.len() - 1) as f64;
    let (prev, curr) = (&x[..x.len() - 1], &x[1..]);
    let mean_prev = prev.iter().sum::<u64>() as f64 / m;
    let mean_curr = curr.iter().sum::<u64>() as f64 / m;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&p, &c) in prev.iter().zip(curr) {
        let dp = p as f64 - mean_prev;
        sxx += dp * dp;
        sxy += dp * (c as f64 - mean_curr);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateSeries(
            "lagged values are constant, CLS slope is undefined".into(),
        ));
    }
    let alpha_hat = sxy / sxx;
    let lambda_hat = mean_curr - alpha_hat * mean_prev;
    let rss: f64 = prev
        .iter()
        .zip(curr)
        .map(|(&p, &c)| (c as f64 - alpha_hat * p as f64 - lambda_hat).powi(2))
        .sum();
    Ok(ClsFit {
        alpha_hat,
        lambda_hat,
        residual_variance: rss / m,
    })
}

/// Subtracts the reported outlier sizes at flagged times and refits.
pub fn remove_outliers_and_refit(series: &CountSeries, report: &DetectionReport) -> Result<ClsFit> {
    let n = series.len();
    let mut delta = vec![false; n];
    let mut eta = vec![0; n];
    for f in &report.flagged {
        if f.time == 0 || f.time > n {
            return Err(Error::OutlierOutOfRange {
                time: f.time,
                len: n,
            });
        }
        delta[f.time - 1] = true;
        eta[f.time - 1] = f.size;
    }
    cls_fit(&decontaminate(series, &delta, &eta)?)
}
