//! Rendering of reports and plot-ready data files.

use std::fmt::Write as _;

use inarao_core::{
    ChainTrace, ClsFit, CountSeries, DetectionReport, GewekeDiagnostic, GibbsConfig, InarParams,
    Outlier, SeriesSummary,
};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterRow {
    pub name: String,
    pub truth: Option<f64>,
    pub initial_cls: Option<f64>,
    pub final_bayes: f64,
    pub final_cls: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlaggedRow {
    pub time: usize,
    pub observed: u64,
    pub probability: f64,
    pub size: u64,
    pub true_size: Option<u64>,
}

/// Everything the detection report shows, in one serializable value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectSummary {
    pub input: String,
    pub n: usize,
    pub config: GibbsConfig,
    pub chains: usize,
    pub retained: usize,
    /// Outlier-size prior mean actually used.
    pub beta: f64,
    pub parameters: Vec<ParameterRow>,
    pub flagged: Vec<FlaggedRow>,
    /// True outliers of a simulated input.
    pub true_outliers: Option<Vec<Outlier>>,
    pub convergence: Vec<GewekeDiagnostic>,
    pub arms_fallbacks: usize,
}

impl DetectSummary {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        input: String,
        series: &CountSeries,
        config: &GibbsConfig,
        chains: usize,
        pooled: &ChainTrace,
        report: &DetectionReport,
        initial: ClsFit,
        final_cls: ClsFit,
        truth: Option<(InarParams, &[Outlier])>,
    ) -> Self {
        let parameters = vec![
            ParameterRow {
                name: "alpha".into(),
                truth: truth.map(|(p, _)| p.alpha()),
                initial_cls: Some(initial.alpha_hat),
                final_bayes: report.alpha_hat,
                final_cls: Some(final_cls.alpha_hat),
            },
            ParameterRow {
                name: "lambda".into(),
                truth: truth.map(|(p, _)| p.lambda()),
                initial_cls: Some(initial.lambda_hat),
                final_bayes: report.lambda_hat,
                final_cls: Some(final_cls.lambda_hat),
            },
            ParameterRow {
                name: "epsilon".into(),
                truth: None,
                initial_cls: None,
                final_bayes: report.epsilon_hat,
                final_cls: None,
            },
        ];
        let true_size = |time: usize| {
            truth.and_then(|(_, o)| o.iter().find(|x| x.time == time).map(|x| x.size))
        };
        let flagged = report
            .flagged
            .iter()
            .map(|f| FlaggedRow {
                time: f.time,
                observed: series.at(f.time),
                probability: f.probability,
                size: f.size,
                true_size: true_size(f.time),
            })
            .collect();
        DetectSummary {
            input,
            n: series.len(),
            config: *config,
            chains,
            retained: report.retained,
            beta: pooled.beta,
            parameters,
            flagged,
            true_outliers: truth.map(|(_, o)| o.to_vec()),
            convergence: report.convergence.clone(),
            arms_fallbacks: pooled.arms_fallbacks,
        }
    }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4}"))
}

fn csv_cell(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn render_text(s: &DetectSummary) -> String {
    let mut out = String::new();
    let c = &s.config;
    let _ = writeln!(out, "INAR(1) additive outlier detection");
    let _ = writeln!(out, "input: {} (n = {})", s.input, s.n);
    let _ = writeln!(
        out,
        "sampler: seed {}, {} chain(s), burn-in {}, {} sweeps kept every {}, {} retained draws",
        c.seed, s.chains, c.burn_in, c.iterations, c.thin, s.retained
    );
    let mode = match c.beta_mode {
        inarao_core::BetaMode::NonInformative => "non-informative",
        inarao_core::BetaMode::Informative => "informative",
    };
    let _ = writeln!(out, "outlier size prior: Poisson({:.4}), {mode}", s.beta);
    let _ = writeln!(out);
    let with_truth = s.parameters.iter().any(|p| p.truth.is_some());
    let header = if with_truth {
        format!("{:>8}", "true")
    } else {
        String::new()
    };
    let _ = writeln!(
        out,
        "{:<10}{header}{:>14}{:>14}{:>14}",
        "parameter", "initial CLS", "final Bayes", "final CLS"
    );
    for p in &s.parameters {
        let truth = if with_truth {
            format!("{:>8}", cell(p.truth))
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "{:<10}{truth}{:>14}{:>14.4}{:>14}",
            p.name,
            cell(p.initial_cls),
            p.final_bayes,
            cell(p.final_cls)
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "flagged outliers (p_hat > {}): {}",
        c.threshold,
        s.flagged.len()
    );
    if !s.flagged.is_empty() {
        let true_col = if s.true_outliers.is_some() {
            format!("{:>10}", "true size")
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "{:>6}{:>8}{:>10}{:>10}{true_col}",
            "t", "y_t", "p_hat", "eta_hat"
        );
        for f in &s.flagged {
            let true_col = match (&s.true_outliers, f.true_size) {
                (None, _) => String::new(),
                (Some(_), Some(v)) => format!("{v:>10}"),
                (Some(_), None) => format!("{:>10}", "-"),
            };
            let _ = writeln!(
                out,
                "{:>6}{:>8}{:>10.3}{:>10}{true_col}",
                f.time, f.observed, f.probability, f.size
            );
        }
    }
    if let Some(truth) = &s.true_outliers {
        let missed: Vec<String> = truth
            .iter()
            .filter(|o| !s.flagged.iter().any(|f| f.time == o.time))
            .map(|o| format!("t={} size {}", o.time, o.size))
            .collect();
        if !missed.is_empty() {
            let _ = writeln!(out, "true outliers not flagged: {}", missed.join(", "));
        }
    }
    let _ = writeln!(out);
    let z: Vec<String> = s
        .convergence
        .iter()
        .map(|g| {
            format!(
                "{} {}",
                g.parameter,
                g.z.map_or("n/a".into(), |z| format!("{z:+.2}"))
            )
        })
        .collect();
    let _ = writeln!(out, "Geweke z (first 10% vs last 50%): {}", z.join(", "));
    let _ = writeln!(out, "ARMS random-walk fallbacks: {}", s.arms_fallbacks);
    out
}

pub fn render_json(s: &DetectSummary) -> String {
    let mut json = serde_json::to_string_pretty(s).expect("summary serializes");
    json.push('\n');
    json
}

pub fn render_csv(s: &DetectSummary) -> String {
    let mut out = String::from("parameter,true,initial_cls,final_bayes,final_cls,probability\n");
    for p in &s.parameters {
        let _ = writeln!(
            out,
            "{},{},{},{},{},",
            p.name,
            csv_cell(p.truth),
            csv_cell(p.initial_cls),
            p.final_bayes,
            csv_cell(p.final_cls)
        );
    }
    for f in &s.flagged {
        let truth = f.true_size.map_or_else(String::new, |v| v.to_string());
        let _ = writeln!(out, "eta_{},{truth},,{},,{}", f.time, f.size, f.probability);
    }
    out
}

/// `t,p_hat` for `t = 2..n`.
pub fn render_phat(report: &DetectionReport) -> String {
    let mut out = String::from("t,p_hat\n");
    for p in report.probabilities() {
        let _ = writeln!(out, "{},{}", p.time, p.p);
    }
    out
}

/// Retained draws; `iteration` counts sweeps after burn-in. A `chain`
/// column is added when there is more than one chain.
pub fn render_trace(traces: &[ChainTrace], config: &GibbsConfig) -> String {
    let multi = traces.len() > 1;
    let mut out = String::from(if multi {
        "chain,iteration,alpha,lambda,epsilon\n"
    } else {
        "iteration,alpha,lambda,epsilon\n"
    });
    for (c, t) in traces.iter().enumerate() {
        for k in 0..t.len() {
            if multi {
                let _ = write!(out, "{},", c + 1);
            }
            let _ = writeln!(
                out,
                "{},{},{},{}",
                (k + 1) * config.thin,
                t.alpha[k],
                t.lambda[k],
                t.epsilon[k]
            );
        }
    }
    out
}

type Column = fn(&ChainTrace) -> &[f64];

/// Equal-width histograms of the pooled α, λ and ε draws.
pub fn render_histograms(traces: &[ChainTrace], bins: usize) -> String {
    let mut out = String::from("parameter,bin_lower,bin_upper,count\n");
    let columns: [(&str, Column); 3] = [
        ("alpha", |t| &t.alpha),
        ("lambda", |t| &t.lambda),
        ("epsilon", |t| &t.epsilon),
    ];
    for (name, get) in columns {
        let draws: Vec<f64> = traces.iter().flat_map(|t| get(t).iter().copied()).collect();
        let (lo, hi) = draws
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| {
                (l.min(x), h.max(x))
            });
        if draws.is_empty() {
            continue;
        }
        let nbins = if hi > lo { bins } else { 1 };
        let width = if hi > lo {
            (hi - lo) / nbins as f64
        } else {
            0.0
        };
        let mut counts = vec![0usize; nbins];
        for x in draws {
            let i = if width > 0.0 {
                (((x - lo) / width) as usize).min(nbins - 1)
            } else {
                0
            };
            counts[i] += 1;
        }
        for (i, count) in counts.iter().enumerate() {
            let lower = lo + width * i as f64;
            let upper = if i + 1 == nbins {
                hi
            } else {
                lo + width * (i + 1) as f64
            };
            let _ = writeln!(out, "{name},{lower},{upper},{count}");
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesReport {
    pub input: String,
    pub n: usize,
    pub summary: SeriesSummary,
    pub cls: ClsFit,
}

pub fn render_series_text(r: &SeriesReport) -> String {
    let s = &r.summary;
    let mut out = String::new();
    let _ = writeln!(out, "series: {} (n = {})", r.input, r.n);
    let _ = writeln!(
        out,
        "mean {:.4}, variance {:.4}, dispersion index {:.4}",
        s.mean, s.variance, s.dispersion_index
    );
    let band = SeriesSummary::white_noise_band(r.n);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:>4}{:>10}{:>10}   (white-noise band ±{band:.4})",
        "lag", "acf", "pacf"
    );
    for k in 1..s.acf.len() {
        let mark = |v: f64| if v.abs() > band { "*" } else { " " };
        let _ = writeln!(
            out,
            "{k:>4}{:>9.4}{}{:>9.4}{}",
            s.acf[k],
            mark(s.acf[k]),
            s.pacf[k],
            mark(s.pacf[k])
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "CLS fit: alpha {:.4}, lambda {:.4}, residual variance {:.4}",
        r.cls.alpha_hat, r.cls.lambda_hat, r.cls.residual_variance
    );
    out
}

pub fn render_series_json(r: &SeriesReport) -> String {
    let mut json = serde_json::to_string_pretty(r).expect("report serializes");
    json.push('\n');
    json
}

/// Long format: `statistic,lag,value`.
pub fn render_series_csv(r: &SeriesReport) -> String {
    let s = &r.summary;
    let mut out = String::from("statistic,lag,value\n");
    let _ = writeln!(out, "n,,{}", r.n);
    let _ = writeln!(out, "mean,,{}", s.mean);
    let _ = writeln!(out, "variance,,{}", s.variance);
    let _ = writeln!(out, "dispersion_index,,{}", s.dispersion_index);
    for k in 1..s.acf.len() {
        let _ = writeln!(out, "acf,{k},{}", s.acf[k]);
    }
    for k in 1..s.pacf.len() {
        let _ = writeln!(out, "pacf,{k},{}", s.pacf[k]);
    }
    let _ = writeln!(out, "cls_alpha,,{}", r.cls.alpha_hat);
    let _ = writeln!(out, "cls_lambda,,{}", r.cls.lambda_hat);
    let _ = writeln!(out, "cls_residual_variance,,{}", r.cls.residual_variance);
    out
}
