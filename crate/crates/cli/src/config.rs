//! Run configuration for `detect`: a flat `key = value` file whose keys are
//! the field names below, each overridable by the flag of the same name.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use inarao_core::{BetaMode, GibbsConfig, Hyperparams, InarParams, Outlier, SiteUpdate};

use crate::error::CliError;

/// Environment variable consulted when no output directory is given.
pub const OUT_DIR_ENV: &str = "INARAO_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
    Csv,
}

/// Outlier list: explicit `time:size` pairs, or bare sizes placed at random
/// times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutlierSpec {
    Fixed(Vec<Outlier>),
    RandomTimes(Vec<u64>),
}

impl OutlierSpec {
    pub fn is_empty(&self) -> bool {
        match self {
            OutlierSpec::Fixed(v) => v.is_empty(),
            OutlierSpec::RandomTimes(v) => v.is_empty(),
        }
    }
}

impl FromStr for OutlierSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let items: Vec<&str> = s
            .split(',')
            .map(str::trim)
            .filter(|i| !i.is_empty())
            .collect();
        if items.iter().all(|i| i.contains(':')) {
            items
                .iter()
                .map(|item| {
                    let (t, size) = item.split_once(':').expect("checked above");
                    Ok(Outlier {
                        time: t
                            .trim()
                            .parse()
                            .map_err(|_| format!("bad outlier time {t:?}"))?,
                        size: size
                            .trim()
                            .parse()
                            .map_err(|_| format!("bad outlier size {size:?}"))?,
                    })
                })
                .collect::<Result<_, String>>()
                .map(OutlierSpec::Fixed)
        } else if items.iter().any(|i| i.contains(':')) {
            Err("mix of time:size pairs and bare sizes".into())
        } else {
            items
                .iter()
                .map(|i| i.parse().map_err(|_| format!("bad outlier size {i:?}")))
                .collect::<Result<_, String>>()
                .map(OutlierSpec::RandomTimes)
        }
    }
}

pub fn parse_beta_mode(s: &str) -> Result<BetaMode, String> {
    match s {
        "informative" | "info" => Ok(BetaMode::Informative),
        "non-informative" | "noninformative" | "ninfo" => Ok(BetaMode::NonInformative),
        _ => Err(format!(
            "unknown beta mode {s:?} (informative | non-informative)"
        )),
    }
}

pub fn parse_site_update(s: &str) -> Result<SiteUpdate, String> {
    match s {
        "single-site" => Ok(SiteUpdate::SingleSite),
        "blocked" => Ok(SiteUpdate::Blocked),
        _ => Err(format!("unknown site update {s:?} (single-site | blocked)")),
    }
}

/// Parameters of an inline simulated series.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub params: InarParams,
    pub n: usize,
    pub outliers: OutlierSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Simulated(SimulationSpec),
}

/// Everything `detect` needs after merging file, flags and defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedRun {
    pub source: Source,
    pub gibbs: GibbsConfig,
    pub chains: usize,
    pub out_dir: PathBuf,
    pub format: ReportFormat,
}

#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct RunConfig {
    /// Count series to analyse (CSV).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Simulate the input instead: thinning probability.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Simulate the input instead: innovation mean.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Simulate the input instead: series length.
    #[arg(long)]
    pub n: Option<usize>,
    /// Outliers for a simulated input: `9:7,29:13` or sizes `7,13,18` at random times.
    #[arg(long)]
    pub outliers: Option<OutlierSpec>,
    /// Seed for the sampler (and the simulation, if any). Required.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Sweeps after burn-in.
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_parser = parse_beta_mode)]
    pub beta_mode: Option<BetaMode>,
    /// Outlier-size prior mean in non-informative mode.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long, value_parser = parse_site_update)]
    pub site_update: Option<SiteUpdate>,
    /// Independent chains, pooled for the report.
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<ReportFormat>,
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| CliError::Config {
        line,
        message: format!("{key}: {e}"),
    })
}

fn with<T, E: std::fmt::Display>(key: &str, line: usize, r: Result<T, E>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Config {
        line,
        message: format!("{key}: {e}"),
    })
}

impl RunConfig {
    /// Parses `key = value` lines. `#` starts a comment; keys may use `-`
    /// or `_`.
    pub fn from_file_text(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(CliError::Config {
                    line,
                    message: format!("expected key = value, got {content:?}"),
                });
            };
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            if !seen.insert(key.clone()) {
                return Err(CliError::Config {
                    line,
                    message: format!("duplicate key {key}"),
                });
            }
            cfg.set(&key, value, line)?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), CliError> {
        match key {
            "input" => self.input = Some(PathBuf::from(value)),
            "alpha" => self.alpha = Some(parse_value(key, value, line)?),
            "lambda" => self.lambda = Some(parse_value(key, value, line)?),
            "n" => self.n = Some(parse_value(key, value, line)?),
            "outliers" => self.outliers = Some(parse_value(key, value, line)?),
            "seed" => self.seed = Some(parse_value(key, value, line)?),
            "burn_in" => self.burn_in = Some(parse_value(key, value, line)?),
            "iterations" => self.iterations = Some(parse_value(key, value, line)?),
            "thin" => self.thin = Some(parse_value(key, value, line)?),
            "threshold" => self.threshold = Some(parse_value(key, value, line)?),
            "beta_mode" => self.beta_mode = Some(with(key, line, parse_beta_mode(value))?),
            "beta" => self.beta = Some(parse_value(key, value, line)?),
            "a" => self.a = Some(parse_value(key, value, line)?),
            "b" => self.b = Some(parse_value(key, value, line)?),
            "c" => self.c = Some(parse_value(key, value, line)?),
            "d" => self.d = Some(parse_value(key, value, line)?),
            "h" => self.h = Some(parse_value(key, value, line)?),
            "g" => self.g = Some(parse_value(key, value, line)?),
            "site_update" => self.site_update = Some(with(key, line, parse_site_update(value))?),
            "chains" => self.chains = Some(parse_value(key, value, line)?),
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            "format" => self.format = Some(with(key, line, ReportFormat::from_str(value, true))?),
            _ => {
                return Err(CliError::Config {
                    line,
                    message: format!("unknown key {key}"),
                })
            }
        }
        Ok(())
    }

    /// Field-wise merge: values set in `self` win over `fallback`.
    pub fn or(self, fallback: RunConfig) -> RunConfig {
        RunConfig {
            input: self.input.or(fallback.input),
            alpha: self.alpha.or(fallback.alpha),
            lambda: self.lambda.or(fallback.lambda),
            n: self.n.or(fallback.n),
            outliers: self.outliers.or(fallback.outliers),
            seed: self.seed.or(fallback.seed),
            burn_in: self.burn_in.or(fallback.burn_in),
            iterations: self.iterations.or(fallback.iterations),
            thin: self.thin.or(fallback.thin),
            threshold: self.threshold.or(fallback.threshold),
            beta_mode: self.beta_mode.or(fallback.beta_mode),
            beta: self.beta.or(fallback.beta),
            a: self.a.or(fallback.a),
            b: self.b.or(fallback.b),
            c: self.c.or(fallback.c),
            d: self.d.or(fallback.d),
            h: self.h.or(fallback.h),
            g: self.g.or(fallback.g),
            site_update: self.site_update.or(fallback.site_update),
            chains: self.chains.or(fallback.chains),
            out_dir: self.out_dir.or(fallback.out_dir),
            format: self.format.or(fallback.format),
        }
    }

    /// Applies defaults and checks the combination. `env_out_dir` is the
    /// value of [`OUT_DIR_ENV`], if set.
    pub fn resolve(self, env_out_dir: Option<PathBuf>) -> Result<ResolvedRun, CliError> {
        let simulated = self.alpha.is_some() || self.lambda.is_some() || self.n.is_some();
        let source = match (self.input, simulated) {
            (Some(_), true) => {
                return Err(CliError::Usage(
                    "give either input or a simulation spec (alpha, lambda, n), not both".into(),
                ))
            }
            (None, false) => {
                return Err(CliError::Usage(
                    "no input: give input or a simulation spec (alpha, lambda, n)".into(),
                ))
            }
            (Some(path), false) => {
                if self.outliers.is_some() {
                    return Err(CliError::Usage(
                        "outliers only apply to a simulated input".into(),
                    ));
                }
                Source::File(path)
            }
            (None, true) => {
                let (Some(alpha), Some(lambda), Some(n)) = (self.alpha, self.lambda, self.n) else {
                    return Err(CliError::Usage(
                        "a simulation spec needs alpha, lambda and n".into(),
                    ));
                };
                Source::Simulated(SimulationSpec {
                    params: InarParams::new(alpha, lambda)?,
                    n,
                    outliers: self.outliers.unwrap_or(OutlierSpec::Fixed(Vec::new())),
                })
            }
        };
        let seed = self
            .seed
            .ok_or_else(|| CliError::Usage("seed must be given explicitly".into()))?;
        let defaults = GibbsConfig::default();
        let dh = defaults.hyper;
        let gibbs = GibbsConfig {
            burn_in: self.burn_in.unwrap_or(defaults.burn_in),
            iterations: self.iterations.unwrap_or(defaults.iterations),
            thin: self.thin.unwrap_or(defaults.thin),
            seed,
            hyper: Hyperparams {
                a: self.a.unwrap_or(dh.a),
                b: self.b.unwrap_or(dh.b),
                c: self.c.unwrap_or(dh.c),
                d: self.d.unwrap_or(dh.d),
                h: self.h.unwrap_or(dh.h),
                g: self.g.unwrap_or(dh.g),
                beta: self.beta.unwrap_or(dh.beta),
            },
            threshold: self.threshold.unwrap_or(defaults.threshold),
            beta_mode: self.beta_mode.unwrap_or(defaults.beta_mode),
            site_update: self.site_update.unwrap_or(defaults.site_update),
        };
        gibbs.validate()?;
        let chains = self.chains.unwrap_or(1);
        if chains == 0 {
            return Err(CliError::Usage("chains must be at least 1".into()));
        }
        Ok(ResolvedRun {
            source,
            gibbs,
            chains,
            out_dir: self
                .out_dir
                .or(env_out_dir)
                .unwrap_or_else(|| PathBuf::from(".")),
            format: self.format.unwrap_or_default(),
        })
    }
}
