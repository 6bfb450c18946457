use std::fs;
use std::path::{Path, PathBuf};

use inarao_core::{
    cls_fit, contaminate, pool_traces, random_outlier_times, remove_outliers_and_refit, run_chains,
    simulate, summarize, summarize_series, ChainTrace, Contamination, CountSeries, DetectionReport,
    Initialization, Outlier,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{OutlierSpec, ReportFormat, ResolvedRun, SimulationSpec, Source};
use crate::csv::{parse_count_csv, render_series};
use crate::error::CliError;
use crate::report::{self, DetectSummary, SeriesReport};

pub fn read_series(path: &Path) -> Result<CountSeries, CliError> {
    parse_count_csv(path)
        .map_err(|e| CliError::io(path, e))?
        .map_err(|source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        })
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn render_outliers(outliers: &[Outlier]) -> String {
    let mut out = String::from("t,size\n");
    for o in outliers {
        out.push_str(&format!("{},{}\n", o.time, o.size));
    }
    out
}

/// Places the outliers of `spec` on `clean`, drawing random times from `rng`
/// when the spec only gives sizes.
pub fn place_outliers(
    clean: &CountSeries,
    spec: &OutlierSpec,
    rng: &mut ChaCha8Rng,
) -> Result<(CountSeries, Vec<Outlier>), CliError> {
    let outliers = match spec {
        OutlierSpec::Fixed(list) => list.clone(),
        OutlierSpec::RandomTimes(sizes) => random_outlier_times(clean.len(), sizes.len(), rng)?
            .into_iter()
            .zip(sizes)
            .map(|(time, &size)| Outlier { time, size })
            .collect(),
    };
    let infeasible = |e: inarao_core::Error| match e {
        inarao_core::Error::OutlierAtFirstObservation
        | inarao_core::Error::OutlierOutOfRange { .. } => CliError::Usage(e.to_string()),
        e => e.into(),
    };
    let contamination = Contamination::new(outliers).map_err(infeasible)?;
    let series = contaminate(clean, &contamination).map_err(infeasible)?;
    Ok((series, contamination.outliers().to_vec()))
}

/// A simulated scenario: the clean path, the observed series, and the truth.
pub struct Scenario {
    pub clean: CountSeries,
    pub series: CountSeries,
    pub outliers: Vec<Outlier>,
}

/// Simulates `spec` from `seed`: the clean path first, then any random
/// outlier times, from one random stream.
pub fn simulate_scenario(
    spec: &SimulationSpec,
    init: Initialization,
    seed: u64,
) -> Result<Scenario, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clean = simulate(&spec.params, spec.n, init, &mut rng)?;
    let (series, outliers) = place_outliers(&clean, &spec.outliers, &mut rng)?;
    Ok(Scenario {
        clean,
        series,
        outliers,
    })
}

pub fn cmd_simulate(
    spec: &SimulationSpec,
    init: Initialization,
    seed: u64,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let scenario = simulate_scenario(spec, init, seed)?;
    ensure_dir(out_dir)?;
    Ok(vec![
        write_file(
            out_dir,
            "clean.csv",
            &render_series(scenario.clean.values()),
        )?,
        write_file(
            out_dir,
            "series.csv",
            &render_series(scenario.series.values()),
        )?,
        write_file(
            out_dir,
            "outliers.csv",
            &render_outliers(&scenario.outliers),
        )?,
    ])
}

pub fn cmd_contaminate(
    input: &Path,
    spec: &OutlierSpec,
    seed: Option<u64>,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let clean = read_series(input)?;
    let seed = match (spec, seed) {
        (OutlierSpec::RandomTimes(sizes), None) if !sizes.is_empty() => {
            return Err(CliError::Usage(
                "random outlier times need an explicit seed".into(),
            ))
        }
        (_, s) => s.unwrap_or(0),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (series, outliers) = place_outliers(&clean, spec, &mut rng)?;
    ensure_dir(out_dir)?;
    Ok(vec![
        write_file(out_dir, "series.csv", &render_series(series.values()))?,
        write_file(out_dir, "outliers.csv", &render_outliers(&outliers))?,
    ])
}

/// Result of a detection run, before anything is written.
pub struct Detection {
    pub summary: DetectSummary,
    pub trace: Vec<ChainTrace>,
    pub report: DetectionReport,
}

pub fn run_detection(run: &ResolvedRun) -> Result<Detection, CliError> {
    let (series, truth, label) = match &run.source {
        Source::File(path) => (read_series(path)?, None, path.display().to_string()),
        Source::Simulated(spec) => {
            let s = simulate_scenario(spec, Initialization::Stationary, run.gibbs.seed)?;
            let label = format!(
                "simulated (alpha = {}, lambda = {}, n = {})",
                spec.params.alpha(),
                spec.params.lambda(),
                spec.n
            );
            (s.series, Some((spec.params, s.outliers)), label)
        }
    };
    let traces = run_chains(&series, &run.gibbs, run.chains)?;
    let pooled = pool_traces(&traces)?;
    let report = summarize(&pooled, run.gibbs.threshold)?;
    let initial = cls_fit(&series)?;
    let final_cls = remove_outliers_and_refit(&series, &report)?;
    let summary = DetectSummary::new(
        label,
        &series,
        &run.gibbs,
        run.chains,
        &pooled,
        &report,
        initial,
        final_cls,
        truth.as_ref().map(|(p, o)| (*p, o.as_slice())),
    );
    Ok(Detection {
        summary,
        trace: traces,
        report,
    })
}

/// Runs detection and writes every output file. Returns the text selected
/// by the run's format.
pub fn cmd_detect(run: &ResolvedRun) -> Result<String, CliError> {
    let d = run_detection(run)?;
    let dir = &run.out_dir;
    ensure_dir(dir)?;
    let text = report::render_text(&d.summary);
    let json = report::render_json(&d.summary);
    let csv = report::render_csv(&d.summary);
    write_file(dir, "report.txt", &text)?;
    write_file(dir, "report.json", &json)?;
    write_file(dir, "phat.csv", &report::render_phat(&d.report))?;
    write_file(
        dir,
        "trace.csv",
        &report::render_trace(&d.trace, &run.gibbs),
    )?;
    write_file(
        dir,
        "cleaned.csv",
        &render_series(d.report.cleaned_series.values()),
    )?;
    write_file(
        dir,
        "histogram.csv",
        &report::render_histograms(&d.trace, 20),
    )?;
    Ok(match run.format {
        ReportFormat::Text => text,
        ReportFormat::Json => json,
        ReportFormat::Csv => csv,
    })
}

pub fn cmd_report(
    input: &Path,
    max_lag: Option<usize>,
    format: ReportFormat,
) -> Result<String, CliError> {
    let series = read_series(input)?;
    let n = series.len();
    let max_lag = max_lag.unwrap_or_else(|| 10.min((n - 1) / 2)).max(1);
    let summary = summarize_series(&series, max_lag)?;
    let cls = cls_fit(&series)?;
    let r = SeriesReport {
        input: input.display().to_string(),
        n,
        summary,
        cls,
    };
    Ok(match format {
        ReportFormat::Text => report::render_series_text(&r),
        ReportFormat::Json => report::render_series_json(&r),
        ReportFormat::Csv => report::render_series_csv(&r),
    })
}
