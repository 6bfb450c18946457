//! Bayesian detection of additive outliers in Poisson INAR(1) count series.
//!
//! The observed series is modelled as `Y_t = X_t + η_t δ_t`, where `X_t` is a
//! Poisson INAR(1) process, `δ_t ~ Bernoulli(ε)` marks an outlier and
//! `η_t ~ Poisson(β)` is its size. A Gibbs sampler with ARMS steps for α and
//! λ estimates the posterior probability of an outlier at every time point.
//!
//! ```no_run
//! use inarao_core::{run_chain, summarize, CountSeries, GibbsConfig};
//!
//! let y = CountSeries::new(vec![3, 4, 2, 15, 3, 2, 4, 3, 1, 2]).unwrap();
//! let trace = run_chain(&y, &GibbsConfig::default()).unwrap();
//! let report = summarize(&trace, 0.5).unwrap();
//! println!("flagged: {:?}", report.flagged_times());
//! ```

pub mod arms;
pub mod cls;
pub mod conditionals;
pub mod diagnostics;
pub mod error;
pub mod gibbs;
pub mod math;
pub mod posterior;
pub mod process;

pub use arms::{arms_draw, ArmsDraw, ArmsEnvelope, Domain};
pub use cls::{cls_fit, remove_outliers_and_refit, ClsFit};
pub use conditionals::{
    delta_probability, delta_probability_marginal, epsilon_draw, epsilon_posterior,
    eta_conditional_pmf, AlphaKernel, EtaConditional, LambdaKernel, OutlierProbability,
};
pub use diagnostics::{summarize_series, SeriesSummary};
pub use error::{Error, ErrorKind, Result};
pub use gibbs::{
    compute_beta_info, geweke_z, pool_traces, run_chain, run_chains, summarize, BetaMode,
    ChainState, ChainTrace, DetectionReport, FlaggedOutlier, GewekeDiagnostic, GibbsConfig,
    GibbsSampler, SiteUpdate,
};
pub use posterior::{
    conditional_log_likelihood, log_posterior, log_prior, Hyperparams, LatentConfig,
};
pub use process::{
    binomial_thin, contaminate, decontaminate, random_outlier_times, simulate, transition_log_pmf,
    Contamination, CountSeries, InarParams, Initialization, Outlier,
};
