use thiserror::Error;

/// Broad failure classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Input data or configuration violates a precondition.
    Validation,
    /// A numerical routine could not proceed (degenerate fit, sampler failure).
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("the first observation cannot carry an outlier")]
    OutlierAtFirstObservation,

    #[error("outlier time {time} is outside the series (length {len})")]
    OutlierOutOfRange { time: usize, len: usize },

    #[error("negative latent count at time {time}: observed {observed}, outlier size {size}")]
    NegativeLatentCount {
        time: usize,
        observed: u64,
        size: u64,
    },

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("stationary initialization requires alpha < 1")]
    NonStationary,

    #[error("ARMS initialization failed: {0}")]
    ArmsInit(String),

    #[error("trace holds no retained draws")]
    EmptyTrace,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::DegenerateSeries(_) | Error::ArmsInit(_) | Error::EmptyTrace => {
                ErrorKind::Numerical
            }
            _ => ErrorKind::Validation,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
