use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("amplitudes are not normalized: squared norm {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("negative amplitude ({0}); real amplitudes must be non-negative")]
    NegativeAmplitude(f64),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace}, expected 1")]
    NotUnitTrace { trace: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("Jones matrix is not unitary (max deviation of J\u{2020}J from I: {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid experiment model: {0}")]
    InvalidModel(String),

    #[error("acquisition duration must be positive, got {0}")]
    InvalidDuration(f64),

    #[error("Alice's analyzer must use the V output on this hardware")]
    UnavailablePort,

    #[error("window start {t_i:e} s is not aligned to the {bin_width:e} s bin grid")]
    MisalignedWindow { t_i: f64, bin_width: f64 },

    #[error("histogram has no noise region beyond the signal window")]
    EmptyNoiseRegion,

    #[error("fringe fit needs at least 4 points, got {0}")]
    TooFewPoints(usize),

    #[error("fringe design matrix is degenerate (angles coincide modulo the period)")]
    DegenerateFit,

    #[error("fitted mean level {0} is not positive")]
    NonPositiveMean(f64),

    #[error("all counts are zero")]
    ZeroCounts,

    #[error("inconsistent counts: {0}")]
    CountInconsistency(String),

    #[error("linear system is singular")]
    SingularSystem,

    #[error("{0}")]
    InvalidTomographySet(String),

    #[error("optimizer did not converge after {iterations} iterations (best objective {best:e}, last improvement {residual:e})")]
    NotConverged {
        iterations: usize,
        best: f64,
        residual: f64,
        best_params: Vec<f64>,
    },

    #[error("settings list is empty")]
    EmptySettings,

    #[error("{0}")]
    InvalidChsh(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn in_stage(self, stage: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }

    /// Short machine-readable tag for the error family.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotNormalized { .. } | Error::NegativeAmplitude(_) => "normalization",
            Error::NotHermitian { .. }
            | Error::NotUnitTrace { .. }
            | Error::NotPositive { .. }
            | Error::NotUnitary { .. }
            | Error::NonFinite(_) => "invalid-matrix",
            Error::InvalidModel(_) | Error::InvalidDuration(_) | Error::UnavailablePort => {
                "invalid-model"
            }
            Error::MisalignedWindow { .. } | Error::EmptyNoiseRegion => "histogram",
            Error::TooFewPoints(_) | Error::DegenerateFit | Error::NonPositiveMean(_) => "fit",
            Error::ZeroCounts | Error::CountInconsistency(_) => "counts",
            Error::SingularSystem | Error::InvalidTomographySet(_) => "tomography",
            Error::NotConverged { .. } => "not-converged",
            Error::EmptySettings | Error::InvalidChsh(_) => "invalid-input",
            Error::Parse { .. } => "parse",
            Error::Config { .. } => "config",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Stage { source, .. } => source.kind(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
