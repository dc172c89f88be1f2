use thiserror::Error;

/// Errors produced by state construction, channels and diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("postselected state is orthogonal to the preselected state")]
    OrthogonalPostselection,

    #[error("degenerate cancellation: success probability {raw_probability:e} below threshold")]
    DegenerateCancellation { raw_probability: f64 },

    #[error("truncation n_max = {n_max} insufficient (tail mass {tail_mass:e})")]
    TruncationInsufficient { n_max: usize, tail_mass: f64 },

    #[error("inconsistent normalization: state norm {norm}")]
    InconsistentNormalization { norm: f64 },

    #[error("observable does not square to identity (deviation {deviation:e})")]
    InvalidObservable { deviation: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
