//! Error type shared by every fallible operation.

use thiserror::Error;

/// Failure modes of the library. Each variant carries a stable machine tag
/// (see [`Error::tag`]) used by the CLI reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not in SU(2,1): residual {max_residual:.3e}")]
    NotInGroup { max_residual: f64 },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("random sampler produced only degenerate frames after {attempts} attempts")]
    DegenerateSample { attempts: usize },
    #[error("deciding quantity {quantity} lies within tolerance of its threshold")]
    BoundaryCase { quantity: &'static str },
    #[error("element is not loxodromic")]
    NotLoxodromic,
    #[error("spectrum inconsistent with SU(2,1): mismatch {mismatch:.3e}")]
    InconsistentSpectrum { mismatch: f64 },
    #[error("eigenframe is numerically degenerate: {detail}")]
    FrameDegenerate { detail: String },
    #[error("element is not parabolic")]
    NotParabolic,
    #[error("recovered value {value} is outside [-1, 1]")]
    OutOfRange { value: f64 },
    #[error("denominator {value:.3e} below the conditioning floor")]
    DenominatorUnderflow { value: f64 },
    #[error("ill-conditioned step: {detail}")]
    IllConditioned { detail: String },
    #[error("group is reducible")]
    Reducible,
    #[error("no Burnside basis found: span rank {rank} < 9")]
    BasisNotFound { rank: usize },
    #[error("no loxodromic element found after searching {searched} candidates")]
    NoLoxodromicFound { searched: usize },
    #[error("trace field is not real: max |Im tr| = {max_imag:.3e}")]
    TraceFieldNotReal { max_imag: f64 },
    #[error("ad - bc = {det} is not 1")]
    NotUnimodular { det: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid tolerances: {0}")]
    InvalidTolerances(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable identifier used in serialized reports.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::NotInGroup { .. } => "NotInGroup",
            Error::NonFinite => "NonFinite",
            Error::DegenerateSample { .. } => "DegenerateSample",
            Error::BoundaryCase { .. } => "BoundaryCase",
            Error::NotLoxodromic => "NotLoxodromic",
            Error::InconsistentSpectrum { .. } => "InconsistentSpectrum",
            Error::FrameDegenerate { .. } => "FrameDegenerate",
            Error::NotParabolic => "NotParabolic",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::DenominatorUnderflow { .. } => "DenominatorUnderflow",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::Reducible => "Reducible",
            Error::BasisNotFound { .. } => "BasisNotFound",
            Error::NoLoxodromicFound { .. } => "NoLoxodromicFound",
            Error::TraceFieldNotReal { .. } => "TraceFieldNotReal",
            Error::NotUnimodular { .. } => "NotUnimodular",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InvalidTolerances(_) => "InvalidTolerances",
            Error::Parse(_) => "ParseError",
        }
    }

    /// Whether the error stems from malformed input rather than from the mathematics.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::InvalidTolerances(_))
    }

    pub(crate) fn ill(detail: impl Into<String>) -> Self {
        Error::IllConditioned { detail: detail.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
