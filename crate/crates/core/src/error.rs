use thiserror::Error;

use crate::operator::CMatrix;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("operator is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("non-finite entry in operator")]
    NonFinite,

    #[error("adjoint power {requested} exceeds the configured maximum {max}")]
    PowerTooLarge { requested: usize, max: usize },

    #[error("eigendecomposition failed (reconstruction residual {residual:.3e})")]
    Spectral { residual: f64 },

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid density spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("negative eigenvalue {0:.3e} in a positive semidefinite input")]
    NegativeEigenvalue(f64),

    #[error("conserved structure not verified (eigenoperator residual {residual:.3e})")]
    Unverified { residual: f64 },

    #[error("closed form requires omega^2 > 0, got {0}")]
    NonPositiveOmega(f64),

    #[error("series did not converge after {terms} terms (last term norm {last_term_norm:.3e})")]
    SeriesNotConverged {
        terms: usize,
        last_term_norm: f64,
        partial: Box<CMatrix>,
    },

    #[error("truncation window emptied after {terms} commutators")]
    WindowExhausted { terms: usize },

    #[error("V is not proportional to the identity (relative deviation {0:.3e})")]
    NonScalarV(f64),

    #[error("density operator has empty support")]
    EmptySupport,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
