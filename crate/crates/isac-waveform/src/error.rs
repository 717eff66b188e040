use thiserror::Error;

/// Errors produced by the waveform design and evaluation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("PAPR undefined: no active sensing subcarrier in the symbol row")]
    UndefinedPapr,

    #[error("requested scope exceeds frame limits: {0}")]
    Scope(String),

    #[error("power allocation impossible: every candidate has zero gain")]
    NoAllocation,

    #[error("empty sensing support: no resource element is assigned to sensing")]
    EmptySupport,

    #[error("symmetry violation: imaginary residue {residue:.3e} exceeds tolerance {tolerance:.3e}")]
    SymmetryViolation { residue: f64, tolerance: f64 },

    #[error("fixed cells ({nu},{mu}) and ({nu_m},{mu_m}) are mirrors with inconsistent values")]
    InconsistentFixedCells {
        nu: i64,
        mu: i64,
        nu_m: i64,
        mu_m: i64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid of {cells} cells exceeds the exact-ambiguity size cap of {cap}")]
    SizeGuard { cells: usize, cap: usize },

    #[error("empty range: {0}")]
    EmptyRange(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
