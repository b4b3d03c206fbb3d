use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid truncation dimension {0}: need at least 2")]
    InvalidTruncation(usize),

    #[error("basis {basis} has no {what}; use build_momentum_squared")]
    UnsupportedBasis { basis: &'static str, what: &'static str },

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("operator is not Hermitian (max |A - A^H| = {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("parameter count mismatch: circuit has {expected} slots, got {got}")]
    ParamCount { expected: usize, got: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("Trotter parts do not sum to the Hamiltonian (max deviation {deviation:.3e})")]
    PartsMismatch { deviation: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("inconsistent initial data: constraint residual {residual:.3e}")]
    InconsistentInitialData { residual: f64 },

    #[error("domain truncated: integrand overflows beyond x = {safe_bound}")]
    DomainTruncation { safe_bound: f64 },

    #[error("no bracketed minimum in [{lo}, {hi}]")]
    NoMinimum { lo: f64, hi: f64 },

    #[error("no barrier: cubic coefficient vanishes")]
    NoBarrier,

    #[error("quadrature did not converge: {0}")]
    NoConvergence(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("eigensolver residual {0:.3e} above tolerance")]
    Eigensolver(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
