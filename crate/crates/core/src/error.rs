use thiserror::Error;

#[derive(Debug, Error)]
pub enum SicError {
    #[error("invalid dimension {0}: d must be at least 2")]
    InvalidDimension(usize),

    #[error("unsupported precision of {0} bits (supported: 53, 128, 256, 512, 1024, 2048, 4096)")]
    Precision(u32),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix [[{a}, {b}], [{c}, {e}]] mod {modulus} does not have determinant +-1")]
    NotSymplectic { a: i64, b: i64, c: i64, e: i64, modulus: i64 },

    #[error("projective order not found up to {0}")]
    OrderUndetermined(usize),

    #[error("polish failed: {0}")]
    PolishFailure(String),

    #[error("fiducial is not converged (residual {0:e})")]
    Unconverged(f64),

    #[error("dimension {d} exceeds the enumeration bound {bound}")]
    Capability { d: usize, bound: usize },

    #[error("factorization of {0} needs a prime factor above the trial-division bound")]
    FactorBound(String),

    #[error("recognition failed: {0}")]
    Recognition(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T, E = SicError> = std::result::Result<T, E>;
