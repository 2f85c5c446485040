use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid weight system: {0}")]
    InvalidWeightSystem(String),

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),

    #[error("enumeration bound exceeded: {n} coordinates > bound {bound}")]
    BoundExceeded { n: usize, bound: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("point is stable; no destabilizing cocharacter exists")]
    StablePoint,

    #[error("Kempf-Ness solve undecided after {iterations} iterations: {reason}")]
    Undecided { iterations: usize, reason: String },

    #[error("moment map residual {residual:e} exceeds tolerance {tol:e}")]
    MomentResidual { residual: f64, tol: f64 },

    #[error("continuous stabilizer: gauge rank {rank} < expected {expected}")]
    ContinuousStabilizer { rank: usize, expected: usize },

    #[error("vector is not horizontal: gauge component {0:e}")]
    NotHorizontal(f64),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
