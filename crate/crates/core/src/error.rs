use thiserror::Error;

/// Errors raised by the geometry, coordinate and operator routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, got n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("point is not inside the Siegel domain (Im z_last - |z'|^2 = {gap:e})")]
    OutsideDomain { gap: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid subgroup specification: {0}")]
    InvalidSubgroup(String),

    #[error("tensor evaluation is not real (imaginary residue {residue:e})")]
    ConventionViolation { residue: f64 },

    #[error("kernel base {re:e}{im:+e}i is outside the open right half-plane")]
    BranchViolation { re: f64, im: f64 },

    #[error("quadrature did not converge: estimated error {estimate:e} exceeds tolerance {tolerance:e} ({detail})")]
    NonConvergence {
        estimate: f64,
        tolerance: f64,
        detail: String,
    },

    #[error("function is not holomorphic in w' (d/d(conj w) residue {residue:e})")]
    NotHolomorphic { residue: f64 },

    #[error("invariant violated: {0}")]
    InvariantFailure(String),

    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error("unsupported input: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
