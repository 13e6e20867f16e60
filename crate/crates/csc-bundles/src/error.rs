use thiserror::Error;

/// Errors reported by the construction and counting routines.
///
/// Every variant is a precondition failure: the library never panics on bad
/// numeric input, it hands back enough context to correct the call.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar argument fell outside its documented domain.
    #[error("{name} = {value} violates: {constraint}")]
    Domain {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// The requested modulus is not admissible for the given connection
    /// constants. `(lo, hi)` is the open interval of admissible squared
    /// moduli for this operand order; it is empty (`lo >= hi`) when only the
    /// interchanged order carries solutions.
    #[error("inadmissible modulus: modulus^2 = {modulus_sq}; this operand order admits modulus^2 in ({lo}, {hi})")]
    InadmissibleModulus { modulus_sq: f64, lo: f64, hi: f64 },

    /// A vector or matrix had the wrong dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A matrix that must be skew-symmetric was not.
    #[error("matrix is not skew-symmetric: |M + M^T| reaches {defect}")]
    NotSkew { defect: f64 },

    /// An operation that needs a unit vector received one of a different norm.
    #[error("expected a unit vector, got |s| = {norm}")]
    NotUnit { norm: f64 },

    /// A profile was evaluated where it must be positive but was not.
    #[error("profile {which} is {value} at t = {t}; it must be positive on the open interval")]
    NonPositiveProfile {
        which: &'static str,
        t: f64,
        value: f64,
    },

    /// The adaptive integrator could not finish (step underflow, step budget,
    /// or non-finite state).
    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, constraint: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            constraint,
        }
    }
}
