use thiserror::Error;

/// Errors raised by constructions and certificates in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A denominator factor of a gamma-ratio product vanished.
    #[error("pole: {0}")]
    Pole(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid rational literal {0:?}")]
    Parse(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain: {0}")]
    Domain(String),

    /// An exact identity did not hold; `n` is the first failing index.
    #[error("identity {identity} failed at n = {n}: {detail}")]
    IdentityFailed {
        identity: String,
        n: usize,
        detail: String,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular matrix")]
    Singular,

    #[error("measure has zero mass")]
    ZeroMass,

    #[error("not a rotation: {0}")]
    NotRotation(String),

    #[error("inconsistent kernel symbol: {0}")]
    InconsistentKernel(String),

    #[error("point lies on or outside the support radius: {0}")]
    SupportViolation(String),

    #[error("variant/alpha mismatch: {0}")]
    VariantMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
