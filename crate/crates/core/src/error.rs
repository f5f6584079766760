use thiserror::Error;

/// Failures reported by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("eigensolver or SVD did not converge")]
    NoConvergence,

    #[error("matrix is singular (smallest singular value {0:e})")]
    Singular(f64),

    #[error("matrix is not positive semidefinite (minimum eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("element is not strictly positive (minimum eigenvalue {0:e})")]
    NotStrictlyPositive(f64),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exceeded: {what} requires {needed}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("spectral radius is zero, the map is nilpotent and has no maximal part")]
    ZeroSpectralRadius,

    #[error("Cesaro means did not settle after averaging {0} terms")]
    CesaroNoConvergence(u64),

    #[error("normalized powers are unbounded (||A^n|| / r^n = {growth:e} at n = {n})")]
    UnboundedPowers { n: usize, growth: f64 },

    #[error("maximal part has tolerant rank {0}, expected 1")]
    RankNotOne(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
