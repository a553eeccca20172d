use thiserror::Error;

/// Errors raised by the exact toolkit.
///
/// Variants are grouped by how a caller should react: `Schema`-like errors
/// mean malformed input, `Precondition` errors mean the input is well formed
/// but the requested construction does not apply, and `Evaluation` errors
/// come from numeric evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("polynomial degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },

    #[error("cyclotomic index {0} out of range (need 1 <= k with phi(k) <= 64)")]
    CyclotomicIndexOutOfRange(u64),

    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("polynomial does not divide the characteristic polynomial")]
    NotAFactor,

    #[error("eigenvalue clustering is ambiguous: {0}")]
    ClusteringAmbiguity(String),

    #[error("symbol `{0}` has no numeric approximation")]
    UnresolvedSymbol(String),

    #[error("symbol contexts disagree on `{0}`")]
    SymbolConflict(String),

    #[error("Jacobi identity fails on basis triple ({0}, {1}, {2})")]
    JacobiFailure(usize, usize, usize),

    #[error("Lie algebra is not nilpotent")]
    NotNilpotent,

    #[error("search limit exceeded: {0}")]
    SearchLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
