use thiserror::Error;

/// Errors raised by the algebraic routines.
///
/// Degenerate inputs (non-invertible pivots, undefined quasideterminants,
/// degenerate Wronskians) are reported here rather than patched up.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element is not invertible")]
    NotInvertible,
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("variable mismatch: {0} vs {1}")]
    VarMismatch(String, String),
    #[error("series has no variable `{0}`")]
    UnknownVar(char),
    #[error("exponential requires a zero constant term")]
    NonzeroConstantTerm,
    #[error("quasideterminant |X|_({i},{j}) is undefined: complementary submatrix is not invertible")]
    QuasidetUndefined { i: usize, j: usize },
    #[error("kernel is degenerate: Wronski matrix is not invertible")]
    DegenerateKernel,
    #[error("prefix of length {0} is degenerate")]
    DegeneratePrefix(usize),
    #[error("factor {0} does not have constant term 1")]
    ConstantTermNotOne(usize),
    #[error("symmetry violated: {0}")]
    SymmetryViolated(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("degenerate generators: {0}")]
    DegenerateGenerators(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("flow leaves the operator manifold: nonzero coefficient at order {0}")]
    TangencyViolation(i64),
    #[error("floor too shallow: {0}")]
    FloorTooShallow(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
