use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("undeclared identifier `{name}` at byte {position}")]
    UndeclaredIdentifier { name: String, position: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("codimension mismatch: {equations} defining equations for declared codimension {codim}")]
    CodimMismatch { equations: usize, codim: usize },

    #[error("variety has no parametrization")]
    MissingParametrization,

    #[error("system is not square: {equations} equations in {unknowns} unknowns")]
    NotSquare { equations: usize, unknowns: usize },

    #[error("equation {index} is identically zero")]
    ZeroEquation { index: usize },

    #[error("singular Jacobian (relative smallest singular value {ratio:.3e})")]
    SingularJacobian { ratio: f64 },

    #[error("{failed} of {total} paths failed; rerun with a different seed")]
    PathFailureBudget { failed: usize, total: usize },

    #[error("critical point is not isolated: local dual space did not stabilize by degree {cap}")]
    NotIsolated { cap: usize },

    #[error("genericity fault: {0}")]
    Genericity(String),

    #[error("unsolvable stratum `{name}`: {reason}")]
    UnsolvableStratum { name: String, reason: String },
}
