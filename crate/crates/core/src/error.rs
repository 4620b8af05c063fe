use thiserror::Error;

/// Crate-wide error type.
///
/// `Capacity` is reserved for computations whose result would be infinite
/// (or unboundedly large) and carries a human-readable witness, typically
/// a cycle rendered as `a*b*c`.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),

    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),

    #[error("path is not composable at position {0}")]
    NotComposable(usize),

    #[error("missing fill entry for vertex `{0}`")]
    MissingFill(String),

    #[error("comodules live over different coalgebras")]
    MixedCoalgebras,

    #[error("vertex `{0}` is not in the localized vertex set")]
    OutsideLocalization(String),

    #[error("localized vertex set must be a nonempty subset of the quiver vertices")]
    EmptyLocalization,

    #[error("{what} is infinite dimensional (witness cycle: {cycle})")]
    Capacity { what: String, cycle: String },

    #[error("context does not admit a colocalizing functor (witness cycle: {cycle})")]
    UnsupportedContext { cycle: String },

    #[error("invalid comodule: {0}")]
    InvalidComodule(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("syntax error at line {line}, column {col}: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },

    #[error("semantic error at line {line}: {msg} (token `{token}`)")]
    Semantic {
        line: usize,
        msg: String,
        token: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
