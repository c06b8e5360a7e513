use thiserror::Error;

/// Everything that can go wrong inside the engine.
///
/// Variants split into two families: violated preconditions (bad input,
/// wrong kind of algebra or order) and internal failures (a search that
/// should have succeeded did not). The CLI maps them onto distinct exit
/// codes through [`Error::is_precondition`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rank deficient: expected rank {expected}, found {found}")]
    RankDeficient { expected: usize, found: usize },
    #[error("quadratic form is not positive definite")]
    NotPositiveDefinite,
    #[error("elements belong to different quaternion algebras")]
    MismatchedAlgebras,
    #[error("algebra is not definite")]
    Indefinite,
    #[error("prime {0} ramifies in the algebra")]
    Ramified(u64),
    #[error("order is not maximal at {0}")]
    NotMaximalAt(u64),
    #[error("element {0} is not invertible")]
    ZeroDivisor(String),
    #[error("lattice is not integral: {0}")]
    NotIntegral(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::Internal(_) | Error::SearchExhausted(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

pub(crate) fn internal(msg: impl Into<String>) -> Error {
    Error::Internal(msg.into())
}
