use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, found n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid number of cities {0} (need 2 <= n <= 32)")]
    InvalidSize(usize),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid clue: {0}")]
    InvalidClue(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid K-set: {0}")]
    InvalidKSet(String),

    #[error("invalid decision tree: {0}")]
    InvalidTree(String),

    #[error("invalid algorithm: {0}")]
    InvalidAlgorithm(String),

    #[error("invalid cap setting: {0}")]
    InvalidCap(String),

    #[error("{what} needs n <= {cap} for exhaustive evaluation, got n = {n}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },

    #[error("precondition failed: {0}")]
    Premise(String),

    #[error("{0} is not a member of K")]
    NotMember(String),

    #[error("K is empty")]
    EmptySet,
}

impl Error {
    /// Precondition and cap failures: the input was well-formed but the
    /// operation does not apply to it.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. } | Error::Premise(_) | Error::NotMember(_) | Error::EmptySet
        )
    }
}
