use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus must be positive")]
    ZeroModulus,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("enumeration too large: {size} candidates exceed the cap of {cap}")]
    EnumerationTooLarge { size: String, cap: u64 },

    /// No tuple exists for the requested class.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("class is not admissible: {0}")]
    Inadmissible(String),

    #[error("group must be finite (free rank is {0})")]
    InfiniteGroup(usize),

    #[error("not almost-commuting: commutator of matrices {i} and {j} is {residual:.3e} away from a scalar")]
    NotAlmostCommuting { i: usize, j: usize, residual: f64 },

    #[error("indeterminate class: commutator phase of matrices {i} and {j} is equidistant between two roots of unity")]
    IndeterminateClass { i: usize, j: usize },

    #[error("ill-conditioned spectrum: singular value {value:.3e} is too close to the tolerance {tol:.3e}")]
    IllConditioned { value: f64, tol: f64 },

    #[error("eigenvalue structure violated: {0}")]
    LemmaViolation(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
