use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A value violated a type precondition (non-finite logits, negative
    /// probabilities, mismatched shapes, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A rule or configuration parameter is out of its documented range.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An argument is outside the mathematical domain of the operation
    /// (e.g. tau >= 1 passed to the delta conversion).
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative numerical procedure failed to produce a usable result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The feasibility solver hit its iteration cap without reaching a
    /// verdict. Never silently mapped to feasible or infeasible.
    #[error("solver unresolved after {iterations} iterations")]
    Unresolved { iterations: usize },

    /// The operation refused to run because a size guard was exceeded.
    #[error("refused: {0}")]
    Refused(String),

    /// A file did not conform to the expected on-disk format.
    #[error("format error: {0}")]
    Format(String),

    /// Parameter matching could not establish a monotone bracket around
    /// the target rejection rate.
    #[error(
        "non-monotone bracket: hrr({lo}) = {hrr_lo}, hrr({hi}) = {hrr_hi}, target = {target}"
    )]
    Bracket {
        lo: f64,
        hi: f64,
        hrr_lo: f64,
        hrr_hi: f64,
        target: f64,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
