//! Error type shared by all modules.

/// Failure modes of the library.
///
/// Domain errors come from invalid inputs and are detectable before any
/// computation; the remaining variants arise during evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input parameter lies outside its mathematical domain.
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// A quantity diverges at the supplied parameter value.
    #[error("{what} diverges at {name} = {value}")]
    Divergent {
        what: &'static str,
        name: &'static str,
        value: f64,
    },

    /// An iterative or truncated evaluation failed to reach its tolerance.
    #[error("{what} did not converge: {detail}")]
    NoConvergence { what: &'static str, detail: String },

    /// Mismatched vector or matrix dimensions.
    #[error("{what}: expected dimension {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// An ensemble operation was given no data.
    #[error("empty ensemble")]
    EmptyEnsemble,
}

pub type Result<T> = std::result::Result<T, Error>;
