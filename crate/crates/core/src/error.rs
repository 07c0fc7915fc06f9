use alloc::string::String;

/// Errors raised anywhere in the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Operand shapes do not fit the operation.
    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    /// A node produced a NaN during the forward pass.
    #[error("NaN produced by node {node} ({op})")]
    NaN { node: usize, op: &'static str },

    /// A non-finite value reached a place that requires finite input.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// An operation was called in the wrong state (e.g. backward before forward).
    #[error("invalid state: {0}")]
    State(String),

    /// A caller broke an API contract.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid user-supplied input (empty sentence, empty batch, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// Invalid configuration or hyperparameters.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A vector whose norm is too small for cosine similarity.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Rank correlation is undefined for the given inputs.
    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    /// Malformed data record.
    #[error("data error: {0}")]
    Data(String),

    /// The sentence has no finite verb to host a negator.
    #[error("no finite verb in root clause")]
    NoFiniteVerb,

    /// The sentence is already negated and negated inputs are being skipped.
    #[error("sentence is already negated")]
    AlreadyNegated,
}

pub type Result<T> = core::result::Result<T, Error>;
