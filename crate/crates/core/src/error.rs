use thiserror::Error;

/// Errors produced while loading inputs, generating plans, or evaluating energies.
#[derive(Debug, Error)]
pub enum Error {
    /// A model, profile, or plan document could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A layer violates a structural rule (shape chain, window size, neuron count).
    #[error("layer {layer}: {message}")]
    Layer { layer: usize, message: String },

    /// Input that parsed but is semantically invalid.
    #[error("validation error: {0}")]
    Validation(String),

    /// A plan does not fit the model it is evaluated against.
    #[error("plan/model mismatch: {0}")]
    Mismatch(String),

    #[error("infeasible: {partitions} partitions requested for a {layers}-layer model")]
    Infeasible { partitions: usize, layers: usize },

    #[error("search space too large: {size} assignments exceeds the limit of {limit}")]
    SearchSpace { size: String, limit: u64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub(crate) fn layer_err(layer: usize, message: impl Into<String>) -> Error {
    Error::Layer { layer, message: message.into() }
}
