use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("symbol {symbol} at position {position} is not in the alphabet")]
    UnknownSymbol { symbol: String, position: usize },

    #[error("invalid order: {0}")]
    InvalidOrder(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    /// A policy under which the terminal states are not reached with
    /// probability one. Carries the states of the trapping end component.
    #[error("improper policy: end component {{{}}} never reaches a terminal state", .end_component.join(", "))]
    ImproperPolicy { end_component: Vec<String> },

    #[error("value iteration did not converge after {iterations} sweeps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("value vector differs from R·p by {gap:e}")]
    IdentityGap { gap: f64 },

    #[error("linear solve failed: {0}")]
    Singular(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("instance exceeds oracle cap: {0}")]
    OverCap(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
