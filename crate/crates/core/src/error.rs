use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid weight at index {index}: {value} (weights must be finite and non-negative)")]
    InvalidWeight { index: usize, value: f64 },

    #[error("weight vector must hold at least one weight")]
    EmptyWeights,

    #[error("order {order} out of range 0..={max}")]
    OrderOutOfRange { order: usize, max: usize },

    #[error("index {index} out of range for {len} weights")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("degenerate weights: {0}")]
    DegenerateWeights(&'static str),

    #[error("cannot draw {requested} items from {available} with positive weight")]
    InfeasibleSample { requested: usize, available: usize },

    #[error("evaluation cost {cost} exceeds budget {budget}")]
    BudgetExceeded { cost: u64, budget: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("source node {0} has no eligible contacts")]
    EmptyPool(usize),

    #[error("source node {0} has no contacts to choose a destination from")]
    NoDestination(usize),

    #[error("at least {needed} points are required for a fit, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("fit predictor has zero variance")]
    DegenerateFit,

    #[error("graph is disconnected ({components} components); enable per-component covering")]
    Disconnected { components: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
