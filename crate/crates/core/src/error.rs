use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty history")]
    EmptyHistory,

    #[error("non-finite objective")]
    NonFiniteObjective,

    #[error("insufficient history")]
    InsufficientHistory,

    #[error("insufficient support")]
    InsufficientSupport,

    #[error("cdf has not been built for this marginal")]
    CdfNotBuilt,

    #[error("dimension index {index} out of range for a {dimension}-dimensional history")]
    DimensionOutOfRange { index: usize, dimension: usize },

    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("invalid marginal: {0}")]
    InvalidMarginal(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("objective returned non-finite value {value} at evaluation {index} (point {point:?})")]
    NonFiniteEvaluation {
        index: usize,
        point: Vec<f64>,
        value: f64,
    },

    #[error("unknown objective `{name}`; valid names: {}", .valid.join(", "))]
    UnknownObjective {
        name: String,
        valid: Vec<&'static str>,
    },

    #[error("unknown optimizer `{0}`; valid names: itso-short, itso-full, random, de")]
    UnknownOptimizer(String),

    #[error("ragged input: expected length {expected}, found {found}")]
    Ragged { expected: usize, found: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("external evaluator failed at evaluation {index}: {message}")]
    Evaluator { index: usize, message: String },

    #[error("grid cell {optimizer}/{objective}/run{repeat} failed: {source}")]
    Cell {
        optimizer: String,
        objective: String,
        repeat: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
