use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid belief: {0}")]
    InvalidBelief(String),
    #[error("atom {atom}: selection {selection} outside [{lo}, {hi}]")]
    ObedienceViolation { atom: usize, selection: f64, lo: f64, hi: f64 },
    #[error("outcome rows deviate from the prior by {residual:e}")]
    InconsistentPrior { residual: f64 },
    #[error("prior is not in the convex hull of the grid")]
    PriorOffGridHull,
    #[error("level {level} is not attainable under cheap talk at this prior")]
    LevelNotAttainable { level: f64 },
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("no crossing found on the edge toward state {state}")]
    CrossingNotFound { state: usize },
    #[error("operation requires exactly two states")]
    NotBinary,
    #[error("value correspondence is not singleton-valued")]
    NotSingletonValued,
    #[error("game has no receiver value function")]
    MissingReceiverValue,
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
