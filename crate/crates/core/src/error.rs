use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("zero denominator literal at byte {0}")]
    ZeroDenominator(usize),
    /// A Gröbner computation exceeded its degree or pair budget.
    #[error("budget exceeded: {reason} (pair {pair})")]
    Budget { reason: String, pair: String },
    #[error("rank mismatch: {0}")]
    Rank(String),
    #[error("ring: {0}")]
    Ring(String),
    #[error("prime data: {0}")]
    PrimeData(String),
    #[error("density: {0}")]
    Density(String),
    #[error("codimension: {0}")]
    Codimension(String),
    #[error("patch problem: {0}")]
    Problem(String),
    #[error("search exhausted: {0}")]
    Exhausted(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}
