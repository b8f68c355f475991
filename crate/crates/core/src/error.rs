use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractErrorKind {
    #[error("unterminated string or character literal")]
    UnterminatedString,
    #[error("unterminated block comment")]
    UnterminatedComment,
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("`goto` is not supported")]
    Goto,
    #[error("unbalanced braces")]
    UnbalancedBraces,
    #[error("malformed control structure: {0}")]
    Malformed(String),
}

/// Extraction failure at a source line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ExtractError {
    pub line: u32,
    pub kind: ExtractErrorKind,
}

impl ExtractError {
    pub fn malformed(line: u32, what: impl Into<String>) -> Self {
        ExtractError { line, kind: ExtractErrorKind::Malformed(what.into()) }
    }
}

/// An [`ExtractError`] tagged with the file it came from.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{file}:{}", .error)]
pub struct FileError {
    pub file: String,
    pub error: ExtractError,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregateError {
    #[error("empty value vector")]
    Empty,
    #[error("quantile level {0} outside [0, 1]")]
    QuantileLevel(f64),
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("{technique} requires non-negative values, got {value}")]
    Negative { technique: &'static str, value: f64 },
    #[error("{groups} group keys for {rows} rows")]
    GroupLength { rows: usize, groups: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("response has a single class")]
    SingleClass,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("degrees of freedom exhausted: n={n}, p={p}")]
    NoDegreesOfFreedom { n: usize, p: usize },
    #[error("missing predictor `{0}`")]
    MissingPredictor(String),
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("empty sample")]
    EmptySample,
    #[error("exact test requires tie-free samples")]
    Ties,
    #[error("response must be 0 or 1, got {0}")]
    NotBinary(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FilterError {
    #[error("need at least {needed} variables, got {got}")]
    TooFewVariables { needed: usize, got: usize },
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("threshold {0} outside (0, 1)")]
    Threshold(f64),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StudyError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("dataset too small: {0}")]
    TooSmall(String),
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Filter(#[from] FilterError),
}
