use thiserror::Error;

/// Errors raised by data ingestion and by the estimators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: cannot parse {column} value `{value}`")]
    Parse { row: usize, column: String, value: String },
    #[error("row {row}: dates not strictly increasing ({date})")]
    NonMonotoneDate { row: usize, date: String },
    #[error("row {row}: gap in monthly dates, expected {expected} but found {found}")]
    DateGap { row: usize, expected: String, found: String },
    #[error("row {row}: non-positive {column} ({value})")]
    NonPositive { row: usize, column: String, value: f64 },
    #[error("row {row}: negative implied dividend (total return {total} < ex-dividend return {exdiv})")]
    NegativeDividend { row: usize, total: f64, exdiv: f64 },
    #[error("row {row}: price level inconsistent with ex-dividend return (relative error {rel_error:e})")]
    InconsistentPrice { row: usize, rel_error: f64 },
    #[error("insufficient data: need {needed}, got {got} ({context})")]
    InsufficientData { needed: usize, got: usize, context: String },
    #[error("horizon of {horizon} years from index {index} exceeds sample of {len} rows")]
    HorizonExceedsSample { index: usize, horizon: usize, len: usize },
    #[error("singular design: {0}")]
    SingularDesign(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("HAC lag {lag} must be smaller than the number of observations {n_obs}")]
    HacLagTooLarge { lag: usize, n_obs: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported deterministic specification: {0}")]
    UnsupportedDeterministic(String),
    #[error("no long-run solution: own-lag sum {own_lag_sum} is within 1e-6 of one")]
    NoLongRunSolution { own_lag_sum: f64 },
    #[error("empty sample: {0}")]
    EmptySample(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures rooted in the numerical estimation rather than in the input data.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularDesign(_) | Error::Degenerate(_) | Error::NoLongRunSolution { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
