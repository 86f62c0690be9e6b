use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for {what} of length {len}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("site kind does not match metric: {0}")]
    SiteKind(String),

    #[error("empty set: {0}")]
    Empty(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("enumeration budget exceeded: {needed} subsets needed, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("metric is not Euclidean (l2 over coordinates)")]
    NotEuclidean,

    #[error("unbounded approximation ratio: optimum is 0 but candidate costs {0}")]
    InfiniteRatio(f64),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("code construction failed: {0}")]
    Code(String),

    #[error("graph error: {0}")]
    Graph(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
