use thiserror::Error;

/// Errors raised by the library. Variable indices in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: malformed clause {lits:?}: {reason}")]
    MalformedClause {
        line: usize,
        lits: Vec<i64>,
        reason: &'static str,
    },
    #[error("variable x{var} out of range 1..={n}")]
    VarOutOfRange { var: i64, n: usize },
    #[error("header declares {declared} clauses, body has {found}")]
    HeaderMismatch { declared: usize, found: usize },
    #[error("assignment of length {len} does not cover variable x{var}")]
    UncoveredVariable { var: usize, len: usize },
    #[error("the empty matrix has no descriptor")]
    EmptySet,
    #[error("{what} over {n} variables exceeds the exhaustive bound {limit}")]
    TooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
    },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("resource cap hit at x{t}: {len} entries")]
    ResourceCap { t: usize, len: usize },
    #[error("closed form fails for h_{t} of the {part} sub-problem")]
    Property2Violation { t: usize, part: &'static str },
    #[error("cannot draw {m} distinct clauses over {n} variables")]
    GenerationInfeasible { n: usize, m: usize },
    #[error("polynomial text: {0}")]
    PolyText(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
