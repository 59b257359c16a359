use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{}row {row} sums to {sum}", line_prefix(*.line))]
    RowSum {
        row: usize,
        sum: String,
        line: Option<usize>,
    },

    #[error("{}weight {weight} is not strictly positive", line_prefix(*.line))]
    NonPositiveWeight { weight: String, line: Option<usize> },

    #[error("{}node id {id} out of range for n = {n}", line_prefix(*.line))]
    NodeOutOfRange {
        id: usize,
        n: usize,
        line: Option<usize>,
    },

    #[error("{}duplicate edge {src} -> {dst}", line_prefix(*.line))]
    DuplicateEdge {
        src: usize,
        dst: usize,
        line: Option<usize>,
    },

    #[error("opinion {value} outside domain [{lo}, {hi}]")]
    OutOfDomain { value: i64, lo: i64, hi: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exact enumeration refused: n = {n} exceeds node budget {budget}")]
    BudgetExceeded { n: usize, budget: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("precondition violated: nodes {side} the truth contain the strictly cohesive set {witness}")]
    CohesiveWitness { side: String, witness: crate::nodeset::NodeSet },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn line_prefix(line: Option<usize>) -> String {
    match line {
        Some(l) => format!("line {l}: "),
        None => String::new(),
    }
}

impl Error {
    /// Attaches a source line number to validation errors that lack one.
    pub(crate) fn at_line(self, at: usize) -> Self {
        match self {
            Error::RowSum { row, sum, line: None } => Error::RowSum {
                row,
                sum,
                line: Some(at),
            },
            Error::NonPositiveWeight { weight, line: None } => Error::NonPositiveWeight {
                weight,
                line: Some(at),
            },
            Error::NodeOutOfRange { id, n, line: None } => Error::NodeOutOfRange {
                id,
                n,
                line: Some(at),
            },
            Error::DuplicateEdge { src, dst, line: None } => Error::DuplicateEdge {
                src,
                dst,
                line: Some(at),
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
