use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text. `line` and `column` are 1-based.
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// Well-formed text describing an invalid graph.
    #[error("invalid graph at {location}: {message}")]
    Semantic { location: String, message: String },

    #[error("unknown node {0}")]
    UnknownNode(u64),

    #[error("feature count exceeds 32 bits")]
    CountOverflow,

    #[error("gram length must be between 1 and {max}, got {got}")]
    InvalidGramLength { got: usize, max: usize },

    #[error("signature has no features (empty graph)")]
    EmptySignature,

    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),

    #[error("invalid projection parameters: {0}")]
    InvalidParams(String),

    #[error("hash decode error: {0}")]
    HashDecode(String),

    #[error("graph has {nodes} nodes, budget is {budget}")]
    BudgetExceeded { nodes: usize, budget: usize },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("partition covers {partition} items, ground truth has {truth}")]
    ItemMismatch { partition: usize, truth: usize },

    #[error("comparing items {i} and {j}: {source}")]
    Comparator {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
