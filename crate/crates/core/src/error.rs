use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown generator symbol `{0}`")]
    UnknownSymbol(String),

    #[error("malformed word `{input}`: {reason}")]
    ParseWord { input: String, reason: String },

    #[error("vertex {0} is not valid for degree {1}")]
    BadVertex(String, usize),

    #[error("invalid permutation: {0}")]
    BadPermutation(String),

    #[error("invalid group spec: {0}")]
    InvalidSpec(String),

    #[error("triviality search visited more than {0} distinct section words")]
    StateSpaceBudgetExceeded(usize),

    #[error("portrait depth exceeded {0}; the group may not be contracting over the declared nucleus")]
    DepthBudgetExceeded(usize),

    #[error("census stored more than {0} distinct elements")]
    MemoryBudgetExceeded(usize),

    #[error("finite image exceeded {0} elements")]
    SizeBudgetExceeded(usize),

    #[error("{0} is not an odd prime")]
    BadPrime(u64),

    #[error("GGS defining vector must not be the zero vector")]
    ZeroVector,

    #[error("GGS defining vector {0:?} is symmetric; the growth formula needs a non-symmetric vector")]
    NonSymmetricRequired(Vec<u64>),

    #[error("GGS vector has {got} entries, expected {expected}")]
    BadVectorLength { expected: usize, got: usize },

    #[error("enumeration of {0} tuples exceeds the budget")]
    EnumerationBudgetExceeded(u128),

    #[error("exact division by {divisor} failed in {context}")]
    ExactDivisionFailure { divisor: u64, context: String },

    #[error("word `{0}` lies in no coset of the transversal")]
    NoCoset(String),

    #[error("word `{word}` lies in cosets of several transversal elements: {indices:?}")]
    AmbiguousTransversal { word: String, indices: Vec<usize> },

    #[error("transversal is invalid: {0}")]
    BadTransversal(String),

    #[error("branch data is inconsistent: {0}")]
    BadBranchData(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("series needs at least {needed} terms, got {got}")]
    EmptySeries { needed: usize, got: usize },

    #[error("series term a_{0} is not positive")]
    NonPositiveTerm(usize),

    #[error("ratio bound violated at n={n}: {detail}")]
    RatioBoundViolated { n: usize, detail: String },

    #[error("precision of {bits} bits is insufficient: {detail}")]
    PrecisionInsufficient { bits: u32, detail: String },

    #[error("invalid JSON document: {0}")]
    Json(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
