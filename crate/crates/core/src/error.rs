use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("generator `{name}` has arity {expected} but was applied to {found} arguments")]
    ArityMismatch { name: String, expected: usize, found: usize },

    #[error("invalid monomial: {0}")]
    InvalidMonomial(String),

    #[error("invalid graft: {0}")]
    InvalidGraft(String),

    #[error("arity or mode mismatch: {0}")]
    Mismatch(String),

    #[error("occurrence does not belong to this host")]
    StaleOccurrence,

    #[error("rewriting exceeded {0} steps")]
    StepCapExceeded(usize),

    #[error("no unique leading monomial: {0}")]
    LeadingTermTie(String),

    #[error("rule set is not quadratic: {0}")]
    NotQuadratic(String),

    #[error("generator transformation is singular")]
    SingularTransformation,

    #[error("weight must be nonzero")]
    ZeroWeight,

    #[error("rewriting system is not confluent: {0}")]
    NotConfluent(String),

    #[error("morphism check failed: {0}")]
    MorphismFailed(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("catalog: {0}")]
    Catalog(String),
}

pub type Result<T> = std::result::Result<T, Error>;
