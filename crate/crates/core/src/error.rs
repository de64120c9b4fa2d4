use thiserror::Error;

use crate::fincat::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// The input names or shapes are inconsistent (duplicate names, dangling
    /// references, non-composable pairs, missing composites).
    #[error("malformed category: {0}")]
    Malformed(String),

    #[error("category laws violated: {0}")]
    Invalid(ValidationReport),

    #[error("unknown object `{0}`")]
    UnknownObject(String),

    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),

    #[error("unknown fixture `{0}` (expected one of C1, C2, D2, M2, SPAN)")]
    UnknownFixture(String),

    #[error("arrow `{arrow}` does not have codomain `{object}`")]
    CodomainMismatch { arrow: String, object: String },

    #[error("sieves live on different objects (`{left}` vs `{right}`)")]
    ObjectMismatch { left: String, right: String },

    #[error("not a sieve on `{object}`: {reason}")]
    NotASieve { object: String, reason: String },

    #[error("composite assignment: {0}")]
    Assignment(String),

    #[error("operands live on different categories")]
    CategoryMismatch,

    #[error("enumeration guard exceeded: {bound} (limit {limit}, needed at least {actual})")]
    GuardExceeded {
        bound: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("sieve family is not stable under pullback: {0}")]
    NotPullbackStable(String),

    #[error("not a Grothendieck topology: {0}")]
    NotATopology(String),

    #[error("ideal {ideal} is not a {kind}: {reason}")]
    BadIdeal {
        ideal: String,
        kind: &'static str,
        reason: String,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no relativization: the outer closure of {sieve} is {closure}, which is not closed for the base topology")]
    NoRelativization {
        object: String,
        sieve: String,
        closure: String,
    },

    #[error("malformed derivation: {0}")]
    MalformedDerivation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code used in CLI error documents.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Malformed(_) => "malformed",
            Error::Invalid(_) => "invalid-category",
            Error::UnknownObject(_) => "unknown-object",
            Error::UnknownArrow(_) => "unknown-arrow",
            Error::UnknownFixture(_) => "unknown-fixture",
            Error::CodomainMismatch { .. } => "codomain-mismatch",
            Error::ObjectMismatch { .. } => "object-mismatch",
            Error::NotASieve { .. } => "not-a-sieve",
            Error::Assignment(_) => "assignment",
            Error::CategoryMismatch => "category-mismatch",
            Error::GuardExceeded { .. } => "guard-exceeded",
            Error::NotPullbackStable(_) => "not-pullback-stable",
            Error::NotATopology(_) => "not-a-topology",
            Error::BadIdeal { .. } => "bad-ideal",
            Error::Precondition(_) => "precondition",
            Error::NoRelativization { .. } => "no-relativization",
            Error::MalformedDerivation(_) => "malformed-derivation",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
