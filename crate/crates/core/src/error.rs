use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit exceeded: {what} (cap {cap})")]
    ResourceLimit { what: String, cap: usize },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("map is not bijective: {0}")]
    NonBijective(String),

    #[error("inverse mismatch for generator {generator}: {detail}")]
    InverseMismatch { generator: usize, detail: String },

    #[error("relation violated ({relation}) at point {witness}")]
    RelationViolation { relation: String, witness: String },

    #[error("image {value} leaves the ambient interval [{lo}, {hi}]")]
    AmbientOverflow { value: String, lo: String, hi: String },

    #[error("conflicting symbol demands at index {index}")]
    Conflict { index: i64 },

    #[error("conjugacy is not an isometry: {0}")]
    NotIsometric(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn mismatch(msg: impl Into<String>) -> Self {
        Error::DomainMismatch(msg.into())
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. })
    }
}
