use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed literal or descriptor.
    #[error("parse error: {0}")]
    Parse(String),

    /// A mathematical precondition or structural invariant does not hold.
    #[error("precondition violated: {0}")]
    Domain(String),

    /// The base field backend cannot perform the requested computation.
    #[error("unsupported by backend {backend}: {what}")]
    Capability { backend: String, what: String },

    #[error("backend mismatch: {0} vs {1}")]
    BackendMismatch(String, String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("subgroup enumeration exceeded {0} elements")]
    SubgroupTooLarge(usize),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capability(backend: impl ToString, what: impl Into<String>) -> Self {
        Error::Capability {
            backend: backend.to_string(),
            what: what.into(),
        }
    }

    pub fn is_capability(&self) -> bool {
        matches!(self, Error::Capability { .. })
    }
}
