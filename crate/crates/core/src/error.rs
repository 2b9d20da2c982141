use thiserror::Error;

/// Errors raised by library operations.
///
/// Every variant has a stable kebab-case name (see [`CredalError::name`]) that
/// the command-line front end prints when a mathematical precondition fails.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CredalError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid credence: {0}")]
    InvalidCredence(String),
    #[error("unsupported measure: {0}")]
    UnsupportedMeasure(String),
    #[error("not implemented: {0}")]
    NotImplemented(String),
    #[error("every checked atom has infinite inaccuracy; use an omniscient dominator")]
    AllAtomsInfinite,
    #[error("unresolved: {0}")]
    Unresolved(String),
    #[error("unknown example id `{0}`")]
    UnknownExample(String),
}

impl CredalError {
    pub fn name(&self) -> &'static str {
        match self {
            CredalError::InvalidArgument(_) => "invalid-argument",
            CredalError::InvalidCredence(_) => "invalid-credence",
            CredalError::UnsupportedMeasure(_) => "unsupported-measure",
            CredalError::NotImplemented(_) => "not-implemented",
            CredalError::AllAtomsInfinite => "all-atoms-infinite",
            CredalError::Unresolved(_) => "unresolved",
            CredalError::UnknownExample(_) => "unknown-example",
        }
    }
}

pub type Result<T, E = CredalError> = std::result::Result<T, E>;

pub(crate) fn invalid_arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(CredalError::InvalidArgument(msg.into()))
}
