use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Total degree is zero, so the index is 0/0.
    #[error("degree Gini index is undefined: total degree is zero")]
    UndefinedIndex,

    #[error("empty sample list")]
    EmptySamples,

    #[error("unsupported replacement matrix: {0}")]
    UnsupportedMatrix(String),

    #[error("urn is not tenable: {0}")]
    Tenability(String),

    #[error("inconsistent urn-to-tree mapping: {0}")]
    InconsistentMapping(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("replicate {replicate}: {source}")]
    Replicate {
        replicate: u64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
