use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid step function: {0}")]
    InvalidStepFn(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid space descriptor: {0}")]
    InvalidSpace(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("sign search failed: {0}")]
    SearchFailed(String),

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    /// A branch that the underlying mathematics rules out was reached.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("unknown experiment id `{0}`")]
    UnknownExperiment(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
