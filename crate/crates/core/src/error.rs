use thiserror::Error;

/// Errors raised by constructions, verifiers and searches in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("pattern wraps in coordinate {coordinate}: vertex {vertex:?} uses value k-1")]
    Wrapping { coordinate: usize, vertex: Vec<u32> },

    #[error("transform step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("not a perfect packing: vertex {vertex:?} covered {count} times")]
    NotPacking { vertex: Vec<u32>, count: usize },

    #[error("verification failed at stage `{stage}`: {detail}")]
    Verification { stage: String, detail: String },

    #[error("no seed multiplicity t with t*{pattern_size} = k^e (mod {modulus}) for any exponent e")]
    SeedUnsolvable { pattern_size: usize, modulus: u64 },

    #[error("base conditions fail: {0}")]
    BaseCondition(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn verification(stage: &str, detail: impl Into<String>) -> Self {
        Error::Verification {
            stage: stage.to_string(),
            detail: detail.into(),
        }
    }

    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::Step {
            step,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
