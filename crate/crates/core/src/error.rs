use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unknown user {user_id} referenced as {role} ({context})")]
    DanglingUser {
        user_id: u64,
        role: &'static str,
        context: String,
    },

    #[error("duplicate instance id {0}")]
    DuplicateInstance(u64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate labels: training data must contain both classes")]
    DegenerateLabels,

    #[error("non-finite value for FT{feature} in instance {instance_id}")]
    NonFinite { instance_id: u64, feature: u8 },

    #[error("feature vector has no coordinate for FT{0}")]
    MissingFeature(u8),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error(
        "insufficient instances: {positives} positives and {negatives} negatives \
         fill only {achievable} of the {requested} requested batches"
    )]
    InsufficientInstances {
        positives: usize,
        negatives: usize,
        achievable: usize,
        requested: usize,
    },

    #[error("model features {found:?} do not match the requested pair {expected:?}")]
    FeatureMismatch { expected: Vec<u8>, found: Vec<u8> },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
