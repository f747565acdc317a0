use std::io;

use crate::circuit::ConstraintGroup;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot sign an empty message")]
    EmptyMessage,

    #[error("malformed {what}: {reason}")]
    Malformed { what: &'static str, reason: String },

    #[error("invalid process spec: {0}")]
    InvalidSpec(String),

    #[error("no key for role `{0}`")]
    MissingKey(String),

    #[error("no payload hash for doctype `{0}`")]
    MissingPayload(String),

    #[error("no attestation for {0}")]
    MissingAttestation(String),

    #[error("document references form a cycle through `{0}`")]
    CyclicReferences(String),

    #[error("chain carries {signatures} signatures, more than the target height {height}")]
    ChainTooLong { signatures: usize, height: usize },

    #[error("chain does not terminate at the root key")]
    NotRootTerminated,

    #[error("chain for slot {slot} failed verification")]
    InvalidChain { slot: usize },

    #[error("expected {expected} chains, got {actual}")]
    ChainCount { expected: usize, actual: usize },

    #[error("relation unsatisfied: {0}")]
    Unsatisfied(ConstraintGroup),

    #[error("process spec hash mismatch: expected {expected}, found {found}")]
    SpecMismatch { expected: String, found: String },

    #[error("constraint synthesis failed: {0}")]
    Synthesis(#[from] ark_relations::r1cs::SynthesisError),

    #[error("serialization failed: {0}")]
    Serialization(#[from] ark_serialize::SerializationError),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn malformed(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Malformed {
            what,
            reason: reason.into(),
        }
    }
}
