//! Versioned JSON envelopes for attestations and chains.

use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use super::{AttestationChain, DocAttestation, RoleAttestation};
use crate::crypto::Digest256;
use crate::error::{Error, Result};

pub trait Schema {
    const SCHEMA: &'static str;
}

impl Schema for AttestationChain {
    const SCHEMA: &'static str = "tot-chain/v1";
}

impl Schema for DocAttestation {
    const SCHEMA: &'static str = "tot-doc-attestation/v1";
}

impl Schema for RoleAttestation {
    const SCHEMA: &'static str = "tot-role-attestation/v1";
}

/// `{schema, spec_hash, label, ...body}`. The label is the slot doctype for
/// chains and document attestations, and the subject role id for role
/// attestations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactFile<T> {
    pub schema: String,
    pub spec_hash: Digest256,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<usize>,
    #[serde(flatten)]
    pub body: T,
}

pub type ChainFile = ArtifactFile<AttestationChain>;
pub type DocAttestationFile = ArtifactFile<DocAttestation>;
pub type RoleAttestationFile = ArtifactFile<RoleAttestation>;

impl<T: Schema + Serialize + DeserializeOwned> ArtifactFile<T> {
    pub fn new(spec_hash: Digest256, label: impl Into<String>, slot: Option<usize>, body: T) -> Self {
        ArtifactFile {
            schema: T::SCHEMA.to_string(),
            spec_hash,
            label: label.into(),
            slot,
            body,
        }
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let f: Self = serde_json::from_slice(bytes)?;
        if f.schema != T::SCHEMA {
            return Err(Error::malformed(
                "artifact file",
                format!("schema `{}`, expected `{}`", f.schema, T::SCHEMA),
            ));
        }
        Ok(f)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read(path)?)
    }

    /// Loads and checks the embedded spec hash.
    pub fn load_for(path: impl AsRef<Path>, spec_hash: &Digest256) -> Result<Self> {
        let f = Self::load(path)?;
        f.check_spec(spec_hash)?;
        Ok(f)
    }

    pub fn check_spec(&self, spec_hash: &Digest256) -> Result<()> {
        if &self.spec_hash != spec_hash {
            return Err(Error::SpecMismatch {
                expected: spec_hash.to_hex(),
                found: self.spec_hash.to_hex(),
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec_pretty(self).expect("artifact serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}
