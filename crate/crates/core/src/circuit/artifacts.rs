//! On-disk framing for keys and proofs, and the verifier export bundle.
//!
//! Binary artifacts start with a 16-byte magic, a little-endian `u32` format
//! version and the 32-byte spec hash, followed by the arkworks encoding.

use ark_serialize::CanonicalSerialize;
use serde::{Deserialize, Serialize};

use super::{RelationParams, VerificationKey};
use crate::crypto::Digest256;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_BYTES: usize = 16 + 4 + 32;

pub const PROVING_KEY_MAGIC: [u8; 16] = *b"zkphase/provkey\0";
pub const VERIFYING_KEY_MAGIC: [u8; 16] = *b"zkphase/verfkey\0";
pub const PROOF_MAGIC: [u8; 16] = *b"zkphase/proof\0\0\0";

pub(crate) fn write_header(magic: &[u8; 16], spec_hash: &Digest256) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_BYTES);
    out.extend_from_slice(magic);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(spec_hash.as_bytes());
    out
}

/// Splits a framed artifact into its spec hash and payload. With `expect`
/// set, an artifact for another spec is a [`Error::SpecMismatch`].
pub(crate) fn read_header<'a>(
    bytes: &'a [u8],
    magic: &[u8; 16],
    expect: Option<&Digest256>,
) -> Result<(Digest256, &'a [u8])> {
    if bytes.len() < HEADER_BYTES {
        return Err(Error::malformed("artifact", "shorter than header"));
    }
    if &bytes[..16] != magic {
        return Err(Error::malformed("artifact", "wrong magic"));
    }
    let version = u32::from_le_bytes(bytes[16..20].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(Error::malformed("artifact", format!("unsupported version {version}")));
    }
    let hash = Digest256(bytes[20..52].try_into().expect("32 bytes"));
    if let Some(want) = expect {
        if *want != hash {
            return Err(Error::SpecMismatch { expected: want.to_string(), found: hash.to_string() });
        }
    }
    Ok((hash, &bytes[HEADER_BYTES..]))
}

/// Everything a third party needs to check proofs for one spec.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifierExport {
    pub format_version: u32,
    pub proof_system: String,
    pub curve: String,
    pub spec_hash: Digest256,
    pub params: RelationParams,
    /// Public inputs in order, as field elements.
    pub public_inputs: Vec<String>,
    pub verifying_key_hex: String,
    pub proof_bytes: usize,
}

impl VerifierExport {
    pub fn new(params: &RelationParams, vk: &VerificationKey) -> Self {
        let mut vk_bytes = Vec::new();
        vk.inner
            .serialize_compressed(&mut vk_bytes)
            .expect("writing to a Vec cannot fail");
        Self {
            format_version: FORMAT_VERSION,
            proof_system: "groth16".into(),
            curve: "bn254".into(),
            spec_hash: vk.spec_hash,
            params: params.clone(),
            public_inputs: vec!["rpk.x".into(), "rpk.y".into()],
            verifying_key_hex: hex::encode(vk_bytes),
            proof_bytes: super::Proof::BYTES,
        }
    }

    /// Rebuilds the verification key from the bundle.
    pub fn verification_key(&self) -> Result<VerificationKey> {
        let payload = hex::decode(&self.verifying_key_hex)
            .map_err(|e| Error::malformed("verifier export", e.to_string()))?;
        let mut framed = write_header(&VERIFYING_KEY_MAGIC, &self.spec_hash);
        framed.extend_from_slice(&payload);
        VerificationKey::from_bytes(&framed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("export serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
