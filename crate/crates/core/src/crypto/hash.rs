//! Document identifiers and reference digests.

use std::fmt;
use std::str::FromStr;

use ark_crypto_primitives::sponge::{poseidon::PoseidonSponge, CryptographicSponge};
use ark_ff::{BigInteger, PrimeField};
use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use super::{poseidon_config, CircuitField};
use crate::error::{Error, Result};

/// A 256-bit digest, rendered as lowercase hex without prefix.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Digest256(pub [u8; 32]);

impl Digest256 {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    /// Upper 128 bits, big-endian.
    pub fn hi(&self) -> u128 {
        u128::from_be_bytes(self.0[..16].try_into().unwrap())
    }

    /// Lower 128 bits, big-endian.
    pub fn lo(&self) -> u128 {
        u128::from_be_bytes(self.0[16..].try_into().unwrap())
    }

    pub fn from_halves(hi: u128, lo: u128) -> Self {
        let mut out = [0u8; 32];
        out[..16].copy_from_slice(&hi.to_be_bytes());
        out[16..].copy_from_slice(&lo.to_be_bytes());
        Digest256(out)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes = hex::decode(s).map_err(|e| Error::malformed("digest", e.to_string()))?;
        let arr: [u8; 32] = bytes
            .try_into()
            .map_err(|b: Vec<u8>| Error::malformed("digest", format!("{} bytes", b.len())))?;
        Ok(Digest256(arr))
    }
}

impl fmt::Debug for Digest256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest256({})", self.to_hex())
    }
}

impl fmt::Display for Digest256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for Digest256 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_hex(s)
    }
}

impl Serialize for Digest256 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Digest256 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Digest256::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Hash used for the `ref` field of a document descriptor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefHash {
    #[default]
    Sha256,
    Poseidon,
}

impl fmt::Display for RefHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefHash::Sha256 => f.write_str("sha256"),
            RefHash::Poseidon => f.write_str("poseidon"),
        }
    }
}

/// Identifiers are always SHA-256 of the document bytes; only the reference
/// hash is configurable.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HashConfig {
    pub ref_hash: RefHash,
}

pub fn sha256(bytes: &[u8]) -> Digest256 {
    Digest256(Sha256::digest(bytes).into())
}

/// Document identifier: SHA-256 of the raw document bytes.
pub fn document_identifier(bytes: &[u8]) -> Digest256 {
    sha256(bytes)
}

/// Digest of the ordered concatenation of `ids`.
pub fn hash_concat_identifiers(ids: &[Digest256], ref_hash: RefHash) -> Digest256 {
    match ref_hash {
        RefHash::Sha256 => {
            let mut h = Sha256::new();
            for id in ids {
                h.update(id.0);
            }
            Digest256(h.finalize().into())
        }
        RefHash::Poseidon => {
            let elems = poseidon_ref_preimage(ids);
            let mut sponge = PoseidonSponge::new(poseidon_config());
            sponge.absorb(&elems);
            let out: CircuitField = sponge.squeeze_field_elements(1)[0];
            let be = out.into_bigint().to_bytes_be();
            let mut bytes = [0u8; 32];
            bytes[32 - be.len()..].copy_from_slice(&be);
            Digest256(bytes)
        }
    }
}

/// Field-element preimage for the algebraic reference hash: a domain tag
/// followed by the (hi, lo) halves of each identifier.
pub(crate) fn poseidon_ref_preimage(ids: &[Digest256]) -> Vec<CircuitField> {
    let mut elems = Vec::with_capacity(1 + 2 * ids.len());
    elems.push(*super::REF_SEPARATOR);
    for id in ids {
        elems.push(CircuitField::from(id.hi()));
        elems.push(CircuitField::from(id.lo()));
    }
    elems
}
