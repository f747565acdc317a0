//! Signature scheme, message encoding and hash primitives.
//!
//! Signatures are EdDSA over the twisted Edwards curve embedded in the BN254
//! scalar field, with a Poseidon challenge hash. Every signed message is a
//! fixed-width vector of [`CircuitField`] elements whose first element is a
//! domain separator, so documents and role assignments can never collide.

mod eddsa;
mod hash;
mod keyfile;

use ark_crypto_primitives::sponge::poseidon::{find_poseidon_ark_and_mds, PoseidonConfig};
use ark_ff::PrimeField;
use once_cell::sync::Lazy;

pub use eddsa::{kgen, sign, verify, verify_bytes, CurvePoint, KeyPair, PublicKey, SecretKey, Signature};
pub use hash::{
    document_identifier, hash_concat_identifiers, sha256, Digest256, HashConfig, RefHash,
};
pub use keyfile::{KeyFile, SCHEME_ID};

use crate::attestation::{DocInfo, RoleInfo};
use crate::error::{Error, Result};

/// Scalar field of the proof system; also the base field of the signature curve.
pub type CircuitField = ark_bn254::Fr;

/// Scalar field of the signature curve's prime-order subgroup.
pub type CurveScalar = ark_ed_on_bn254::Fr;

/// Number of field elements in every signed message.
pub const MESSAGE_WIDTH: usize = 6;

pub static DOC_SEPARATOR: Lazy<CircuitField> =
    Lazy::new(|| CircuitField::from_be_bytes_mod_order(b"zkphase/doc-attestation/v1"));
pub static ROLE_SEPARATOR: Lazy<CircuitField> =
    Lazy::new(|| CircuitField::from_be_bytes_mod_order(b"zkphase/role-attestation/v1"));
pub static REF_SEPARATOR: Lazy<CircuitField> =
    Lazy::new(|| CircuitField::from_be_bytes_mod_order(b"zkphase/reference/v1"));

const POSEIDON_RATE: usize = 4;
const POSEIDON_FULL_ROUNDS: usize = 8;
const POSEIDON_PARTIAL_ROUNDS: usize = 60;
const POSEIDON_ALPHA: u64 = 5;

static POSEIDON: Lazy<PoseidonConfig<CircuitField>> = Lazy::new(|| {
    let (ark, mds) = find_poseidon_ark_and_mds::<CircuitField>(
        CircuitField::MODULUS_BIT_SIZE as u64,
        POSEIDON_RATE,
        POSEIDON_FULL_ROUNDS as u64,
        POSEIDON_PARTIAL_ROUNDS as u64,
        0,
    );
    PoseidonConfig::new(
        POSEIDON_FULL_ROUNDS,
        POSEIDON_PARTIAL_ROUNDS,
        POSEIDON_ALPHA,
        mds,
        ark,
        POSEIDON_RATE,
        1,
    )
});

/// Poseidon parameters shared by the native hash and the circuit gadget.
pub fn poseidon_config() -> &'static PoseidonConfig<CircuitField> {
    &POSEIDON
}

/// An ordered sequence of field elements to be signed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Message(Vec<CircuitField>);

impl Message {
    pub fn new(elems: Vec<CircuitField>) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::EmptyMessage);
        }
        Ok(Message(elems))
    }

    pub fn elements(&self) -> &[CircuitField] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Canonical byte form (32-byte little-endian per element), used for
    /// deterministic nonce derivation.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.iter().flat_map(field_to_le_bytes).collect()
    }
}

/// Layout: `[DOC_SEPARATOR, doctype, id_hi, id_lo, ref_hi, ref_lo]`.
pub fn encode_doc_message(dinfo: &DocInfo) -> Message {
    Message(vec![
        *DOC_SEPARATOR,
        CircuitField::from(dinfo.doctype),
        CircuitField::from(dinfo.identifier.hi()),
        CircuitField::from(dinfo.identifier.lo()),
        CircuitField::from(dinfo.reference.hi()),
        CircuitField::from(dinfo.reference.lo()),
    ])
}

/// Layout: `[ROLE_SEPARATOR, pk.x, pk.y, permissions, 0, 0]`.
///
/// The subject key enters as its two affine coordinates; the trailing zeros
/// keep role messages the same width as document messages.
pub fn encode_role_message(pk: &PublicKey, rinfo: &RoleInfo) -> Message {
    Message(vec![
        *ROLE_SEPARATOR,
        pk.x(),
        pk.y(),
        CircuitField::from(rinfo.permissions),
        CircuitField::from(0u64),
        CircuitField::from(0u64),
    ])
}

pub(crate) fn field_to_le_bytes(f: &CircuitField) -> [u8; 32] {
    use ark_ff::BigInteger;
    let v = f.into_bigint().to_bytes_le();
    let mut out = [0u8; 32];
    out[..v.len()].copy_from_slice(&v);
    out
}

/// Parses a canonical little-endian field element; rejects values >= modulus.
pub(crate) fn field_from_le_bytes(bytes: &[u8]) -> Result<CircuitField> {
    use ark_ff::BigInteger;
    if bytes.len() != 32 {
        return Err(Error::malformed("field element", format!("{} bytes", bytes.len())));
    }
    let mut bits = Vec::with_capacity(256);
    for b in bytes {
        for i in 0..8 {
            bits.push((b >> i) & 1 == 1);
        }
    }
    let big = <CircuitField as PrimeField>::BigInt::from_bits_le(&bits);
    CircuitField::from_bigint(big).ok_or_else(|| Error::malformed("field element", "not canonical"))
}
