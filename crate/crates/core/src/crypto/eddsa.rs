use std::fmt;

use ark_crypto_primitives::sponge::{poseidon::PoseidonSponge, CryptographicSponge};
use ark_ec::{AdditiveGroup, AffineRepr, CurveGroup, PrimeGroup};
use ark_ed_on_bn254::{EdwardsAffine, EdwardsProjective};
use ark_ff::{BigInteger, PrimeField, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha512};

use super::{field_from_le_bytes, field_to_le_bytes, poseidon_config, CircuitField, CurveScalar, Message};
use crate::error::{Error, Result};

const KGEN_DOMAIN: &[u8] = b"zkphase/kgen/v1";
const NONCE_DOMAIN: &[u8] = b"zkphase/nonce/v1";

/// Affine curve coordinates as carried on the wire. Decoding does not check
/// curve membership; [`verify`] does.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct CurvePoint {
    pub x: CircuitField,
    pub y: CircuitField,
}

impl CurvePoint {
    pub fn identity() -> Self {
        CurvePoint {
            x: CircuitField::zero(),
            y: CircuitField::from(1u64),
        }
    }

    pub fn generator() -> Self {
        Self::from_affine(&EdwardsAffine::generator())
    }

    pub fn from_affine(p: &EdwardsAffine) -> Self {
        if p.is_zero() {
            return Self::identity();
        }
        CurvePoint { x: p.x, y: p.y }
    }

    pub fn to_affine(&self) -> Option<EdwardsAffine> {
        let p = EdwardsAffine::new_unchecked(self.x, self.y);
        p.is_on_curve().then_some(p)
    }

    pub fn is_on_curve(&self) -> bool {
        self.to_affine().is_some()
    }

    pub fn to_bytes(&self) -> [u8; 64] {
        let mut out = [0u8; 64];
        out[..32].copy_from_slice(&field_to_le_bytes(&self.x));
        out[32..].copy_from_slice(&field_to_le_bytes(&self.y));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 64 {
            return Err(Error::malformed("curve point", format!("{} bytes", bytes.len())));
        }
        Ok(CurvePoint {
            x: field_from_le_bytes(&bytes[..32])?,
            y: field_from_le_bytes(&bytes[32..])?,
        })
    }
}

macro_rules! hex_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_hex())
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                <$ty>::from_hex(&s).map_err(serde::de::Error::custom)
            }
        }
    };
}

/// Public key: 64 bytes, `x || y`, each a little-endian field element.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PublicKey(pub CurvePoint);

impl PublicKey {
    pub const BYTES: usize = 64;

    pub fn x(&self) -> CircuitField {
        self.0.x
    }

    pub fn y(&self) -> CircuitField {
        self.0.y
    }

    pub fn point(&self) -> &CurvePoint {
        &self.0
    }

    pub fn to_bytes(&self) -> [u8; 64] {
        self.0.to_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        CurvePoint::from_bytes(bytes).map(PublicKey)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes = hex::decode(s).map_err(|e| Error::malformed("public key", e.to_string()))?;
        Self::from_bytes(&bytes)
    }
}

impl fmt::Debug for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PublicKey({}…)", &self.to_hex()[..16])
    }
}

hex_serde!(PublicKey);

#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey(pub(crate) CurveScalar);

impl SecretKey {
    pub fn public_key(&self) -> PublicKey {
        let p = (EdwardsProjective::generator() * self.0).into_affine();
        PublicKey(CurvePoint::from_affine(&p))
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        let v = self.0.into_bigint().to_bytes_le();
        let mut out = [0u8; 32];
        out[..v.len()].copy_from_slice(&v);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 32 {
            return Err(Error::malformed("secret key", format!("{} bytes", bytes.len())));
        }
        let s = CurveScalar::from_le_bytes_mod_order(bytes);
        if s.into_bigint().to_bytes_le() != bytes {
            return Err(Error::malformed("secret key", "not a canonical scalar"));
        }
        Ok(SecretKey(s))
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes = hex::decode(s).map_err(|e| Error::malformed("secret key", e.to_string()))?;
        Self::from_bytes(&bytes)
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKey(..)")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyPair {
    pub sk: SecretKey,
    pub pk: PublicKey,
}

impl KeyPair {
    pub fn from_secret(sk: SecretKey) -> Self {
        let pk = sk.public_key();
        KeyPair { sk, pk }
    }
}

/// Signature: 96 bytes, `R.x || R.y || s`, each a little-endian field element.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub r: CurvePoint,
    pub s: CircuitField,
}

impl Signature {
    pub const BYTES: usize = 96;

    pub fn to_bytes(&self) -> [u8; 96] {
        let mut out = [0u8; 96];
        out[..64].copy_from_slice(&self.r.to_bytes());
        out[64..].copy_from_slice(&field_to_le_bytes(&self.s));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != Self::BYTES {
            return Err(Error::malformed("signature", format!("{} bytes", bytes.len())));
        }
        Ok(Signature {
            r: CurvePoint::from_bytes(&bytes[..64])?,
            s: field_from_le_bytes(&bytes[64..])?,
        })
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes = hex::decode(s).map_err(|e| Error::malformed("signature", e.to_string()))?;
        Self::from_bytes(&bytes)
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature({}…)", &self.to_hex()[..16])
    }
}

hex_serde!(Signature);

/// Generates a key pair. With a seed the result is deterministic; the seed is
/// expanded with a domain-separated SHA-512 and reduced into the subgroup
/// scalar field.
pub fn kgen(seed: Option<[u8; 32]>) -> KeyPair {
    let seed = seed.unwrap_or_else(|| {
        let mut s = [0u8; 32];
        rand::rngs::OsRng.fill_bytes(&mut s);
        s
    });
    let mut h = Sha512::new();
    h.update(KGEN_DOMAIN);
    h.update(seed);
    let sk = SecretKey(CurveScalar::from_le_bytes_mod_order(&h.finalize()));
    KeyPair::from_secret(sk)
}

/// Poseidon(R.x, R.y, A.x, A.y, m_0, .., m_k).
pub(crate) fn challenge(r: &CurvePoint, a: &CurvePoint, msg: &Message) -> CircuitField {
    let mut input = Vec::with_capacity(4 + msg.len());
    input.extend_from_slice(&[r.x, r.y, a.x, a.y]);
    input.extend_from_slice(msg.elements());
    let mut sponge = PoseidonSponge::new(poseidon_config());
    sponge.absorb(&input);
    sponge.squeeze_field_elements(1)[0]
}

/// Deterministic EdDSA signature: the nonce is derived from the secret key and
/// the message, so signing the same message twice yields identical bytes.
pub fn sign(sk: &SecretKey, msg: &Message) -> Result<Signature> {
    if msg.is_empty() {
        return Err(Error::EmptyMessage);
    }
    let pk = sk.public_key();
    let mut h = Sha512::new();
    h.update(NONCE_DOMAIN);
    h.update(sk.to_bytes());
    h.update(msg.to_bytes());
    let nonce = CurveScalar::from_le_bytes_mod_order(&h.finalize());
    let r = CurvePoint::from_affine(&(EdwardsProjective::generator() * nonce).into_affine());
    let c = challenge(&r, &pk.0, msg);
    let c = CurveScalar::from_le_bytes_mod_order(&c.into_bigint().to_bytes_le());
    let s = nonce + c * sk.0;
    Ok(Signature {
        r,
        s: CircuitField::from_le_bytes_mod_order(&s.into_bigint().to_bytes_le()),
    })
}

/// Cofactored verification: `[8](s·B) == [8](R + c·A)` with `c` taken as the
/// full 254-bit challenge integer, `s < r` and both points on the curve.
/// The in-circuit verifier enforces exactly the same equation.
pub fn verify(pk: &PublicKey, msg: &Message, sig: &Signature) -> bool {
    if msg.is_empty() {
        return false;
    }
    let (Some(a), Some(r)) = (pk.0.to_affine(), sig.r.to_affine()) else {
        return false;
    };
    let s = sig.s.into_bigint();
    if s >= CurveScalar::MODULUS {
        return false;
    }
    let c = challenge(&sig.r, &pk.0, msg);
    let lhs = EdwardsProjective::generator().mul_bigint(s);
    let rhs = r.into_group() + a.mul_bigint(c.into_bigint());
    let mut diff = lhs - rhs;
    for _ in 0..3 {
        diff.double_in_place();
    }
    diff.is_zero()
}

/// Byte-level verification; anything that fails to decode is rejected.
pub fn verify_bytes(pk: &[u8], msg: &Message, sig: &[u8]) -> bool {
    match (PublicKey::from_bytes(pk), Signature::from_bytes(sig)) {
        (Ok(pk), Ok(sig)) => verify(&pk, msg, &sig),
        _ => false,
    }
}
