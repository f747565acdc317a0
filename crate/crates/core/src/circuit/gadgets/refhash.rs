//! In-circuit reference hashing for the phase policy.

use ark_crypto_primitives::crh::sha256::constraints::Sha256Gadget;
use ark_crypto_primitives::sponge::constraints::CryptographicSpongeVar;
use ark_crypto_primitives::sponge::poseidon::constraints::PoseidonSpongeVar;
use ark_r1cs_std::boolean::Boolean;
use ark_r1cs_std::convert::ToBitsGadget;
use ark_r1cs_std::eq::EqGadget;
use ark_r1cs_std::fields::fp::FpVar;
use ark_r1cs_std::uint8::UInt8;
use ark_r1cs_std::R1CSVar;
use ark_relations::r1cs::{ConstraintSystemRef, SynthesisError};

use super::bits::u128_bits_to_be_bytes;
use crate::crypto::{poseidon_config, CircuitField, RefHash, REF_SEPARATOR};

type F = CircuitField;

/// A 256-bit digest held as two 128-bit halves, each with its bits.
#[derive(Clone, Debug)]
pub struct DigestBits {
    pub hi: FpVar<F>,
    pub lo: FpVar<F>,
    pub hi_bits: Vec<Boolean<F>>,
    pub lo_bits: Vec<Boolean<F>>,
}

impl DigestBits {
    /// Little-endian bits of the 256-bit integer `hi·2^128 + lo`.
    fn integer_bits_le(&self) -> Vec<Boolean<F>> {
        self.lo_bits.iter().chain(self.hi_bits.iter()).cloned().collect()
    }

    fn be_bytes(&self) -> Vec<UInt8<F>> {
        let mut out = u128_bits_to_be_bytes(&self.hi_bits);
        out.extend(u128_bits_to_be_bytes(&self.lo_bits));
        out
    }
}

/// Enforces `expected == H(inputs[0] || .. || inputs[k-1])`.
pub fn enforce_reference(
    inputs: &[&DigestBits],
    expected: &DigestBits,
    hash: RefHash,
) -> Result<(), SynthesisError> {
    match hash {
        RefHash::Sha256 => {
            let data: Vec<UInt8<F>> = inputs.iter().flat_map(|d| d.be_bytes()).collect();
            let digest = Sha256Gadget::digest(&data)?;
            let want = expected.be_bytes();
            for (got, want) in digest.0.iter().zip(&want) {
                got.enforce_equal(want)?;
            }
            Ok(())
        }
        RefHash::Poseidon => {
            let mut absorb = vec![FpVar::Constant(*REF_SEPARATOR)];
            for d in inputs {
                absorb.push(d.hi.clone());
                absorb.push(d.lo.clone());
            }
            let cs = absorb
                .iter()
                .chain([&expected.hi, &expected.lo])
                .fold(ConstraintSystemRef::None, |acc, v| acc.or(v.cs()));
            let mut sponge = PoseidonSpongeVar::new(cs, poseidon_config());
            sponge.absorb(&absorb)?;
            let out = sponge.squeeze_field_elements(1)?.remove(0);
            let mut out_bits = out.to_bits_le()?;
            out_bits.resize(256, Boolean::FALSE);
            for (got, want) in out_bits.iter().zip(expected.integer_bits_le()) {
                got.enforce_equal(&want)?;
            }
            Ok(())
        }
    }
}
