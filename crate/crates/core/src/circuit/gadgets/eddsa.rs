//! In-circuit EdDSA verification matching `crypto::verify`.

use ark_crypto_primitives::sponge::constraints::CryptographicSpongeVar;
use ark_crypto_primitives::sponge::poseidon::constraints::PoseidonSpongeVar;
use ark_ff::{One, PrimeField};
use ark_r1cs_std::alloc::AllocVar;
use ark_r1cs_std::boolean::Boolean;
use ark_r1cs_std::convert::ToBitsGadget;
use ark_r1cs_std::fields::fp::FpVar;
use ark_r1cs_std::R1CSVar;
use ark_relations::r1cs::{ConstraintSystemRef, SynthesisError};

use super::edwards::PointVar;
use crate::crypto::{poseidon_config, CircuitField, CurvePoint, CurveScalar, Signature};

type F = CircuitField;

/// Bits of the subgroup order needed to represent any canonical `s`.
const SCALAR_BITS: usize = 251;

#[derive(Clone, Debug)]
pub struct SignatureVar {
    pub r: PointVar,
    pub s: FpVar<F>,
}

impl SignatureVar {
    pub fn new_witness(
        cs: ConstraintSystemRef<F>,
        f: impl FnOnce() -> Result<Signature, SynthesisError>,
    ) -> Result<Self, SynthesisError> {
        let sig = f().ok();
        let missing = SynthesisError::AssignmentMissing;
        let r = PointVar::new_witness(cs.clone(), || sig.map(|s| s.r).ok_or(missing))?;
        let s = FpVar::new_witness(cs, || sig.map(|s| s.s).ok_or(missing))?;
        Ok(Self { r, s })
    }
}

/// Poseidon(R.x, R.y, A.x, A.y, msg..), the same sponge as the native challenge.
pub fn challenge(r: &PointVar, a: &PointVar, msg: &[FpVar<F>]) -> Result<FpVar<F>, SynthesisError> {
    let mut input = vec![r.x.clone(), r.y.clone(), a.x.clone(), a.y.clone()];
    input.extend_from_slice(msg);
    let cs = input.iter().fold(ConstraintSystemRef::None, |acc, v| acc.or(v.cs()));
    let mut sponge = PoseidonSpongeVar::new(cs, poseidon_config());
    sponge.absorb(&input)?;
    Ok(sponge.squeeze_field_elements(1)?.remove(0))
}

/// Enforces `[8](s·B) == [8](R + c·A)` with `s < r` and `A`, `R` on the curve.
pub fn enforce_signature(pk: &PointVar, msg: &[FpVar<F>], sig: &SignatureVar) -> Result<(), SynthesisError> {
    pk.enforce_on_curve()?;
    sig.r.enforce_on_curve()?;

    let c = challenge(&sig.r, pk, msg)?;
    let c_bits = c.to_bits_le()?;

    let s_bits = sig.s.to_non_unique_bits_le()?;
    let order_minus_one = (-CurveScalar::one()).into_bigint();
    Boolean::enforce_smaller_or_equal_than_le(&s_bits, order_minus_one)?;

    let lhs = PointVar::fixed_base_mul_le(CurvePoint::generator(), &s_bits[..SCALAR_BITS])?;
    let rhs = sig.r.add(&pk.scalar_mul_le(&c_bits)?)?;
    let diff = lhs.add(&rhs.negate())?;
    let diff = diff.double()?.double()?.double()?;
    diff.enforce_equal(&PointVar::identity())
}
