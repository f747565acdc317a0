//! Bit decomposition helpers.

use ark_ff::{BigInteger, PrimeField};
use ark_r1cs_std::alloc::AllocVar;
use ark_r1cs_std::boolean::Boolean;
use ark_r1cs_std::eq::EqGadget;
use ark_r1cs_std::fields::fp::FpVar;
use ark_r1cs_std::uint8::UInt8;
use ark_r1cs_std::R1CSVar;
use ark_relations::r1cs::SynthesisError;

use crate::crypto::CircuitField;

type F = CircuitField;

/// Decomposes `v` into `width` little-endian bits and enforces that they
/// recompose to `v`. Positions where `fixed_zero(i)` holds are constants.
/// A value that needs more than `width` bits (or a set fixed position)
/// leaves the system unsatisfied.
pub fn decompose_le(
    v: &FpVar<F>,
    width: usize,
    fixed_zero: impl Fn(usize) -> bool,
) -> Result<Vec<Boolean<F>>, SynthesisError> {
    let cs = v.cs();
    let value_bits = v.value().ok().map(|x| x.into_bigint().to_bits_le());
    let mut bits = Vec::with_capacity(width);
    for i in 0..width {
        if fixed_zero(i) {
            bits.push(Boolean::FALSE);
        } else if cs.is_none() {
            bits.push(Boolean::constant(value_bits.as_ref().map_or(false, |b| b[i])));
        } else {
            bits.push(Boolean::new_witness(cs.clone(), || {
                value_bits.as_ref().map(|b| b[i]).ok_or(SynthesisError::AssignmentMissing)
            })?);
        }
    }
    Boolean::le_bits_to_fp(&bits)?.enforce_equal(v)?;
    Ok(bits)
}

/// Big-endian bytes of a 128-bit value given as little-endian bits.
pub fn u128_bits_to_be_bytes(bits: &[Boolean<F>]) -> Vec<UInt8<F>> {
    assert_eq!(bits.len(), 128);
    (0..16)
        .map(|k| {
            let start = (15 - k) * 8;
            UInt8::from_bits_le(&bits[start..start + 8])
        })
        .collect()
}
