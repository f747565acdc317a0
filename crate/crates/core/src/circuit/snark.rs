//! Groth16 over BN254: key generation, proving and verification.

use ark_bn254::Bn254;
use ark_crypto_primitives::snark::SNARK;
use ark_ff::UniformRand;
use ark_groth16::Groth16;
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize, Compress, Validate};
use rand::{CryptoRng, RngCore};

use super::artifacts::{read_header, write_header, PROOF_MAGIC, PROVING_KEY_MAGIC, VERIFYING_KEY_MAGIC};
use super::{synthesize_checked, ProcessCircuit, PublicInputs, RelationParams, Witness};
use crate::crypto::{CircuitField, Digest256};
use crate::error::{Error, Result};
use crate::spec::ProcessSpec;

pub struct ProvingKey {
    pub params: RelationParams,
    pub(crate) inner: ark_groth16::ProvingKey<Bn254>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationKey {
    pub spec_hash: Digest256,
    pub(crate) inner: ark_groth16::VerifyingKey<Bn254>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Proof {
    pub spec_hash: Digest256,
    pub(crate) inner: ark_groth16::Proof<Bn254>,
}

fn to_bytes<T: CanonicalSerialize>(magic: &[u8; 16], hash: &Digest256, v: &T, compress: Compress) -> Vec<u8> {
    let mut out = write_header(magic, hash);
    v.serialize_with_mode(&mut out, compress).expect("writing to a Vec cannot fail");
    out
}

fn from_payload<T: CanonicalDeserialize>(payload: &[u8], compress: Compress, validate: Validate) -> Result<T> {
    let mut reader = payload;
    let v = T::deserialize_with_mode(&mut reader, compress, validate)?;
    if !reader.is_empty() {
        return Err(Error::malformed("artifact", format!("{} trailing bytes", reader.len())));
    }
    Ok(v)
}

impl ProvingKey {
    pub fn verification_key(&self) -> VerificationKey {
        VerificationKey { spec_hash: self.params.spec_hash, inner: self.inner.vk.clone() }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        to_bytes(&PROVING_KEY_MAGIC, &self.params.spec_hash, &self.inner, Compress::No)
    }

    /// Loads a key produced for `spec`. The key is a local prover artifact,
    /// so curve-point validation is skipped.
    pub fn from_bytes(bytes: &[u8], spec: &ProcessSpec) -> Result<Self> {
        let params = RelationParams::from_spec(spec);
        let payload = read_header(bytes, &PROVING_KEY_MAGIC, Some(&params.spec_hash))?.1;
        let inner = from_payload(payload, Compress::No, Validate::No)?;
        Ok(Self { params, inner })
    }
}

impl VerificationKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        to_bytes(&VERIFYING_KEY_MAGIC, &self.spec_hash, &self.inner, Compress::Yes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (spec_hash, payload) = read_header(bytes, &VERIFYING_KEY_MAGIC, None)?;
        let inner = from_payload(payload, Compress::Yes, Validate::Yes)?;
        Ok(Self { spec_hash, inner })
    }

    /// Number of public field elements the key expects.
    pub fn num_public_inputs(&self) -> usize {
        self.inner.gamma_abc_g1.len() - 1
    }
}

impl Proof {
    /// Serialized length; independent of the witness.
    pub const BYTES: usize = super::artifacts::HEADER_BYTES + 128;

    pub fn to_bytes(&self) -> Vec<u8> {
        to_bytes(&PROOF_MAGIC, &self.spec_hash, &self.inner, Compress::Yes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (spec_hash, payload) = read_header(bytes, &PROOF_MAGIC, None)?;
        let inner = from_payload(payload, Compress::Yes, Validate::Yes)?;
        Ok(Self { spec_hash, inner })
    }
}

/// Circuit-specific key generation for `params`.
pub fn setup<R: RngCore + CryptoRng>(params: &RelationParams, rng: &mut R) -> Result<(ProvingKey, VerificationKey)> {
    let circuit = ProcessCircuit::shape(params);
    let (pk, vk) = Groth16::<Bn254>::circuit_specific_setup(circuit, rng)?;
    let pk = ProvingKey { params: params.clone(), inner: pk };
    let vk = VerificationKey { spec_hash: params.spec_hash, inner: vk };
    Ok((pk, vk))
}

/// Proves that `witness` satisfies the relation for `public`. A failing
/// witness yields [`Error::Unsatisfied`] naming the first broken group.
pub fn prove<R: RngCore + CryptoRng>(
    pk: &ProvingKey,
    public: &PublicInputs,
    witness: &Witness,
    rng: &mut R,
) -> Result<Proof> {
    let sat = synthesize_checked(&pk.params, public, witness)?;
    let r = CircuitField::rand(rng);
    let s = CircuitField::rand(rng);
    let inner = Groth16::<Bn254>::create_proof_with_reduction_and_matrices(
        &pk.inner,
        r,
        s,
        &sat.matrices,
        sat.cs.num_instance_variables(),
        sat.cs.num_constraints(),
        &sat.assignment,
    )?;
    Ok(Proof { spec_hash: pk.params.spec_hash, inner })
}

/// True iff `proof` verifies under `vk` for `public`. A key or proof bound
/// to a different spec is rejected.
pub fn verify_proof(vk: &VerificationKey, public: &PublicInputs, proof: &Proof) -> bool {
    if vk.spec_hash != proof.spec_hash {
        return false;
    }
    Groth16::<Bn254>::verify(&vk.inner, &public.to_field_elements(), &proof.inner).unwrap_or(false)
}

/// Byte-level verification; malformed input is rejected, never an error.
pub fn verify_proof_bytes(vk: &VerificationKey, public: &PublicInputs, proof: &[u8]) -> bool {
    Proof::from_bytes(proof).is_ok_and(|p| verify_proof(vk, public, &p))
}
