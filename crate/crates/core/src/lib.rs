//! Attestation chains over hierarchical business processes, with a
//! zero-knowledge proof that a whole phase was carried out under a given
//! root key.
//!
//! The layers, bottom up:
//!
//! - [`crypto`]: EdDSA over Baby Jubjub with a Poseidon challenge, and the
//!   fixed message encodings for documents and role delegations.
//! - [`attestation`]: signed document and role attestations, chains from an
//!   author to the root, padding and signature counting.
//! - [`policy`]: native evaluation of the chain and phase policies.
//! - [`circuit`]: the same relation in R1CS, with Groth16 setup, proving and
//!   verification.
//! - [`bench`]: scaling measurements.

pub mod attestation;
pub mod bench;
pub mod circuit;
pub mod crypto;
pub mod error;
pub mod policy;
pub mod sample;
pub mod spec;

pub use attestation::{
    attest_doc, attest_role, count_signatures, pad_chain, verify_chain, AttestationChain, DocInfo,
    RoleInfo, SignatureCount,
};
pub use circuit::{
    check_witness, constraint_count, cost_breakdown, prove, relation_holds, setup, verify_proof, ConstraintGroup,
    Proof, ProvingKey, PublicInputs, RelationParams, VerificationKey, Witness,
};
pub use crypto::{kgen, sign, verify, KeyPair, Message, PublicKey, SecretKey, Signature};
pub use error::{Error, Result};
pub use spec::ProcessSpec;
