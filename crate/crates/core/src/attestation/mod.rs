//! Attestation chains: signed paths from a document up through role
//! assignments to the root attestor.

mod files;
mod tree;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::crypto::{
    encode_doc_message, encode_role_message, sign, verify, Digest256, KeyPair, PublicKey,
    SecretKey, Signature,
};
use crate::error::{Error, Result};

pub use files::{ArtifactFile, ChainFile, DocAttestationFile, RoleAttestationFile, Schema};
pub use tree::{assemble_chains, build_attestations, chains_from_tree, document_info, AttestationSet};

/// Document descriptor: one-hot type code, SHA-256 identifier of the
/// document bytes and the digest over the referenced identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DocInfo {
    pub doctype: u64,
    pub identifier: Digest256,
    #[serde(rename = "ref")]
    pub reference: Digest256,
}

impl DocInfo {
    pub fn validate(&self) -> Result<()> {
        if self.doctype.count_ones() != 1 {
            return Err(Error::malformed(
                "document info",
                format!("doctype {:#x} must have exactly one bit set", self.doctype),
            ));
        }
        Ok(())
    }
}

/// Role attributes: a bitmask over doctype codes the holder may author.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RoleInfo {
    pub permissions: u64,
}

impl RoleInfo {
    pub fn new(permissions: u64) -> Self {
        RoleInfo { permissions }
    }

    pub fn is_subset_of(&self, other: &RoleInfo) -> bool {
        self.permissions & !other.permissions == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocAttestation {
    pub dinfo: DocInfo,
    pub author_pk: PublicKey,
    pub sig: Signature,
}

impl DocAttestation {
    pub fn is_valid(&self) -> bool {
        verify(&self.author_pk, &encode_doc_message(&self.dinfo), &self.sig)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleAttestation {
    pub subject_pk: PublicKey,
    pub subject_rinfo: RoleInfo,
    pub attestor_pk: PublicKey,
    pub sig: Signature,
}

impl RoleAttestation {
    pub fn is_valid(&self) -> bool {
        verify(
            &self.attestor_pk,
            &encode_role_message(&self.subject_pk, &self.subject_rinfo),
            &self.sig,
        )
    }
}

pub fn attest_doc(sk: &SecretKey, dinfo: DocInfo) -> Result<DocAttestation> {
    dinfo.validate()?;
    Ok(DocAttestation {
        sig: sign(sk, &encode_doc_message(&dinfo))?,
        author_pk: sk.public_key(),
        dinfo,
    })
}

pub fn attest_role(sk: &SecretKey, subject_pk: PublicKey, subject_rinfo: RoleInfo) -> Result<RoleAttestation> {
    Ok(RoleAttestation {
        sig: sign(sk, &encode_role_message(&subject_pk, &subject_rinfo))?,
        attestor_pk: sk.public_key(),
        subject_pk,
        subject_rinfo,
    })
}

/// `(pk_i, rinfo_i, rolesig_{i-1})`: `pk_i` signed `(pk_{i-1}, rinfo_{i-1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainStep {
    pub pk: PublicKey,
    pub rinfo: RoleInfo,
    pub sig: Signature,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttestationChain {
    pub dinfo: DocInfo,
    pub pk0: PublicKey,
    pub rinfo0: RoleInfo,
    pub docsig: Signature,
    pub steps: Vec<ChainStep>,
}

impl AttestationChain {
    /// One document signature plus one per step.
    pub fn signature_count(&self) -> usize {
        1 + self.steps.len()
    }

    pub fn pks(&self) -> Vec<PublicKey> {
        std::iter::once(self.pk0).chain(self.steps.iter().map(|s| s.pk)).collect()
    }

    pub fn rinfos(&self) -> Vec<RoleInfo> {
        std::iter::once(self.rinfo0)
            .chain(self.steps.iter().map(|s| s.rinfo))
            .collect()
    }

    pub fn signatures(&self) -> impl Iterator<Item = &Signature> {
        std::iter::once(&self.docsig).chain(self.steps.iter().map(|s| &s.sig))
    }

    /// Key of the last attestor; equals the root key on valid chains.
    pub fn terminal_pk(&self) -> PublicKey {
        self.steps.last().map_or(self.pk0, |s| s.pk)
    }

    pub fn terminal_rinfo(&self) -> RoleInfo {
        self.steps.last().map_or(self.rinfo0, |s| s.rinfo)
    }
}

/// True iff the document signature verifies under `pk_0` and every role
/// signature `rolesig_{i-1}` verifies under `pk_i` over `(pk_{i-1}, rinfo_{i-1})`.
pub fn verify_chain(chain: &AttestationChain) -> bool {
    if !verify(&chain.pk0, &encode_doc_message(&chain.dinfo), &chain.docsig) {
        return false;
    }
    let mut prev_pk = chain.pk0;
    let mut prev_rinfo = chain.rinfo0;
    for step in &chain.steps {
        if !verify(&step.pk, &encode_role_message(&prev_pk, &prev_rinfo), &step.sig) {
            return false;
        }
        prev_pk = step.pk;
        prev_rinfo = step.rinfo;
    }
    true
}

/// Extends `chain` to `target_height` signatures with root self-attestations.
pub fn pad_chain(
    chain: AttestationChain,
    target_height: usize,
    root: &KeyPair,
    root_rinfo: RoleInfo,
) -> Result<AttestationChain> {
    if chain.signature_count() >= target_height {
        return pad_chain_with(chain, target_height, None);
    }
    let self_attestation = attest_role(&root.sk, root.pk, root_rinfo)?;
    pad_chain_with(chain, target_height, Some(&self_attestation))
}

/// Like [`pad_chain`] but reuses an existing root self-attestation.
pub fn pad_chain_with(
    mut chain: AttestationChain,
    target_height: usize,
    self_attestation: Option<&RoleAttestation>,
) -> Result<AttestationChain> {
    let have = chain.signature_count();
    if have > target_height {
        return Err(Error::ChainTooLong {
            signatures: have,
            height: target_height,
        });
    }
    if have == target_height {
        return Ok(chain);
    }
    let att = self_attestation.ok_or_else(|| Error::MissingAttestation("root self-attestation".into()))?;
    let root_pk = chain.terminal_pk();
    if att.attestor_pk != root_pk || att.subject_pk != root_pk {
        return Err(Error::NotRootTerminated);
    }
    if att.subject_rinfo != chain.terminal_rinfo() {
        return Err(Error::malformed(
            "chain",
            "terminal role info differs from the root self-attestation",
        ));
    }
    while chain.signature_count() < target_height {
        chain.steps.push(ChainStep {
            pk: root_pk,
            rinfo: att.subject_rinfo,
            sig: att.sig,
        });
    }
    Ok(chain)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureCount {
    /// Signature slots across all chains.
    pub total: usize,
    /// Distinct signature byte strings.
    pub unique: usize,
}

pub fn count_signatures(chains: &[AttestationChain]) -> SignatureCount {
    let mut seen = HashSet::new();
    let mut total = 0;
    for c in chains {
        for s in c.signatures() {
            total += 1;
            seen.insert(s.to_bytes());
        }
    }
    SignatureCount {
        total,
        unique: seen.len(),
    }
}
