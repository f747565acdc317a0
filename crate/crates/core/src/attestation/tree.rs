//! Turning a process spec plus keys and documents into positional chains.

use std::collections::BTreeMap;

use super::{
    attest_doc, attest_role, pad_chain_with, verify_chain, AttestationChain, ChainStep,
    DocAttestation, DocInfo, RoleAttestation, RoleInfo,
};
use crate::crypto::{Digest256, KeyPair};
use crate::error::{Error, Result};
use crate::policy::compute_ref;
use crate::spec::ProcessSpec;

/// Every attestation a phase produces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AttestationSet {
    /// Keyed by subject role id. The root's entry is its self-attestation,
    /// needed only when some chain must be padded.
    pub roles: BTreeMap<String, RoleAttestation>,
    /// Keyed by doctype name.
    pub documents: BTreeMap<String, DocAttestation>,
}

/// Signs every role edge, the root self-attestation and every document.
/// `payload_hashes` maps doctype name to the document identifier.
pub fn build_attestations(
    spec: &ProcessSpec,
    keys: &BTreeMap<String, KeyPair>,
    payload_hashes: &BTreeMap<String, Digest256>,
) -> Result<AttestationSet> {
    let key = |id: &str| keys.get(id).ok_or_else(|| Error::MissingKey(id.to_string()));
    let mut set = AttestationSet::default();

    for role in &spec.roles {
        let subject = key(&role.id)?;
        let attestor = match &role.parent {
            Some(p) => key(p)?,
            None => subject,
        };
        let rinfo = RoleInfo::new(spec.role_permissions(&role.id)?);
        set.roles
            .insert(role.id.clone(), attest_role(&attestor.sk, subject.pk, rinfo)?);
    }

    for slot in spec.reference_order()? {
        let doc = &spec.documents[slot];
        let identifier = *payload_hashes
            .get(&doc.doctype)
            .ok_or_else(|| Error::MissingPayload(doc.doctype.clone()))?;
        let dinfo = document_info(spec, &doc.doctype, identifier, payload_hashes)?;
        set.documents
            .insert(doc.doctype.clone(), attest_doc(&key(&doc.author)?.sk, dinfo)?);
    }
    Ok(set)
}

/// The `DocInfo` for `doctype`: its reference is the hash of the
/// identifiers of the documents it references, looked up in `identifiers`.
pub fn document_info(
    spec: &ProcessSpec,
    doctype: &str,
    identifier: Digest256,
    identifiers: &BTreeMap<String, Digest256>,
) -> Result<DocInfo> {
    let slot = spec
        .slot_of(doctype)
        .ok_or_else(|| Error::InvalidSpec(format!("no document of type `{doctype}`")))?;
    let ids: Vec<Digest256> = spec.references_by_slot()[slot]
        .iter()
        .map(|&r| {
            let name = &spec.documents[r].doctype;
            identifiers
                .get(name)
                .copied()
                .ok_or_else(|| Error::MissingPayload(name.clone()))
        })
        .collect::<Result<_>>()?;
    Ok(DocInfo {
        doctype: spec.doctype_code(doctype).expect("validated spec"),
        identifier,
        reference: compute_ref(&ids, spec.hash.ref_hash),
    })
}

/// Assembles one chain per document slot from existing attestations, pads
/// each to the spec height and checks every result with [`verify_chain`].
pub fn assemble_chains(spec: &ProcessSpec, set: &AttestationSet) -> Result<Vec<AttestationChain>> {
    let root_id = spec.root_role().id.clone();
    let root_rinfo = RoleInfo::new(spec.root_rinfo());
    let role_att = |id: &str| {
        set.roles
            .get(id)
            .ok_or_else(|| Error::MissingAttestation(format!("role `{id}`")))
    };
    let rinfo_of = |id: &str| -> Result<RoleInfo> {
        if id == root_id {
            Ok(root_rinfo)
        } else {
            Ok(role_att(id)?.subject_rinfo)
        }
    };

    let mut chains = Vec::with_capacity(spec.documents.len());
    for (slot, doc) in spec.documents.iter().enumerate() {
        let att = set
            .documents
            .get(&doc.doctype)
            .ok_or_else(|| Error::MissingAttestation(format!("document `{}`", doc.doctype)))?;
        if Some(att.dinfo.doctype) != spec.doctype_code(&doc.doctype) {
            return Err(Error::malformed(
                "document attestation",
                format!("slot {slot} expects doctype `{}`", doc.doctype),
            ));
        }
        let path = spec.path_to_root(&doc.author);
        let mut chain = AttestationChain {
            dinfo: att.dinfo,
            pk0: att.author_pk,
            rinfo0: rinfo_of(&path[0])?,
            docsig: att.sig,
            steps: Vec::with_capacity(spec.height - 1),
        };
        for w in path.windows(2) {
            let edge = role_att(&w[0])?;
            chain.steps.push(ChainStep {
                pk: edge.attestor_pk,
                rinfo: rinfo_of(&w[1])?,
                sig: edge.sig,
            });
        }
        let self_att = set.roles.get(&root_id);
        let chain = pad_chain_with(chain, spec.height, self_att)?;
        if !verify_chain(&chain) {
            return Err(Error::InvalidChain { slot });
        }
        chains.push(chain);
    }
    Ok(chains)
}

/// One padded, verified chain per document, tracing author to root.
pub fn chains_from_tree(
    spec: &ProcessSpec,
    keys: &BTreeMap<String, KeyPair>,
    payload_hashes: &BTreeMap<String, Digest256>,
) -> Result<Vec<AttestationChain>> {
    let set = build_attestations(spec, keys, payload_hashes)?;
    assemble_chains(spec, &set)
}
