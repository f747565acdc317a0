//! Deterministic keys, documents and chains for demos, tests and benchmarks.

use std::collections::BTreeMap;

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::attestation::{chains_from_tree, AttestationChain};
use crate::crypto::{document_identifier, kgen, Digest256, HashConfig, KeyPair, PublicKey, RefHash};
use crate::error::Result;
use crate::spec::{DoctypeDecl, DocumentDecl, ProcessSpec, RoleDecl};

/// Key for `role` derived from `seed`; distinct roles get distinct keys.
pub fn role_key(seed: u64, role: &str) -> KeyPair {
    let mut h = Sha256::new();
    h.update(b"zkphase/sample-key/v1");
    h.update(seed.to_le_bytes());
    h.update(role.as_bytes());
    kgen(Some(h.finalize().into()))
}

pub fn role_keys(spec: &ProcessSpec, seed: u64) -> BTreeMap<String, KeyPair> {
    spec.roles.iter().map(|r| (r.id.clone(), role_key(seed, &r.id))).collect()
}

/// Placeholder document text for each doctype.
pub fn document_payloads(spec: &ProcessSpec, seed: u64) -> BTreeMap<String, Vec<u8>> {
    spec.documents
        .iter()
        .map(|d| {
            let text = format!(
                "{} / {}\nissued by {} (sample {seed})\n",
                spec.name, d.doctype, d.author
            );
            (d.doctype.clone(), text.into_bytes())
        })
        .collect()
}

pub fn payload_hashes(payloads: &BTreeMap<String, Vec<u8>>) -> BTreeMap<String, Digest256> {
    payloads
        .iter()
        .map(|(k, v)| (k.clone(), document_identifier(v)))
        .collect()
}

/// Everything a complete phase produces.
#[derive(Clone, Debug)]
pub struct SamplePhase {
    pub keys: BTreeMap<String, KeyPair>,
    pub payloads: BTreeMap<String, Vec<u8>>,
    pub chains: Vec<AttestationChain>,
    pub rpk: PublicKey,
}

pub fn sample_phase(spec: &ProcessSpec, seed: u64) -> Result<SamplePhase> {
    let keys = role_keys(spec, seed);
    let payloads = document_payloads(spec, seed);
    let chains = chains_from_tree(spec, &keys, &payload_hashes(&payloads))?;
    let rpk = keys[&spec.root_role().id].pk;
    Ok(SamplePhase { keys, payloads, chains, rpk })
}

/// Chains and root key for `spec` under sample keys.
pub fn synthetic_chains(spec: &ProcessSpec, seed: u64) -> Result<(Vec<AttestationChain>, PublicKey)> {
    let p = sample_phase(spec, seed)?;
    Ok((p.chains, p.rpk))
}

/// A random valid process tree with `chains` documents and at most
/// `height` roles on any author path. Role permissions are the doctypes
/// authored in each subtree; the root holds all of them. References point
/// only to earlier slots, so they are acyclic.
pub fn random_tree_spec<R: Rng>(rng: &mut R, chains: usize, height: usize, ref_hash: RefHash) -> ProcessSpec {
    assert!((1..=64).contains(&chains) && height >= 1);
    let role_count = rng.gen_range(1..=chains + 1);
    let mut parents: Vec<Option<usize>> = vec![None];
    let mut depth = vec![1usize];
    for _ in 1..role_count {
        let candidates: Vec<usize> = (0..parents.len()).filter(|&p| depth[p] < height).collect();
        let Some(&p) = candidates.get(rng.gen_range(0..candidates.len().max(1))) else { break };
        parents.push(Some(p));
        depth.push(depth[p] + 1);
    }
    let doctypes: Vec<DoctypeDecl> = (0..chains)
        .map(|i| DoctypeDecl { name: format!("T{i}"), bit: i as u32 })
        .collect();
    let authors: Vec<usize> = (0..chains).map(|_| rng.gen_range(0..parents.len())).collect();

    let mut perms: Vec<Vec<String>> = vec![Vec::new(); parents.len()];
    perms[0] = doctypes.iter().map(|d| d.name.clone()).collect();
    for (doc, &author) in authors.iter().enumerate() {
        let mut r = Some(author);
        while let Some(i) = r {
            if i != 0 {
                perms[i].push(doctypes[doc].name.clone());
            }
            r = parents[i];
        }
    }
    let roles = parents
        .iter()
        .enumerate()
        .map(|(i, p)| RoleDecl {
            id: format!("P{i}"),
            parent: p.map(|p| format!("P{p}")),
            permissions: perms[i].clone(),
        })
        .collect();
    let documents = (0..chains)
        .map(|i| DocumentDecl {
            doctype: doctypes[i].name.clone(),
            author: format!("P{}", authors[i]),
            references: (0..i)
                .filter(|_| rng.gen_bool(0.3))
                .map(|k| doctypes[k].name.clone())
                .collect(),
        })
        .collect();
    let spec = ProcessSpec {
        name: "random-tree".into(),
        version: 1,
        height,
        chains,
        hash: HashConfig { ref_hash },
        doctypes,
        roles,
        documents,
    };
    spec.validate().expect("generated tree is valid");
    spec
}
