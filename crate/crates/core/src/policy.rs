//! Business rules: the per-chain subset-delegation policy and the per-phase
//! positional reference policy.

use serde::{Deserialize, Serialize};

use crate::attestation::{DocInfo, RoleInfo};
use crate::crypto::{hash_concat_identifiers, Digest256, RefHash};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainPolicyKind {
    SubsetDelegation,
}

/// Roles may only delegate permissions they hold themselves, and the author
/// must hold the permission for the document's type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainPolicyConfig {
    pub kind: ChainPolicyKind,
    /// One bit per declared doctype.
    pub universe: u64,
    /// Mask held by the root; the last role info of every chain must equal it.
    pub root_mask: u64,
}

impl ChainPolicyConfig {
    pub fn subset_delegation(universe: u64, root_mask: u64) -> Self {
        ChainPolicyConfig {
            kind: ChainPolicyKind::SubsetDelegation,
            universe,
            root_mask,
        }
    }

    /// Number of bit positions the circuit decomposes role masks into.
    pub fn mask_width(&self) -> usize {
        64 - self.universe.leading_zeros() as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhasePolicyKind {
    ReferenceMap,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhasePolicyConfig {
    pub kind: PhasePolicyKind,
    /// Doctype code required in each slot.
    pub slots: Vec<u64>,
    /// For each slot, the referenced slots in preimage order.
    pub references: Vec<Vec<usize>>,
    pub ref_hash: RefHash,
}

impl PhasePolicyConfig {
    pub fn reference_map(slots: Vec<u64>, references: Vec<Vec<usize>>, ref_hash: RefHash) -> Self {
        PhasePolicyConfig {
            kind: PhasePolicyKind::ReferenceMap,
            slots,
            references,
            ref_hash,
        }
    }
}

/// Reference digest over the given identifiers, in order. Shared by spec
/// authors, chain construction and the circuit.
pub fn compute_ref(referenced_identifiers: &[Digest256], ref_hash: RefHash) -> Digest256 {
    hash_concat_identifiers(referenced_identifiers, ref_hash)
}

/// `rinfos` runs from the author (`rinfo_0`) up to the root.
pub fn chain_policy_eval(cfg: &ChainPolicyConfig, dinfo: &DocInfo, rinfos: &[RoleInfo]) -> bool {
    let (Some(first), Some(last)) = (rinfos.first(), rinfos.last()) else {
        return false;
    };
    cfg.root_mask & !cfg.universe == 0
        && dinfo.doctype & !cfg.universe == 0
        && dinfo.doctype & first.permissions != 0
        && rinfos.windows(2).all(|w| w[0].is_subset_of(&w[1]))
        && last.permissions == cfg.root_mask
}

pub fn phase_policy_eval(dinfos: &[DocInfo], cfg: &PhasePolicyConfig) -> bool {
    if dinfos.len() != cfg.slots.len() || cfg.references.len() != cfg.slots.len() {
        return false;
    }
    for (i, d) in dinfos.iter().enumerate() {
        if d.doctype != cfg.slots[i] {
            return false;
        }
        let mut ids = Vec::with_capacity(cfg.references[i].len());
        for &r in &cfg.references[i] {
            match dinfos.get(r) {
                Some(target) => ids.push(target.identifier),
                None => return false,
            }
        }
        if d.reference != compute_ref(&ids, cfg.ref_hash) {
            return false;
        }
    }
    true
}
