//! Declarative process description: doctypes, role tree, documents and the
//! fixed circuit shape (chain count `l`, height `n`).
//!
//! `height` counts signatures per chain: one document attestation plus
//! `height - 1` role attestations ending at the root. A document authored at
//! depth `d` of the role tree has a natural chain of `d + 1` signatures and is
//! padded up to `height`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::crypto::{Digest256, HashConfig};
use crate::error::{Error, Result};
use crate::policy::{ChainPolicyConfig, PhasePolicyConfig};

const SPEC_HASH_DOMAIN: &[u8] = b"zkphase/process-spec/v1\0";
const RAILWAY_PHASE1: &str = include_str!("../fixtures/railway_phase1.toml");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoctypeDecl {
    pub name: String,
    pub bit: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleDecl {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default)]
    pub permissions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentDecl {
    pub doctype: String,
    pub author: String,
    #[serde(default)]
    pub references: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub name: String,
    #[serde(default = "default_version")]
    pub version: u32,
    /// Signatures per chain (`n`).
    pub height: usize,
    /// Number of chains (`l`); must equal the number of documents.
    pub chains: usize,
    #[serde(default)]
    pub hash: HashConfig,
    pub doctypes: Vec<DoctypeDecl>,
    pub roles: Vec<RoleDecl>,
    pub documents: Vec<DocumentDecl>,
}

fn default_version() -> u32 {
    1
}

impl ProcessSpec {
    /// The bundled Sektorleitlinie 22 phase-1 configuration.
    pub fn railway_phase1() -> Self {
        Self::from_toml_str(RAILWAY_PHASE1).expect("bundled railway spec is valid")
    }

    pub fn railway_phase1_toml() -> &'static str {
        RAILWAY_PHASE1
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let spec: ProcessSpec = toml::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: ProcessSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Loads `.json` as JSON and anything else as TOML.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_toml_str(&text),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("spec serializes to toml")
    }

    /// SHA-256 over a domain tag and the canonical JSON form. Every artifact
    /// derived from this spec carries this value.
    pub fn content_hash(&self) -> Digest256 {
        let mut bytes = SPEC_HASH_DOMAIN.to_vec();
        bytes.extend(serde_json::to_vec(self).expect("spec serializes to json"));
        crate::crypto::sha256(&bytes)
    }

    pub fn doctype_code(&self, name: &str) -> Option<u64> {
        self.doctypes.iter().find(|d| d.name == name).map(|d| 1u64 << d.bit)
    }

    pub fn doctype_name(&self, code: u64) -> Option<&str> {
        self.doctypes
            .iter()
            .find(|d| 1u64 << d.bit == code)
            .map(|d| d.name.as_str())
    }

    /// Bitwise OR of the named doctypes.
    pub fn mask_of<S: AsRef<str>>(&self, names: &[S]) -> Result<u64> {
        names.iter().try_fold(0u64, |acc, n| {
            let n = n.as_ref();
            self.doctype_code(n)
                .map(|c| acc | c)
                .ok_or_else(|| Error::InvalidSpec(format!("unknown doctype `{n}`")))
        })
    }

    /// Bitwise OR of every declared doctype.
    pub fn universe(&self) -> u64 {
        self.doctypes.iter().fold(0, |acc, d| acc | (1u64 << d.bit))
    }

    pub fn root_role(&self) -> &RoleDecl {
        self.roles
            .iter()
            .find(|r| r.parent.is_none())
            .expect("validated spec has a root")
    }

    pub fn role(&self, id: &str) -> Option<&RoleDecl> {
        self.roles.iter().find(|r| r.id == id)
    }

    pub fn role_permissions(&self, id: &str) -> Result<u64> {
        let role = self
            .role(id)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown role `{id}`")))?;
        self.mask_of(&role.permissions)
    }

    /// Permission mask held by the root; it tops every chain.
    pub fn root_rinfo(&self) -> u64 {
        self.mask_of(&self.root_role().permissions)
            .expect("validated spec")
    }

    /// Doctype code expected in each slot, in declaration order.
    pub fn slots(&self) -> Vec<u64> {
        self.documents
            .iter()
            .map(|d| self.doctype_code(&d.doctype).expect("validated spec"))
            .collect()
    }

    pub fn slot_of(&self, doctype: &str) -> Option<usize> {
        self.documents.iter().position(|d| d.doctype == doctype)
    }

    /// For each slot, the slots it references in declared order.
    pub fn references_by_slot(&self) -> Vec<Vec<usize>> {
        self.documents
            .iter()
            .map(|d| {
                d.references
                    .iter()
                    .map(|r| self.slot_of(r).expect("validated spec"))
                    .collect()
            })
            .collect()
    }

    /// Role ids from `role` up to and including the root.
    pub fn path_to_root(&self, role: &str) -> Vec<String> {
        let mut path = vec![role.to_string()];
        let mut cur = self.role(role).and_then(|r| r.parent.clone());
        while let Some(p) = cur {
            cur = self.role(&p).and_then(|r| r.parent.clone());
            path.push(p);
        }
        path
    }

    pub fn chain_policy(&self) -> ChainPolicyConfig {
        ChainPolicyConfig::subset_delegation(self.universe(), self.root_rinfo())
    }

    pub fn phase_policy(&self) -> PhasePolicyConfig {
        PhasePolicyConfig::reference_map(self.slots(), self.references_by_slot(), self.hash.ref_hash)
    }

    /// Slots in an order where every document follows the documents it references.
    pub fn reference_order(&self) -> Result<Vec<usize>> {
        let refs = self.references_by_slot();
        let mut state = vec![0u8; refs.len()];
        let mut order = Vec::with_capacity(refs.len());
        fn visit(
            i: usize,
            refs: &[Vec<usize>],
            state: &mut [u8],
            order: &mut Vec<usize>,
            spec: &ProcessSpec,
        ) -> Result<()> {
            match state[i] {
                2 => return Ok(()),
                1 => return Err(Error::CyclicReferences(spec.documents[i].doctype.clone())),
                _ => {}
            }
            state[i] = 1;
            for &r in &refs[i] {
                visit(r, refs, state, order, spec)?;
            }
            state[i] = 2;
            order.push(i);
            Ok(())
        }
        for i in 0..refs.len() {
            visit(i, &refs, &mut state, &mut order, self)?;
        }
        Ok(order)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.height == 0 {
            return bad("height must be at least 1".into());
        }
        if self.doctypes.is_empty() {
            return bad("no doctypes declared".into());
        }
        let mut names = BTreeSet::new();
        let mut bits = BTreeSet::new();
        for d in &self.doctypes {
            if d.bit >= 64 {
                return bad(format!("doctype `{}` uses bit {} (max 63)", d.name, d.bit));
            }
            if !names.insert(d.name.as_str()) {
                return bad(format!("duplicate doctype `{}`", d.name));
            }
            if !bits.insert(d.bit) {
                return bad(format!("bit {} assigned twice", d.bit));
            }
        }

        let mut ids = BTreeMap::new();
        for r in &self.roles {
            if ids.insert(r.id.as_str(), r).is_some() {
                return bad(format!("duplicate role `{}`", r.id));
            }
            self.mask_of(&r.permissions)?;
        }
        let roots: Vec<_> = self.roles.iter().filter(|r| r.parent.is_none()).collect();
        if roots.len() != 1 {
            return bad(format!("expected exactly one root role, found {}", roots.len()));
        }
        for r in &self.roles {
            let mut seen = BTreeSet::new();
            let mut cur = r;
            while let Some(p) = &cur.parent {
                if !seen.insert(cur.id.as_str()) {
                    return bad(format!("role `{}` is part of a cycle", r.id));
                }
                cur = match ids.get(p.as_str()) {
                    Some(next) => next,
                    None => return bad(format!("role `{}` has unknown parent `{p}`", cur.id)),
                };
            }
        }

        let mut doc_types = BTreeSet::new();
        for d in &self.documents {
            if self.doctype_code(&d.doctype).is_none() {
                return bad(format!("document of unknown doctype `{}`", d.doctype));
            }
            if !doc_types.insert(d.doctype.as_str()) {
                return bad(format!("doctype `{}` appears in more than one slot", d.doctype));
            }
            if !ids.contains_key(d.author.as_str()) {
                return bad(format!("document `{}` has unknown author `{}`", d.doctype, d.author));
            }
        }
        for d in &self.documents {
            for r in &d.references {
                if !doc_types.contains(r.as_str()) {
                    return bad(format!("`{}` references `{r}`, which is not a document", d.doctype));
                }
            }
            let depth = self.path_to_root(&d.author).len();
            if depth > self.height {
                return bad(format!(
                    "document `{}` needs {depth} signatures, height is {}",
                    d.doctype, self.height
                ));
            }
        }
        if self.documents.is_empty() {
            return bad("no documents declared".into());
        }
        if self.chains != self.documents.len() {
            return bad(format!(
                "chains = {} but {} documents are declared",
                self.chains,
                self.documents.len()
            ));
        }
        self.reference_order()?;
        Ok(())
    }

    /// A linear role chain of depth `height - 1` whose deepest role authors
    /// `chains` reference-free documents. Used for scaling measurements.
    pub fn synthetic(chains: usize, height: usize) -> Result<Self> {
        if chains == 0 || chains > 64 {
            return Err(Error::InvalidSpec(format!("synthetic spec needs 1..=64 chains, got {chains}")));
        }
        let doctypes: Vec<DoctypeDecl> = (0..chains)
            .map(|i| DoctypeDecl {
                name: format!("D{i}"),
                bit: i as u32,
            })
            .collect();
        let all: Vec<String> = doctypes.iter().map(|d| d.name.clone()).collect();
        let roles = (0..height.max(1))
            .map(|i| RoleDecl {
                id: format!("R{i}"),
                parent: (i > 0).then(|| format!("R{}", i - 1)),
                permissions: all.clone(),
            })
            .collect();
        let documents = all
            .iter()
            .map(|d| DocumentDecl {
                doctype: d.clone(),
                author: format!("R{}", height.max(1) - 1),
                references: vec![],
            })
            .collect();
        let spec = ProcessSpec {
            name: format!("synthetic-l{chains}-n{height}"),
            version: 1,
            height,
            chains,
            hash: HashConfig::default(),
            doctypes,
            roles,
            documents,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn railway_spec_shape() {
        let s = ProcessSpec::railway_phase1();
        assert_eq!(s.chains, 9);
        assert_eq!(s.height, 3);
        assert_eq!(s.universe(), 0b1_1111_1111);
        assert_eq!(s.root_rinfo(), s.universe());
        assert_eq!(s.roles.len(), 8);
        let codes: Vec<u64> = ["SA", "TR", "PTD", "RS", "SUC", "PTD1", "SUC2", "FGV1", "FGV2"]
            .iter()
            .map(|n| s.doctype_code(n).unwrap())
            .collect();
        assert_eq!(codes, (0..9).map(|i| 1u64 << i).collect::<Vec<_>>());
        let refs = s.references_by_slot();
        let ptd = s.slot_of("PTD").unwrap();
        let names: Vec<&str> = refs[ptd].iter().map(|&i| s.documents[i].doctype.as_str()).collect();
        assert_eq!(names, ["RS", "PTD1", "TR", "SA"]);
        let suc = s.slot_of("SUC").unwrap();
        assert_eq!(refs[suc], vec![s.slot_of("SUC2").unwrap()]);
    }

    #[test]
    fn toml_and_json_roundtrip_preserve_hash() {
        let s = ProcessSpec::railway_phase1();
        let back = ProcessSpec::from_toml_str(&s.to_toml_string()).unwrap();
        assert_eq!(back, s);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(ProcessSpec::from_json_str(&json).unwrap().content_hash(), s.content_hash());
    }

    #[test]
    fn content_hash_changes_with_any_edit() {
        let s = ProcessSpec::railway_phase1();
        let mut t = s.clone();
        t.documents[2].references.swap(0, 1);
        assert_ne!(s.content_hash(), t.content_hash());
    }

    #[test]
    fn rejects_slack_chains() {
        let mut s = ProcessSpec::railway_phase1();
        s.chains = 10;
        assert!(matches!(s.validate(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn rejects_reference_cycle() {
        let mut s = ProcessSpec::railway_phase1();
        s.documents[0].references = vec!["PTD".into()];
        assert!(matches!(s.validate(), Err(Error::CyclicReferences(_))));
    }

    #[test]
    fn rejects_two_roots_and_unknown_parent() {
        let mut s = ProcessSpec::railway_phase1();
        s.roles[1].parent = None;
        assert!(s.validate().is_err());
        let mut s = ProcessSpec::railway_phase1();
        s.roles[1].parent = Some("Nobody".into());
        assert!(s.validate().is_err());
    }

    #[test]
    fn rejects_documents_deeper_than_height() {
        let mut s = ProcessSpec::railway_phase1();
        s.height = 2;
        assert!(s.validate().is_err());
    }

    #[test]
    fn synthetic_specs_validate() {
        for (l, n) in [(1, 1), (2, 1), (4, 2), (4, 4), (9, 3)] {
            let s = ProcessSpec::synthetic(l, n).unwrap();
            assert_eq!(s.chains, l);
            assert_eq!(s.height, n);
        }
    }
}
