//! Directory layout of a phase workspace.
//!
//! ```text
//! spec.toml
//! keys/<role>.json
//! documents/<DOCTYPE>.txt
//! attestations/roles/<role>.json
//! attestations/docs/<DOCTYPE>.json
//! chains/<slot>-<DOCTYPE>.json
//! circuit/proving.key
//! circuit/verifying.key
//! proof.bin
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use zkphase::attestation::{AttestationSet, ChainFile, DocAttestationFile, RoleAttestationFile};
use zkphase::crypto::{KeyFile, KeyPair, PublicKey};
use zkphase::{AttestationChain, Error, ProcessSpec, Result};

pub struct Workspace {
    pub root: PathBuf,
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn spec_path(&self) -> PathBuf {
        self.root.join("spec.toml")
    }

    pub fn key_path(&self, role: &str) -> PathBuf {
        self.root.join("keys").join(format!("{role}.json"))
    }

    pub fn document_path(&self, doctype: &str) -> PathBuf {
        self.root.join("documents").join(format!("{doctype}.txt"))
    }

    pub fn role_attestation_path(&self, role: &str) -> PathBuf {
        self.root.join("attestations/roles").join(format!("{role}.json"))
    }

    pub fn doc_attestation_path(&self, doctype: &str) -> PathBuf {
        self.root.join("attestations/docs").join(format!("{doctype}.json"))
    }

    pub fn chains_dir(&self) -> PathBuf {
        self.root.join("chains")
    }

    pub fn chain_path(&self, slot: usize, doctype: &str) -> PathBuf {
        self.chains_dir().join(format!("{slot}-{doctype}.json"))
    }

    pub fn proving_key_path(&self) -> PathBuf {
        self.root.join("circuit/proving.key")
    }

    pub fn verifying_key_path(&self) -> PathBuf {
        self.root.join("circuit/verifying.key")
    }

    pub fn proof_path(&self) -> PathBuf {
        self.root.join("proof.bin")
    }

    pub fn spec(&self) -> Result<ProcessSpec> {
        ProcessSpec::load(self.spec_path())
    }

    pub fn keypair(&self, role: &str) -> Result<KeyPair> {
        let path = self.key_path(role);
        if !path.exists() {
            return Err(Error::MissingKey(role.to_string()));
        }
        KeyFile::load(path)?.keypair()
    }

    pub fn public_key(&self, role: &str) -> Result<PublicKey> {
        let path = self.key_path(role);
        if !path.exists() {
            return Err(Error::MissingKey(role.to_string()));
        }
        KeyFile::load(path)?.public_key()
    }

    /// Every role and document attestation present for `spec`.
    pub fn attestations(&self, spec: &ProcessSpec) -> Result<AttestationSet> {
        let hash = spec.content_hash();
        let mut set = AttestationSet::default();
        for role in &spec.roles {
            let path = self.role_attestation_path(&role.id);
            if path.exists() {
                set.roles.insert(role.id.clone(), RoleAttestationFile::load_for(path, &hash)?.body);
            }
        }
        for doc in &spec.documents {
            let path = self.doc_attestation_path(&doc.doctype);
            if path.exists() {
                set.documents
                    .insert(doc.doctype.clone(), DocAttestationFile::load_for(path, &hash)?.body);
            }
        }
        Ok(set)
    }

    /// Identifiers of documents attested so far, by doctype.
    pub fn identifiers(&self, spec: &ProcessSpec) -> Result<BTreeMap<String, zkphase::crypto::Digest256>> {
        Ok(self
            .attestations(spec)?
            .documents
            .into_iter()
            .map(|(k, v)| (k, v.dinfo.identifier))
            .collect())
    }

    /// Chains in slot order; one file per slot is required.
    pub fn chains(&self, spec: &ProcessSpec) -> Result<Vec<AttestationChain>> {
        let hash = spec.content_hash();
        spec.documents
            .iter()
            .enumerate()
            .map(|(slot, d)| {
                let path = self.chain_path(slot, &d.doctype);
                if !path.exists() {
                    return Err(Error::MissingAttestation(format!("chain file {}", path.display())));
                }
                let file = ChainFile::load_for(path, &hash)?;
                if file.slot != Some(slot) {
                    return Err(Error::InvalidChain { slot });
                }
                Ok(file.body)
            })
            .collect()
    }
}

pub fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, bytes)?;
    Ok(())
}
