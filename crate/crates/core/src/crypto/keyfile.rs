use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{KeyPair, PublicKey, SecretKey};
use crate::error::{Error, Result};

pub const SCHEME_ID: &str = "eddsa-bn254-edwards-poseidon/v1";

/// On-disk key: `{scheme_id, sk_hex?, pk_hex}`, lowercase hex, no prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyFile {
    pub scheme_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sk_hex: Option<String>,
    pub pk_hex: String,
}

impl KeyFile {
    pub fn from_keypair(kp: &KeyPair) -> Self {
        KeyFile {
            scheme_id: SCHEME_ID.to_string(),
            sk_hex: Some(kp.sk.to_hex()),
            pk_hex: kp.pk.to_hex(),
        }
    }

    pub fn public_only(pk: &PublicKey) -> Self {
        KeyFile {
            scheme_id: SCHEME_ID.to_string(),
            sk_hex: None,
            pk_hex: pk.to_hex(),
        }
    }

    fn check_scheme(&self) -> Result<()> {
        if self.scheme_id != SCHEME_ID {
            return Err(Error::malformed("key file", format!("unsupported scheme `{}`", self.scheme_id)));
        }
        Ok(())
    }

    pub fn public_key(&self) -> Result<PublicKey> {
        self.check_scheme()?;
        PublicKey::from_hex(&self.pk_hex)
    }

    /// Full key pair; fails when the file is public-only or the stored public
    /// key does not match the secret.
    pub fn keypair(&self) -> Result<KeyPair> {
        self.check_scheme()?;
        let sk_hex = self
            .sk_hex
            .as_deref()
            .ok_or_else(|| Error::malformed("key file", "no secret key"))?;
        let kp = KeyPair::from_secret(SecretKey::from_hex(sk_hex)?);
        if kp.pk != PublicKey::from_hex(&self.pk_hex)? {
            return Err(Error::malformed("key file", "public key does not match secret key"));
        }
        Ok(kp)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_vec_pretty(self)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::kgen;

    #[test]
    fn keyfile_roundtrip() {
        let kp = kgen(Some([42; 32]));
        let kf = KeyFile::from_keypair(&kp);
        let json = serde_json::to_string(&kf).unwrap();
        let back: KeyFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.keypair().unwrap(), kp);
        assert!(!kf.pk_hex.starts_with("0x"));
        assert_eq!(kf.pk_hex, kf.pk_hex.to_lowercase());
    }

    #[test]
    fn public_only_has_no_secret() {
        let kp = kgen(Some([43; 32]));
        let kf = KeyFile::public_only(&kp.pk);
        assert!(!serde_json::to_string(&kf).unwrap().contains("sk_hex"));
        assert!(kf.keypair().is_err());
        assert_eq!(kf.public_key().unwrap(), kp.pk);
    }

    #[test]
    fn mismatched_pair_rejected() {
        let mut kf = KeyFile::from_keypair(&kgen(Some([1; 32])));
        kf.pk_hex = kgen(Some([2; 32])).pk.to_hex();
        assert!(kf.keypair().is_err());
    }
}
