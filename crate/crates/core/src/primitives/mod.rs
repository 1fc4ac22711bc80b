//! The five primitives: keygen, encrypt, decrypt, sign and verify.
//!
//! All dispatch happens on key labels. Callers never choose IVs, nonces,
//! counters, padding or signature schemes.

mod envelope;
mod padding;
mod public;
mod signing;
mod symmetric;

use std::sync::{Arc, Mutex, MutexGuard};

use zeroize::Zeroizing;

pub use envelope::{header_len, CipherEnvelope, Scheme, ENVELOPE_VERSION, TAG_LEN};
pub use padding::{pad_pkcs7, unpad_pkcs7};
pub use public::oaep_capacity;
pub use signing::{digest, hmac, hmac_verify, SignOutput, Signature, SignedPayload};
pub use symmetric::{aead_open, aead_seal};

use crate::codec::{self, PlainValue};
use crate::config::{self, ConfigScope};
use crate::entropy::Entropy;
use crate::error::{Error, Result};
use crate::keys::{self, GeneratedKey, KeyEnvelope, KeyPair, KeygenOptions};
use crate::labels::{Part, SignMode};

/// A configured entry point to the primitives: a scope to resolve
/// configuration from and a randomness source.
#[derive(Debug)]
pub struct Crypto {
    scope: Arc<ConfigScope>,
    entropy: Mutex<Entropy>,
}

impl Default for Crypto {
    fn default() -> Self {
        Crypto::new()
    }
}

impl Crypto {
    /// Uses the process-wide scope and the OS random generator.
    pub fn new() -> Self {
        Crypto::with_scope(config::global())
    }

    pub fn with_scope(scope: impl Into<Arc<ConfigScope>>) -> Self {
        Crypto::with_entropy(scope, Entropy::Os)
    }

    pub fn with_entropy(scope: impl Into<Arc<ConfigScope>>, entropy: Entropy) -> Self {
        Crypto {
            scope: scope.into(),
            entropy: Mutex::new(entropy),
        }
    }

    pub fn scope(&self) -> &ConfigScope {
        &self.scope
    }

    pub fn scope_arc(&self) -> Arc<ConfigScope> {
        Arc::clone(&self.scope)
    }

    /// Same randomness source, different configuration.
    pub fn rescoped(&self, scope: impl Into<Arc<ConfigScope>>) -> Crypto {
        Crypto {
            scope: scope.into(),
            entropy: Mutex::new(self.rng().clone()),
        }
    }

    fn rng(&self) -> MutexGuard<'_, Entropy> {
        self.entropy.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Fills `buf` from this instance's randomness source.
    pub fn random_bytes(&self, buf: &mut [u8]) {
        rand::RngCore::fill_bytes(&mut *self.rng(), buf);
    }

    pub fn random_u64(&self) -> u64 {
        rand::RngCore::next_u64(&mut *self.rng())
    }

    pub fn keygen(&self, kind: &str) -> Result<GeneratedKey> {
        self.keygen_with(kind, &KeygenOptions::default())
    }

    pub fn keygen_with(&self, kind: &str, opts: &KeygenOptions) -> Result<GeneratedKey> {
        keys::keygen(kind, &self.scope, opts, &mut *self.rng())
    }

    pub fn keygen_shared(&self, kind: &str) -> Result<KeyEnvelope> {
        match self.keygen(kind)? {
            GeneratedKey::Shared(k) => Ok(k),
            GeneratedKey::Pair(p) => Err(Error::WrongKeyPart {
                operation: "keygen_shared",
                part: p.private_key.part(),
            }),
        }
    }

    pub fn keygen_pair(&self, kind: &str) -> Result<KeyPair> {
        match self.keygen(kind)? {
            GeneratedKey::Pair(p) => Ok(p),
            GeneratedKey::Shared(k) => Err(Error::WrongKeyPart {
                operation: "keygen_pair",
                part: k.part(),
            }),
        }
    }

    pub fn dh_keygen(&self, group: &str) -> Result<KeyPair> {
        keys::dh_keygen(group, &self.scope, &mut *self.rng())
    }

    /// Encrypts a structured value.
    pub fn encrypt(&self, value: &PlainValue, key: &KeyEnvelope) -> Result<CipherEnvelope> {
        let data = Zeroizing::new(codec::encode(value)?);
        self.encrypt_raw(&data, key)
    }

    /// Encrypts bytes that are already encoded.
    pub fn encrypt_raw(&self, data: &[u8], key: &KeyEnvelope) -> Result<CipherEnvelope> {
        key.check()?;
        match key.part() {
            Part::Secret => symmetric::encrypt(key, data, &mut *self.rng()),
            Part::Public => public::encrypt(key, data, &mut *self.rng()),
            Part::Private => Err(Error::WrongKeyPart {
                operation: "encrypt",
                part: Part::Private,
            }),
        }
    }

    pub fn decrypt(&self, env: &CipherEnvelope, key: &KeyEnvelope) -> Result<PlainValue> {
        let data = Zeroizing::new(self.decrypt_raw(env, key)?);
        // garbage from a wrong stream key must look like any other failure
        codec::decode(&data).map_err(|_| Error::DecryptionFailure)
    }

    pub fn decrypt_raw(&self, env: &CipherEnvelope, key: &KeyEnvelope) -> Result<Vec<u8>> {
        key.check()?;
        match key.part() {
            Part::Secret => symmetric::decrypt(env, key),
            Part::Private => match env.scheme() {
                Scheme::PublicDirect | Scheme::PublicHybrid
                    if key.algorithm() == env.algorithm() =>
                {
                    public::decrypt(env, key)
                }
                _ => Err(Error::DecryptionFailure),
            },
            Part::Public => Err(Error::WrongKeyPart {
                operation: "decrypt",
                part: Part::Public,
            }),
        }
    }

    /// Signs a value. Without a key this returns the digest of the encoded
    /// value; with one, the key's signing mode picks detached or combined.
    pub fn sign(&self, value: &PlainValue, key: Option<&KeyEnvelope>) -> Result<SignOutput> {
        let data = codec::encode(value)?;
        let Some(key) = key else {
            return Ok(SignOutput::Digest(digest(self.scope.sign_hash(), &data)));
        };
        key.check()?;
        let signature = signing::sign_bytes(key, &data)?;
        Ok(match key.sign_mode() {
            SignMode::Detached => SignOutput::Detached(signature),
            SignMode::Combined => SignOutput::Combined(SignedPayload {
                text: value.clone(),
                signature,
            }),
        })
    }

    /// Detached signature over raw bytes.
    pub fn sign_raw(&self, data: &[u8], key: &KeyEnvelope) -> Result<Signature> {
        key.check()?;
        signing::sign_bytes(key, data)
    }

    pub fn verify(&self, value: &PlainValue, sig: &Signature, key: &KeyEnvelope) -> Result<bool> {
        key.check()?;
        signing::verify_bytes(key, &codec::encode(value)?, sig)
    }

    pub fn verify_raw(&self, data: &[u8], sig: &Signature, key: &KeyEnvelope) -> Result<bool> {
        key.check()?;
        signing::verify_bytes(key, data, sig)
    }

    /// Checks a combined signature and returns the embedded text, or `None`
    /// when verification fails. A value that is not a signed payload at all
    /// is a malformed-encoding error.
    pub fn verify_signed(
        &self,
        signed: &PlainValue,
        key: &KeyEnvelope,
    ) -> Result<Option<PlainValue>> {
        let payload = SignedPayload::from_plain(signed)?;
        self.verify_payload(&payload, key)
    }

    pub fn verify_payload(
        &self,
        payload: &SignedPayload,
        key: &KeyEnvelope,
    ) -> Result<Option<PlainValue>> {
        let ok = self.verify(&payload.text, &payload.signature, key)?;
        Ok(ok.then(|| payload.text.clone()))
    }
}
