//! RSA-OAEP encryption, direct for short plaintexts and hybrid otherwise.

use rand::{CryptoRng, RngCore};
use rsa::traits::PublicKeyParts;
use rsa::Oaep;
use sha2::Sha256;
use zeroize::Zeroizing;

use super::envelope::{associated_data, CipherEnvelope, Scheme, HYBRID_NONCE_LEN};
use super::symmetric::{aead_open, aead_seal};
use crate::error::{Error, Result};
use crate::keys::{KeyEnvelope, ParsedKey};
use crate::labels::{Algorithm, Mode};

const OAEP_HASH_LEN: usize = 32;
const HYBRID_KEY_LEN: usize = 32;

/// Largest plaintext RSA-OAEP-SHA256 can take for a modulus of `k` bytes.
pub const fn oaep_capacity(k: usize) -> usize {
    k.saturating_sub(2 * OAEP_HASH_LEN + 2)
}

pub(crate) fn encrypt<R: RngCore + CryptoRng>(
    key: &KeyEnvelope,
    data: &[u8],
    rng: &mut R,
) -> Result<CipherEnvelope> {
    let ParsedKey::RsaPublic(pk) = key.parsed()? else {
        return Err(Error::UnsupportedOperation {
            operation: "encrypt",
            algorithm: key.algorithm(),
        });
    };
    let provider = |e: rsa::Error| Error::Provider(e.to_string());
    if data.len() <= oaep_capacity(pk.size()) {
        let body = pk
            .encrypt(rng, Oaep::new::<Sha256>(), data)
            .map_err(provider)?;
        return Ok(CipherEnvelope::new(
            Scheme::PublicDirect,
            Algorithm::Rsa,
            None,
            Vec::new(),
            None,
            body,
            None,
        ));
    }
    let mut session = Zeroizing::new([0u8; HYBRID_KEY_LEN]);
    rng.fill_bytes(session.as_mut());
    let mut nonce = vec![0u8; HYBRID_NONCE_LEN];
    rng.fill_bytes(&mut nonce);
    let mode = Some(Mode::Gcm);
    let (body, tag) = aead_seal(
        Mode::Gcm,
        session.as_ref(),
        &nonce,
        &associated_data(Algorithm::Rsa, mode),
        data,
    )?;
    let wrapped = pk
        .encrypt(rng, Oaep::new::<Sha256>(), session.as_ref())
        .map_err(provider)?;
    Ok(CipherEnvelope::new(
        Scheme::PublicHybrid,
        Algorithm::Rsa,
        mode,
        nonce,
        Some(wrapped),
        body,
        Some(tag),
    ))
}

pub(crate) fn decrypt(env: &CipherEnvelope, key: &KeyEnvelope) -> Result<Vec<u8>> {
    let ParsedKey::RsaPrivate(sk) = key.parsed()? else {
        return Err(Error::DecryptionFailure);
    };
    let k = sk.size();
    match env.scheme() {
        Scheme::PublicDirect => {
            if env.body().len() != k {
                return Err(Error::DecryptionFailure);
            }
            sk.decrypt(Oaep::new::<Sha256>(), env.body())
                .map_err(|_| Error::DecryptionFailure)
        }
        Scheme::PublicHybrid => {
            let wrapped = env.wrapped_key().ok_or(Error::DecryptionFailure)?;
            if wrapped.len() != k {
                return Err(Error::DecryptionFailure);
            }
            let session = Zeroizing::new(
                sk.decrypt(Oaep::new::<Sha256>(), wrapped)
                    .map_err(|_| Error::DecryptionFailure)?,
            );
            if session.len() != HYBRID_KEY_LEN {
                return Err(Error::DecryptionFailure);
            }
            let tag = env.tag().ok_or(Error::DecryptionFailure)?;
            aead_open(
                Mode::Gcm,
                &session,
                env.header(),
                &env.associated_data(),
                env.body(),
                tag,
            )
        }
        _ => Err(Error::DecryptionFailure),
    }
}
