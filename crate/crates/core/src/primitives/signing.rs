//! Hashing, MACs and public-key signatures.
//!
//! Shared keys sign with HMAC; RSA uses PKCS#1 v1.5; DSA and ECDSA sign the
//! prehashed message. Every signature is over the hash named by the key.

use hmac::{Hmac, Mac};
use rsa::Pkcs1v15Sign;
use sha2::{Digest, Sha224, Sha256, Sha384, Sha512};
use signature::hazmat::{PrehashSigner, PrehashVerifier};
use signature::SignatureEncoding;

use crate::codec::{self, CodecError, PlainValue};
use crate::error::{Error, Result};
use crate::keys::{KeyEnvelope, ParsedKey};
use crate::labels::{Algorithm, HashAlg, Part};

pub fn digest(hash: HashAlg, data: &[u8]) -> Vec<u8> {
    match hash {
        HashAlg::Sha224 => Sha224::digest(data).to_vec(),
        HashAlg::Sha256 => Sha256::digest(data).to_vec(),
        HashAlg::Sha384 => Sha384::digest(data).to_vec(),
        HashAlg::Sha512 => Sha512::digest(data).to_vec(),
    }
}

macro_rules! with_hmac {
    ($hash:expr, $key:expr, |$mac:ident| $body:expr) => {
        match $hash {
            HashAlg::Sha224 => {
                let mut $mac =
                    <Hmac<Sha224> as Mac>::new_from_slice($key).expect("HMAC takes any key length");
                $body
            }
            HashAlg::Sha256 => {
                let mut $mac =
                    <Hmac<Sha256> as Mac>::new_from_slice($key).expect("HMAC takes any key length");
                $body
            }
            HashAlg::Sha384 => {
                let mut $mac =
                    <Hmac<Sha384> as Mac>::new_from_slice($key).expect("HMAC takes any key length");
                $body
            }
            HashAlg::Sha512 => {
                let mut $mac =
                    <Hmac<Sha512> as Mac>::new_from_slice($key).expect("HMAC takes any key length");
                $body
            }
        }
    };
}

pub fn hmac(hash: HashAlg, key: &[u8], data: &[u8]) -> Vec<u8> {
    with_hmac!(hash, key, |mac| {
        mac.update(data);
        mac.finalize().into_bytes().to_vec()
    })
}

/// Constant-time MAC check.
pub fn hmac_verify(hash: HashAlg, key: &[u8], data: &[u8], tag: &[u8]) -> bool {
    with_hmac!(hash, key, |mac| {
        mac.update(data);
        mac.verify_slice(tag).is_ok()
    })
}

fn pkcs1v15(hash: HashAlg) -> Pkcs1v15Sign {
    match hash {
        HashAlg::Sha224 => Pkcs1v15Sign::new::<Sha224>(),
        HashAlg::Sha256 => Pkcs1v15Sign::new::<Sha256>(),
        HashAlg::Sha384 => Pkcs1v15Sign::new::<Sha384>(),
        HashAlg::Sha512 => Pkcs1v15Sign::new::<Sha512>(),
    }
}

fn dsa_sign(
    key: &dsa::SigningKey,
    hash: HashAlg,
    prehash: &[u8],
) -> signature::Result<dsa::Signature> {
    match hash {
        HashAlg::Sha224 => key.sign_prehashed_rfc6979::<Sha224>(prehash),
        HashAlg::Sha256 => key.sign_prehashed_rfc6979::<Sha256>(prehash),
        HashAlg::Sha384 => key.sign_prehashed_rfc6979::<Sha384>(prehash),
        HashAlg::Sha512 => key.sign_prehashed_rfc6979::<Sha512>(prehash),
    }
}

/// A detached signature or MAC, labelled with how it was made.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    algorithm: Algorithm,
    hash: HashAlg,
    bytes: Vec<u8>,
}

impl Signature {
    pub fn new(algorithm: Algorithm, hash: HashAlg, bytes: Vec<u8>) -> Self {
        Signature {
            algorithm,
            hash,
            bytes,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn hash(&self) -> HashAlg {
        self.hash
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// `algorithm id || hash id || raw signature`
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 + self.bytes.len());
        out.push(self.algorithm.id());
        out.push(self.hash.id());
        out.extend_from_slice(&self.bytes);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let malformed = || Error::Codec(CodecError::MalformedEncoding("not a signature".into()));
        match bytes {
            [alg, hash, raw @ ..] if !raw.is_empty() => Ok(Signature {
                algorithm: Algorithm::from_id(*alg).ok_or_else(malformed)?,
                hash: HashAlg::from_id(*hash).ok_or_else(malformed)?,
                bytes: raw.to_vec(),
            }),
            _ => Err(malformed()),
        }
    }

    pub fn to_plain(&self) -> PlainValue {
        PlainValue::tuple([
            PlainValue::Int(i64::from(self.algorithm.id())),
            PlainValue::Int(i64::from(self.hash.id())),
            PlainValue::Bytes(self.bytes.clone()),
        ])
    }

    pub fn from_plain(value: &PlainValue) -> Result<Self> {
        let items = value.expect_tuple(3)?;
        Self::from_parts(&items[0], &items[1], &items[2])
    }

    fn from_parts(alg: &PlainValue, hash: &PlainValue, raw: &PlainValue) -> Result<Self> {
        let malformed = || Error::Codec(CodecError::MalformedEncoding("not a signature".into()));
        let id = |v: &PlainValue| v.as_int().and_then(|i| u8::try_from(i).ok());
        Ok(Signature {
            algorithm: id(alg).and_then(Algorithm::from_id).ok_or_else(malformed)?,
            hash: id(hash).and_then(HashAlg::from_id).ok_or_else(malformed)?,
            bytes: raw.as_bytes().ok_or_else(malformed)?.to_vec(),
        })
    }
}

/// Text bundled with its signature: the tuple `(text, alg, hash, signature)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPayload {
    pub text: PlainValue,
    pub signature: Signature,
}

impl SignedPayload {
    pub fn to_plain(&self) -> PlainValue {
        PlainValue::tuple([
            self.text.clone(),
            PlainValue::Int(i64::from(self.signature.algorithm.id())),
            PlainValue::Int(i64::from(self.signature.hash.id())),
            PlainValue::Bytes(self.signature.bytes.clone()),
        ])
    }

    pub fn from_plain(value: &PlainValue) -> Result<Self> {
        let items = value.expect_tuple(4)?;
        Ok(SignedPayload {
            text: items[0].clone(),
            signature: Signature::from_parts(&items[1], &items[2], &items[3])?,
        })
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        Ok(codec::encode(&self.to_plain())?)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        Self::from_plain(&codec::decode(bytes)?)
    }
}

impl From<&SignedPayload> for PlainValue {
    fn from(p: &SignedPayload) -> Self {
        p.to_plain()
    }
}

impl From<&Signature> for PlainValue {
    fn from(s: &Signature) -> Self {
        s.to_plain()
    }
}

/// What `sign` hands back, depending on the key and its signing mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignOutput {
    /// No key: a plain digest.
    Digest(Vec<u8>),
    Detached(Signature),
    Combined(SignedPayload),
}

impl SignOutput {
    pub fn into_plain(self) -> PlainValue {
        match self {
            SignOutput::Digest(d) => PlainValue::Bytes(d),
            SignOutput::Detached(s) => s.to_plain(),
            SignOutput::Combined(p) => p.to_plain(),
        }
    }

    pub fn signature(&self) -> Option<&Signature> {
        match self {
            SignOutput::Digest(_) => None,
            SignOutput::Detached(s) => Some(s),
            SignOutput::Combined(p) => Some(&p.signature),
        }
    }
}

/// The algorithm label a key's signatures carry.
pub(crate) fn signature_algorithm(key: &KeyEnvelope) -> Algorithm {
    if key.is_shared() {
        Algorithm::Hmac
    } else {
        key.algorithm()
    }
}

pub(crate) fn sign_bytes(key: &KeyEnvelope, data: &[u8]) -> Result<Signature> {
    let hash = key.sign_hash();
    let algorithm = signature_algorithm(key);
    let provider = |e: &dyn std::fmt::Display| Error::Provider(e.to_string());
    if key.is_shared() {
        return Ok(Signature::new(
            algorithm,
            hash,
            hmac(hash, key.material(), data),
        ));
    }
    if key.part() != Part::Private {
        return Err(Error::WrongKeyPart {
            operation: "sign",
            part: key.part(),
        });
    }
    let prehash = digest(hash, data);
    let bytes = match key.parsed()? {
        ParsedKey::RsaPrivate(k) => k.sign(pkcs1v15(hash), &prehash).map_err(|e| provider(&e))?,
        ParsedKey::DsaPrivate(k) => dsa_sign(k, hash, &prehash)
            .map_err(|e| provider(&e))?
            .to_vec(),
        ParsedKey::P256Private(k) => {
            let s: p256::ecdsa::Signature = k.sign_prehash(&prehash).map_err(|e| provider(&e))?;
            s.to_bytes().to_vec()
        }
        ParsedKey::P384Private(k) => {
            let s: p384::ecdsa::Signature = k.sign_prehash(&prehash).map_err(|e| provider(&e))?;
            s.to_bytes().to_vec()
        }
        _ => {
            return Err(Error::UnsupportedOperation {
                operation: "sign",
                algorithm: key.algorithm(),
            })
        }
    };
    Ok(Signature::new(algorithm, hash, bytes))
}

pub(crate) fn verify_bytes(key: &KeyEnvelope, data: &[u8], sig: &Signature) -> Result<bool> {
    if key.part() == Part::Private {
        return Err(Error::WrongKeyPart {
            operation: "verify",
            part: key.part(),
        });
    }
    let hash = key.sign_hash();
    if sig.algorithm != signature_algorithm(key) || sig.hash != hash {
        return Ok(false);
    }
    if key.is_shared() {
        return Ok(hmac_verify(hash, key.material(), data, &sig.bytes));
    }
    let prehash = digest(hash, data);
    let ok = match key.parsed()? {
        ParsedKey::RsaPublic(k) => k.verify(pkcs1v15(hash), &prehash, &sig.bytes).is_ok(),
        ParsedKey::DsaPublic(k) => dsa::Signature::try_from(sig.bytes.as_slice())
            .is_ok_and(|s| k.verify_prehash(&prehash, &s).is_ok()),
        ParsedKey::P256Public(k) => p256::ecdsa::Signature::from_slice(&sig.bytes)
            .is_ok_and(|s| k.verify_prehash(&prehash, &s).is_ok()),
        ParsedKey::P384Public(k) => p384::ecdsa::Signature::from_slice(&sig.bytes)
            .is_ok_and(|s| k.verify_prehash(&prehash, &s).is_ok()),
        _ => {
            return Err(Error::UnsupportedOperation {
                operation: "verify",
                algorithm: key.algorithm(),
            })
        }
    };
    Ok(ok)
}
