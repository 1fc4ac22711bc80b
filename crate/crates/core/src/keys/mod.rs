//! Key generation, labelling and serialization.
//!
//! A [`KeyEnvelope`] is key material together with the labels that decide how
//! every later primitive treats it. Envelopes can only be built through
//! validated constructors, so holding one means its labels passed the guard.

mod dh;
mod file;

use std::fmt;
use std::sync::{Arc, OnceLock};

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine as _;
use num_bigint::BigUint;
use rand::{CryptoRng, RngCore};
use rsa::pkcs1::{
    DecodeRsaPrivateKey, DecodeRsaPublicKey, EncodeRsaPrivateKey, EncodeRsaPublicKey,
};
use rsa::traits::PublicKeyParts;
use rsa::{RsaPrivateKey, RsaPublicKey};
use serde::{Deserialize, Serialize};
use zeroize::Zeroizing;

use crate::codec::{CodecError, PlainValue};
use crate::config::{ConfigItem, ConfigScope, ConfigValue};
use crate::error::{Error, MisuseClass, MisuseError, Result};
use crate::guard::{self, KeySpec};
use crate::labels::{
    Algorithm, AlgorithmClass, Curve, HashAlg, KeyKind, KeySize, Mode, Part, SignMode,
};

pub use dh::DhGroup;
pub use file::{read_key_file, write_key_file};

pub const KEY_VERSION: u8 = 1;

/// Marker that opens the tuple form of a key inside messages.
const KEY_MARKER: &str = "secalgo-key";

/// Parsed form of public-key material, cached alongside the raw bytes.
pub(crate) enum ParsedKey {
    RsaPrivate(Box<RsaPrivateKey>),
    RsaPublic(RsaPublicKey),
    DsaPrivate(Box<dsa::SigningKey>),
    DsaPublic(dsa::VerifyingKey),
    P256Private(p256::ecdsa::SigningKey),
    P256Public(p256::ecdsa::VerifyingKey),
    P384Private(p384::ecdsa::SigningKey),
    P384Public(p384::ecdsa::VerifyingKey),
    DhPrivate { group: &'static DhGroup, x: BigUint },
    DhPublic { group: &'static DhGroup, y: BigUint },
}

#[derive(Clone)]
pub struct KeyEnvelope {
    version: u8,
    spec: KeySpec,
    part: Part,
    sign_mode: SignMode,
    material: Zeroizing<Vec<u8>>,
    parsed: OnceLock<Arc<ParsedKey>>,
}

impl PartialEq for KeyEnvelope {
    fn eq(&self, other: &Self) -> bool {
        self.version == other.version
            && self.spec == other.spec
            && self.part == other.part
            && self.sign_mode == other.sign_mode
            && self.material == other.material
    }
}

impl Eq for KeyEnvelope {}

impl fmt::Debug for KeyEnvelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KeyEnvelope")
            .field("algorithm", &self.spec.algorithm)
            .field("size", &self.spec.size)
            .field("mode", &self.spec.mode)
            .field("part", &self.part)
            .field("sign_hash", &self.spec.hash)
            .field("sign_mode", &self.sign_mode)
            .field("material", &format_args!("<{} bytes>", self.material.len()))
            .finish()
    }
}

fn bad_key(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

impl KeyEnvelope {
    /// Builds an envelope, checking every invariant and parsing the material.
    fn build(spec: KeySpec, part: Part, sign_mode: SignMode, material: Vec<u8>) -> Result<Self> {
        guard::validate(&spec)?;
        let material = Zeroizing::new(material);
        let shared = spec.algorithm.is_shared();
        if shared != (part == Part::Secret) {
            return Err(bad_key(format!(
                "{} keys cannot have a {part} part",
                spec.algorithm
            )));
        }
        if material.is_empty() {
            return Err(bad_key("key material is empty"));
        }
        let key = KeyEnvelope {
            version: KEY_VERSION,
            spec,
            part,
            sign_mode,
            material,
            parsed: OnceLock::new(),
        };
        if shared {
            let bits = spec.size.bits().unwrap_or(0) as usize;
            if key.material.len() * 8 != bits {
                return Err(bad_key(format!(
                    "{bits}-bit key has {} bytes of material",
                    key.material.len()
                )));
            }
        } else {
            let parsed = key.parse_material()?;
            let _ = key.parsed.set(Arc::new(parsed));
        }
        Ok(key)
    }

    fn parse_material(&self) -> Result<ParsedKey> {
        let m: &[u8] = &self.material;
        let size = self.spec.size;
        let wrong_size = || bad_key(format!("material does not match size {size}"));
        let parsed = match (self.spec.algorithm, self.part) {
            (Algorithm::Rsa, Part::Private) => {
                let k = RsaPrivateKey::from_pkcs1_der(m)
                    .map_err(|e| bad_key(format!("RSA key: {e}")))?;
                if Some(k.n().bits() as u32) != size.bits() {
                    return Err(wrong_size());
                }
                ParsedKey::RsaPrivate(Box::new(k))
            }
            (Algorithm::Rsa, Part::Public) => {
                let k = RsaPublicKey::from_pkcs1_der(m)
                    .map_err(|e| bad_key(format!("RSA key: {e}")))?;
                if Some(k.n().bits() as u32) != size.bits() {
                    return Err(wrong_size());
                }
                ParsedKey::RsaPublic(k)
            }
            (Algorithm::Dsa, Part::Private) => {
                use dsa::pkcs8::DecodePrivateKey;
                let k = dsa::SigningKey::from_pkcs8_der(m)
                    .map_err(|e| bad_key(format!("DSA key: {e}")))?;
                if Some(k.verifying_key().components().p().bits() as u32) != size.bits() {
                    return Err(wrong_size());
                }
                ParsedKey::DsaPrivate(Box::new(k))
            }
            (Algorithm::Dsa, Part::Public) => {
                use dsa::pkcs8::DecodePublicKey;
                let k = dsa::VerifyingKey::from_public_key_der(m)
                    .map_err(|e| bad_key(format!("DSA key: {e}")))?;
                if Some(k.components().p().bits() as u32) != size.bits() {
                    return Err(wrong_size());
                }
                ParsedKey::DsaPublic(k)
            }
            (Algorithm::Ecdsa, part) => {
                let bad = |_| bad_key("ECDSA key material is invalid");
                match (size, part) {
                    (KeySize::Curve(Curve::P256), Part::Private) => {
                        ParsedKey::P256Private(p256::ecdsa::SigningKey::from_slice(m).map_err(bad)?)
                    }
                    (KeySize::Curve(Curve::P256), _) => ParsedKey::P256Public(
                        p256::ecdsa::VerifyingKey::from_sec1_bytes(m).map_err(bad)?,
                    ),
                    (KeySize::Curve(Curve::P384), Part::Private) => {
                        ParsedKey::P384Private(p384::ecdsa::SigningKey::from_slice(m).map_err(bad)?)
                    }
                    (KeySize::Curve(Curve::P384), _) => ParsedKey::P384Public(
                        p384::ecdsa::VerifyingKey::from_sec1_bytes(m).map_err(bad)?,
                    ),
                    _ => return Err(wrong_size()),
                }
            }
            (Algorithm::Dh, part) => {
                let group = size
                    .bits()
                    .and_then(DhGroup::for_bits)
                    .ok_or_else(wrong_size)?;
                if m.len() != group.modulus_len() {
                    return Err(wrong_size());
                }
                let v = BigUint::from_bytes_be(m);
                if part == Part::Private {
                    let two = BigUint::from(2u8);
                    if v < two || v > group.prime() - 2u8 {
                        return Err(bad_key("DH exponent out of range"));
                    }
                    ParsedKey::DhPrivate { group, x: v }
                } else {
                    // degenerate values are refused when a secret is derived
                    ParsedKey::DhPublic { group, y: v }
                }
            }
            (alg, part) => return Err(bad_key(format!("{alg} keys cannot have a {part} part"))),
        };
        Ok(parsed)
    }

    pub(crate) fn parsed(&self) -> Result<&ParsedKey> {
        if let Some(p) = self.parsed.get() {
            return Ok(p);
        }
        let parsed = Arc::new(self.parse_material()?);
        Ok(self.parsed.get_or_init(|| parsed))
    }

    /// Builds an envelope from textual labels, re-running the guard.
    #[allow(clippy::too_many_arguments)]
    pub fn from_labels(
        version: u8,
        algorithm: &str,
        size: &str,
        mode: Option<&str>,
        part: &str,
        sign_hash: &str,
        sign_mode: &str,
        material: Vec<u8>,
    ) -> Result<Self> {
        if version != KEY_VERSION {
            return Err(bad_key(format!("unsupported key version {version}")));
        }
        let spec = guard::check_key_spec(algorithm, size, mode, sign_hash)?;
        let part =
            Part::lookup(part).ok_or_else(|| bad_key(format!("unknown key part `{part}`")))?;
        let sign_mode = SignMode::lookup(sign_mode).ok_or_else(|| Error::DisallowedValue {
            item: ConfigItem::SignMode.name().to_owned(),
            value: sign_mode.to_owned(),
            class: None,
            line: None,
        })?;
        KeyEnvelope::build(spec, part, sign_mode, material)
    }

    pub fn version(&self) -> u8 {
        self.version
    }

    pub fn spec(&self) -> KeySpec {
        self.spec
    }

    pub fn algorithm(&self) -> Algorithm {
        self.spec.algorithm
    }

    pub fn size(&self) -> KeySize {
        self.spec.size
    }

    pub fn mode(&self) -> Option<Mode> {
        self.spec.mode
    }

    pub fn part(&self) -> Part {
        self.part
    }

    pub fn sign_hash(&self) -> HashAlg {
        self.spec.hash
    }

    pub fn sign_mode(&self) -> SignMode {
        self.sign_mode
    }

    pub fn material(&self) -> &[u8] {
        &self.material
    }

    pub fn is_shared(&self) -> bool {
        self.spec.algorithm.is_shared()
    }

    /// The whitelist re-check run before every use.
    pub fn check(&self) -> Result<(), MisuseError> {
        guard::validate(&self.spec)
    }

    /// Same labels, different signing mode.
    pub fn with_sign_mode(&self, sign_mode: SignMode) -> Self {
        KeyEnvelope {
            sign_mode,
            ..self.clone()
        }
    }

    /// The public half of a private key; a public key returns itself.
    pub fn public_key(&self) -> Result<KeyEnvelope> {
        let material = match (self.part, self.parsed()?) {
            (Part::Public, _) => return Ok(self.clone()),
            (_, ParsedKey::RsaPrivate(k)) => rsa_public_der(&k.to_public_key())?,
            (_, ParsedKey::DsaPrivate(k)) => dsa_public_der(k.verifying_key())?,
            (_, ParsedKey::P256Private(k)) => {
                k.verifying_key().to_encoded_point(true).as_bytes().to_vec()
            }
            (_, ParsedKey::P384Private(k)) => {
                k.verifying_key().to_encoded_point(true).as_bytes().to_vec()
            }
            (_, ParsedKey::DhPrivate { group, x }) => group.encode(&group.public_value(x)),
            _ => {
                return Err(Error::UnsupportedOperation {
                    operation: "public_key",
                    algorithm: self.algorithm(),
                })
            }
        };
        KeyEnvelope::build(self.spec, Part::Public, self.sign_mode, material)
    }

    /// Canonical JSON key file, fields in a fixed order.
    pub fn export(&self) -> Vec<u8> {
        let file = KeyFile {
            version: self.version,
            algorithm: self.algorithm().name().to_owned(),
            size: match self.size() {
                KeySize::Bits(b) => SizeField::Bits(b),
                KeySize::Curve(c) => SizeField::Name(c.name().to_owned()),
            },
            mode: self.mode().map(|m| m.name().to_owned()),
            part: self.part.name().to_owned(),
            sign_hash: self.sign_hash().name().to_owned(),
            sign_mode: self.sign_mode.name().to_owned(),
            material: URL_SAFE_NO_PAD.encode(self.material()),
        };
        let mut out = serde_json::to_vec_pretty(&file).expect("key file serializes");
        out.push(b'\n');
        out
    }

    pub fn import(bytes: &[u8]) -> Result<Self> {
        let file: KeyFile =
            serde_json::from_slice(bytes).map_err(|e| bad_key(format!("key file: {e}")))?;
        let material = URL_SAFE_NO_PAD
            .decode(file.material.as_bytes())
            .map_err(|e| bad_key(format!("key material: {e}")))?;
        let size = match &file.size {
            SizeField::Bits(b) => b.to_string(),
            SizeField::Name(n) => n.clone(),
        };
        KeyEnvelope::from_labels(
            file.version,
            &file.algorithm,
            &size,
            file.mode.as_deref(),
            &file.part,
            &file.sign_hash,
            &file.sign_mode,
            material,
        )
    }

    /// Tuple form used when keys travel inside protocol messages.
    pub fn to_plain(&self) -> PlainValue {
        PlainValue::tuple([
            PlainValue::from(KEY_MARKER),
            PlainValue::Int(i64::from(self.version)),
            PlainValue::from(self.algorithm().name()),
            PlainValue::from(self.size().to_string()),
            PlainValue::from(self.mode().map_or("", Mode::name)),
            PlainValue::from(self.part.name()),
            PlainValue::from(self.sign_hash().name()),
            PlainValue::from(self.sign_mode.name()),
            PlainValue::Bytes(self.material.to_vec()),
        ])
    }

    pub fn from_plain(value: &PlainValue) -> Result<Self> {
        let malformed = || Error::Codec(CodecError::MalformedEncoding("not a key value".into()));
        let items = value.expect_tuple(9).map_err(|_| malformed())?;
        if items[0].as_str() != Some(KEY_MARKER) {
            return Err(malformed());
        }
        let text = |i: usize| items[i].as_str().ok_or_else(malformed);
        let version = items[1]
            .as_int()
            .and_then(|v| u8::try_from(v).ok())
            .ok_or_else(malformed)?;
        let mode = Some(text(4)?).filter(|m| !m.is_empty());
        let material = items[8].as_bytes().ok_or_else(malformed)?.to_vec();
        KeyEnvelope::from_labels(
            version,
            text(2)?,
            text(3)?,
            mode,
            text(5)?,
            text(6)?,
            text(7)?,
            material,
        )
    }
}

impl From<&KeyEnvelope> for PlainValue {
    fn from(key: &KeyEnvelope) -> Self {
        key.to_plain()
    }
}

pub fn export_key(key: &KeyEnvelope) -> Vec<u8> {
    key.export()
}

pub fn import_key(bytes: &[u8]) -> Result<KeyEnvelope> {
    KeyEnvelope::import(bytes)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KeyFile {
    version: u8,
    algorithm: String,
    size: SizeField,
    mode: Option<String>,
    part: String,
    sign_hash: String,
    sign_mode: String,
    material: String,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SizeField {
    Bits(u32),
    Name(String),
}

fn rsa_public_der(k: &RsaPublicKey) -> Result<Vec<u8>> {
    Ok(k.to_pkcs1_der()
        .map_err(|e| Error::Provider(e.to_string()))?
        .into_vec())
}

fn dsa_public_der(k: &dsa::VerifyingKey) -> Result<Vec<u8>> {
    use dsa::pkcs8::EncodePublicKey;
    Ok(k.to_public_key_der()
        .map_err(|e| Error::Provider(e.to_string()))?
        .into_vec())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyPair {
    pub private_key: KeyEnvelope,
    pub public_key: KeyEnvelope,
}

impl KeyPair {
    pub fn from_private(private_key: KeyEnvelope) -> Result<Self> {
        if private_key.part() != Part::Private {
            return Err(Error::WrongKeyPart {
                operation: "key pair",
                part: private_key.part(),
            });
        }
        let public_key = private_key.public_key()?;
        Ok(KeyPair {
            private_key,
            public_key,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratedKey {
    Shared(KeyEnvelope),
    Pair(KeyPair),
}

impl GeneratedKey {
    pub fn into_shared(self) -> Option<KeyEnvelope> {
        match self {
            GeneratedKey::Shared(k) => Some(k),
            GeneratedKey::Pair(_) => None,
        }
    }

    pub fn into_pair(self) -> Option<KeyPair> {
        match self {
            GeneratedKey::Pair(p) => Some(p),
            GeneratedKey::Shared(_) => None,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            GeneratedKey::Shared(k) => k.algorithm(),
            GeneratedKey::Pair(p) => p.private_key.algorithm(),
        }
    }
}

/// Per-call keygen arguments. Each one acts as an innermost scope around the
/// call and is checked exactly like a configured value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeygenOptions {
    pub size: Option<String>,
    pub mode: Option<String>,
    pub sign_hash: Option<String>,
    pub sign_mode: Option<String>,
}

impl KeygenOptions {
    pub fn size(mut self, size: impl ToString) -> Self {
        self.size = Some(size.to_string());
        self
    }

    pub fn mode(mut self, mode: impl Into<String>) -> Self {
        self.mode = Some(mode.into());
        self
    }

    pub fn sign_hash(mut self, hash: impl Into<String>) -> Self {
        self.sign_hash = Some(hash.into());
        self
    }

    pub fn sign_mode(mut self, mode: impl Into<String>) -> Self {
        self.sign_mode = Some(mode.into());
        self
    }
}

/// Resolves a keygen type argument: a generic kind or an algorithm name.
pub fn resolve_algorithm(kind: &str, scope: &ConfigScope) -> Result<Algorithm> {
    if let Some(k) = KeyKind::lookup(kind) {
        return Ok(match k {
            KeyKind::Shared => scope.key_type_shared(),
            KeyKind::Public => scope.key_type_public(),
        });
    }
    if let Some(a) = Algorithm::lookup(kind) {
        return Ok(a);
    }
    if guard::is_obsolete_algorithm(kind) {
        return Err(guard::check_algorithm(kind).unwrap_err().into());
    }
    Err(Error::UnknownAlgorithm(kind.trim().to_owned()))
}

fn resolve_size(algorithm: Algorithm, scope: &ConfigScope, opts: &KeygenOptions) -> String {
    if let Some(s) = &opts.size {
        return s.clone();
    }
    let item = if algorithm.is_shared() {
        ConfigItem::KeySizeShared
    } else {
        ConfigItem::KeySizePublic
    };
    match scope.lookup(item) {
        Some(ConfigValue::Size(s)) => s.to_string(),
        _ => match item.default_value() {
            ConfigValue::Size(s) if guard::size_allowed(algorithm, s) => s.to_string(),
            _ => guard::default_size(algorithm).to_string(),
        },
    }
}

fn resolve_mode(algorithm: Algorithm, scope: &ConfigScope, opts: &KeygenOptions) -> Option<String> {
    if let Some(m) = &opts.mode {
        return Some(m.clone());
    }
    if algorithm.class() != AlgorithmClass::BlockCipher {
        return None;
    }
    match scope.lookup(ConfigItem::BlockCipherMode) {
        Some(ConfigValue::Mode(m)) => Some(m.name().to_owned()),
        _ => {
            let table = scope.block_cipher_mode();
            let mode = if guard::allowed_modes(algorithm).contains(&table) {
                Some(table)
            } else {
                guard::default_mode(algorithm)
            };
            mode.map(|m| m.name().to_owned())
        }
    }
}

/// Resolves every label for a keygen request and runs the guard over them.
pub fn resolve_key_spec(
    kind: &str,
    scope: &ConfigScope,
    opts: &KeygenOptions,
) -> Result<(KeySpec, SignMode)> {
    let algorithm = resolve_algorithm(kind, scope)?;
    if !scope.provider().supports(algorithm) {
        return Err(Error::Provider(format!(
            "{} does not provide {algorithm}",
            scope.provider().name
        )));
    }
    let size = resolve_size(algorithm, scope, opts);
    let mode = resolve_mode(algorithm, scope, opts);
    let hash = opts
        .sign_hash
        .clone()
        .unwrap_or_else(|| scope.sign_hash().name().to_owned());
    let spec = guard::check_key_spec(algorithm.name(), &size, mode.as_deref(), &hash)?;
    let sign_mode = match &opts.sign_mode {
        None => scope.sign_mode(),
        Some(m) => match ConfigItem::SignMode.parse_value(m)? {
            ConfigValue::SignMode(m) => m,
            _ => unreachable!(),
        },
    };
    Ok((spec, sign_mode))
}

/// Generates a shared key or a key pair.
///
/// `kind` is `shared`, `public` or an algorithm name; labels not given in
/// `opts` come from `scope`.
pub fn keygen<R: RngCore + CryptoRng>(
    kind: &str,
    scope: &ConfigScope,
    opts: &KeygenOptions,
    rng: &mut R,
) -> Result<GeneratedKey> {
    let (spec, sign_mode) = resolve_key_spec(kind, scope, opts)?;
    generate(spec, sign_mode, rng)
}

/// Generates key material for an already validated specification.
pub fn generate<R: RngCore + CryptoRng>(
    spec: KeySpec,
    sign_mode: SignMode,
    rng: &mut R,
) -> Result<GeneratedKey> {
    guard::validate(&spec)?;
    let provider_err = |e: &dyn fmt::Display| Error::Provider(e.to_string());
    let private = match (spec.algorithm, spec.size) {
        (alg, KeySize::Bits(bits)) if alg.is_shared() => {
            let mut material = vec![0u8; bits as usize / 8];
            rng.fill_bytes(&mut material);
            return KeyEnvelope::build(spec, Part::Secret, sign_mode, material)
                .map(GeneratedKey::Shared);
        }
        (Algorithm::Rsa, KeySize::Bits(bits)) => {
            let k = RsaPrivateKey::new(rng, bits as usize).map_err(|e| provider_err(&e))?;
            k.to_pkcs1_der()
                .map_err(|e| provider_err(&e))?
                .to_bytes()
                .to_vec()
        }
        (Algorithm::Dsa, KeySize::Bits(bits)) => {
            use dsa::pkcs8::EncodePrivateKey;
            let size = if bits == 3072 {
                dsa::KeySize::DSA_3072_256
            } else {
                dsa::KeySize::DSA_2048_256
            };
            let components = dsa::Components::generate(rng, size);
            let k = dsa::SigningKey::generate(rng, components);
            k.to_pkcs8_der()
                .map_err(|e| provider_err(&e))?
                .as_bytes()
                .to_vec()
        }
        (Algorithm::Ecdsa, KeySize::Curve(Curve::P256)) => {
            p256::ecdsa::SigningKey::random(rng).to_bytes().to_vec()
        }
        (Algorithm::Ecdsa, KeySize::Curve(Curve::P384)) => {
            p384::ecdsa::SigningKey::random(rng).to_bytes().to_vec()
        }
        (Algorithm::Dh, KeySize::Bits(bits)) => {
            let group = DhGroup::for_bits(bits)
                .ok_or_else(|| Error::UnknownGroup(format!("{bits}-bit")))?;
            group.encode(&group.random_exponent(rng))
        }
        (alg, size) => {
            return Err(MisuseError::new(
                MisuseClass::M1K,
                format!("no key generator for {alg} {size}"),
            )
            .into())
        }
    };
    let private_key = KeyEnvelope::build(spec, Part::Private, sign_mode, private)?;
    KeyPair::from_private(private_key).map(GeneratedKey::Pair)
}

/// Generates a key pair in a shipped Diffie-Hellman group.
pub fn dh_keygen<R: RngCore + CryptoRng>(
    group: &str,
    scope: &ConfigScope,
    rng: &mut R,
) -> Result<KeyPair> {
    let group = DhGroup::named(group)?;
    let spec = KeySpec {
        algorithm: Algorithm::Dh,
        size: KeySize::Bits(group.bits()),
        mode: None,
        hash: scope.sign_hash(),
    };
    generate(spec, scope.sign_mode(), rng).map(|g| g.into_pair().expect("DH keygen yields a pair"))
}

/// `peer^x mod p` for two keys of the same group, fixed-width big-endian.
pub fn dh_shared_secret(
    private: &KeyEnvelope,
    peer_public: &KeyEnvelope,
) -> Result<Zeroizing<Vec<u8>>> {
    for key in [private, peer_public] {
        if key.algorithm() != Algorithm::Dh {
            return Err(Error::UnsupportedOperation {
                operation: "dh_shared_secret",
                algorithm: key.algorithm(),
            });
        }
        key.check()?;
    }
    match (private.parsed()?, peer_public.parsed()?) {
        (ParsedKey::DhPrivate { group: a, x }, ParsedKey::DhPublic { group: b, y }) => {
            if a != b {
                return Err(Error::GroupMismatch);
            }
            a.shared_secret(x, y).map(Zeroizing::new)
        }
        (ParsedKey::DhPrivate { .. }, _) => Err(Error::WrongKeyPart {
            operation: "dh_shared_secret peer",
            part: peer_public.part(),
        }),
        _ => Err(Error::WrongKeyPart {
            operation: "dh_shared_secret",
            part: private.part(),
        }),
    }
}

#[cfg(test)]
mod tests;
