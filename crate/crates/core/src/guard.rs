//! Central whitelist authority.
//!
//! Every name that reaches keygen, configuration, key import or a primitive
//! call passes through here. The whitelists are compiled in; nothing outside
//! them can be represented by the typed labels in [`crate::labels`].

use crate::error::{MisuseClass, MisuseError};
use crate::labels::{Algorithm, AlgorithmClass, Curve, HashAlg, KeySize, Mode};

/// Obsolete or broken ciphers that callers may still ask for by name.
/// Anything on this list is reported as M3S rather than an unknown name.
const OBSOLETE_ALGORITHMS: &[&str] = &[
    "DES", "RC2", "ARC2", "RC4", "ARC4", "RC5", "IDEA", "CAST", "CAST5", "SKIPJACK", "TEA", "XTEA",
    "GOST",
];

pub const APPROVED_HASHES: [HashAlg; 4] = HashAlg::ALL;

/// A validated (algorithm, size, mode, hash) combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KeySpec {
    pub algorithm: Algorithm,
    pub size: KeySize,
    pub mode: Option<Mode>,
    pub hash: HashAlg,
}

pub fn allowed_sizes(algorithm: Algorithm) -> Vec<KeySize> {
    let bits = |v: &[u32]| v.iter().map(|b| KeySize::Bits(*b)).collect::<Vec<_>>();
    match algorithm {
        Algorithm::Aes => bits(&[128, 192, 256]),
        Algorithm::Blowfish => (128..=448).step_by(8).map(KeySize::Bits).collect(),
        Algorithm::TripleDes => bits(&[192]),
        Algorithm::Salsa20 | Algorithm::ChaCha20 => bits(&[256]),
        Algorithm::Hmac => (128..=512).step_by(8).map(KeySize::Bits).collect(),
        Algorithm::Rsa | Algorithm::Dh => bits(&[2048, 3072, 4096]),
        Algorithm::Dsa => bits(&[2048, 3072]),
        Algorithm::Ecdsa => vec![KeySize::Curve(Curve::P256), KeySize::Curve(Curve::P384)],
    }
}

pub fn size_allowed(algorithm: Algorithm, size: KeySize) -> bool {
    match (algorithm, size) {
        (Algorithm::Blowfish, KeySize::Bits(b)) => (128..=448).contains(&b) && b % 8 == 0,
        (Algorithm::Hmac, KeySize::Bits(b)) => (128..=512).contains(&b) && b % 8 == 0,
        _ => allowed_sizes(algorithm).contains(&size),
    }
}

/// Modes usable with a block cipher. AEAD modes need a 128-bit block.
pub fn allowed_modes(algorithm: Algorithm) -> &'static [Mode] {
    match algorithm.block_size() {
        Some(16) => &Mode::ALL,
        Some(_) => &[Mode::Cbc, Mode::Ctr, Mode::Cfb],
        None => &[],
    }
}

/// Size used when no scope binds one explicitly.
pub fn default_size(algorithm: Algorithm) -> KeySize {
    match algorithm {
        Algorithm::TripleDes => KeySize::Bits(192),
        Algorithm::Ecdsa => KeySize::Curve(Curve::P256),
        Algorithm::Rsa | Algorithm::Dsa | Algorithm::Dh => KeySize::Bits(2048),
        _ => KeySize::Bits(256),
    }
}

/// Mode used for a block cipher when no scope binds one explicitly.
pub fn default_mode(algorithm: Algorithm) -> Option<Mode> {
    match algorithm.block_size() {
        Some(16) => Some(Mode::Gcm),
        Some(_) => Some(Mode::Cbc),
        None => None,
    }
}

pub fn is_obsolete_algorithm(name: &str) -> bool {
    let upper = name.trim().to_ascii_uppercase();
    OBSOLETE_ALGORITHMS.contains(&upper.as_str())
}

pub fn check_algorithm(name: &str) -> Result<Algorithm, MisuseError> {
    Algorithm::lookup(name).ok_or_else(|| {
        MisuseError::new(
            MisuseClass::M3S,
            format!("algorithm `{name}` is not in the approved list"),
        )
    })
}

pub fn check_hash(name: &str) -> Result<HashAlg, MisuseError> {
    HashAlg::lookup(name).ok_or_else(|| {
        MisuseError::new(
            MisuseClass::M1H,
            format!("hash `{name}` is not in the approved list"),
        )
    })
}

fn check_size(algorithm: Algorithm, size: &str) -> Result<KeySize, MisuseError> {
    KeySize::parse(size)
        .filter(|s| size_allowed(algorithm, *s))
        .ok_or_else(|| {
            MisuseError::new(
                MisuseClass::M1K,
                format!("key size `{size}` is not approved for {algorithm}"),
            )
        })
}

fn check_mode(algorithm: Algorithm, mode: Option<&str>) -> Result<Option<Mode>, MisuseError> {
    if algorithm == Algorithm::Rsa {
        return match mode {
            None => Ok(None),
            Some(m) if m.trim().eq_ignore_ascii_case("OAEP") => Ok(None),
            Some(m) => Err(MisuseError::new(
                MisuseClass::M1A,
                format!("RSA encryption only uses OAEP, not `{m}`"),
            )),
        };
    }
    match (algorithm.class(), mode) {
        (AlgorithmClass::BlockCipher, None) => Err(MisuseError::new(
            MisuseClass::M1S,
            format!("{algorithm} needs an approved mode of operation"),
        )),
        (AlgorithmClass::BlockCipher, Some(name)) => Mode::lookup(name)
            .filter(|m| allowed_modes(algorithm).contains(m))
            .map(Some)
            .ok_or_else(|| {
                MisuseError::new(
                    MisuseClass::M1S,
                    format!("mode `{name}` is not approved for {algorithm}"),
                )
            }),
        (_, None) => Ok(None),
        (_, Some(name)) => Err(MisuseError::new(
            MisuseClass::M1S,
            format!("mode `{name}` does not apply to {algorithm}"),
        )),
    }
}

/// Checks a requested key specification given by names.
///
/// Checks run in the order algorithm (M3S), size (M1K), mode (M1S, or M1A
/// for RSA), hash (M1H); the first violation is reported. Input is never
/// repaired.
pub fn check_key_spec(
    algorithm: &str,
    size: &str,
    mode: Option<&str>,
    hash: &str,
) -> Result<KeySpec, MisuseError> {
    let algorithm = check_algorithm(algorithm)?;
    let size = check_size(algorithm, size)?;
    let mode = check_mode(algorithm, mode)?;
    let hash = check_hash(hash)?;
    Ok(KeySpec {
        algorithm,
        size,
        mode,
        hash,
    })
}

/// Re-checks a typed specification, as done on every key use.
pub fn validate(spec: &KeySpec) -> Result<(), MisuseError> {
    if !size_allowed(spec.algorithm, spec.size) {
        return Err(MisuseError::new(
            MisuseClass::M1K,
            format!(
                "key size {} is not approved for {}",
                spec.size, spec.algorithm
            ),
        ));
    }
    match (spec.algorithm.class(), spec.mode) {
        (AlgorithmClass::BlockCipher, Some(m)) if allowed_modes(spec.algorithm).contains(&m) => {}
        (AlgorithmClass::BlockCipher, m) => {
            return Err(MisuseError::new(
                MisuseClass::M1S,
                format!(
                    "mode {} is not approved for {}",
                    m.map_or("none", Mode::name),
                    spec.algorithm
                ),
            ))
        }
        (_, None) => {}
        (_, Some(m)) => {
            return Err(MisuseError::new(
                MisuseClass::M1S,
                format!("mode {m} does not apply to {}", spec.algorithm),
            ))
        }
    }
    Ok(())
}

/// How a misuse type is kept out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Enforcement {
    /// Rejected by a compiled-in whitelist.
    Whitelist,
    /// No unsafe path exists to reject.
    Structural,
    /// Key material only ever comes from a strong random source at runtime.
    KeygenRandomness,
}

impl Enforcement {
    pub const fn label(self) -> &'static str {
        match self {
            Enforcement::Whitelist => "whitelist",
            Enforcement::Structural => "enforced structurally",
            Enforcement::KeygenRandomness => "enforced by keygen randomness",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct AuditRow {
    pub class: MisuseClass,
    pub description: &'static str,
    pub enforcement: Enforcement,
    pub point: &'static str,
}

/// One row per misuse type, naming where it is stopped.
pub fn audit_report() -> Vec<AuditRow> {
    MisuseClass::ALL
        .into_iter()
        .map(|class| {
            let (enforcement, point) = match class {
                MisuseClass::M1K => (
                    Enforcement::Whitelist,
                    "key-size whitelist per algorithm; checked at keygen, config key_size_*, key import and every use",
                ),
                MisuseClass::M2K => (
                    Enforcement::KeygenRandomness,
                    "keygen draws all key material from a cryptographically strong random source at runtime",
                ),
                MisuseClass::M1S => (
                    Enforcement::Whitelist,
                    "mode whitelist {CBC, CTR, CFB, EAX, GCM, CCM, SIV, OCB}, ECB excluded; checked at keygen, config block_cipher_mode, key import and every use",
                ),
                MisuseClass::M2S => (
                    Enforcement::Structural,
                    "encrypt's IV generation: a fresh random IV, nonce or counter prefix on every call; callers cannot supply one",
                ),
                MisuseClass::M3S => (
                    Enforcement::Whitelist,
                    "algorithm whitelist {AES, Blowfish, 3DES, Salsa20, ChaCha20, HMAC, RSA, DSA, ECDSA, DH}",
                ),
                MisuseClass::M1A => (
                    Enforcement::Structural,
                    "encrypt uses OAEP padding for RSA with no alternative path",
                ),
                MisuseClass::M1H => (
                    Enforcement::Whitelist,
                    "hash whitelist {SHA224, SHA256, SHA384, SHA512}; MD5 and SHA-1 excluded",
                ),
            };
            AuditRow { class, description: class.description(), enforcement, point }
        })
        .collect()
}
