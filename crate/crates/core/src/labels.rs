//! Typed labels carried by keys and envelopes.
//!
//! Every enum here only has variants for approved choices. Names outside
//! these sets are classified by [`crate::guard`], never represented.

use std::fmt;

/// Broad family an algorithm belongs to; decides how keys are generated and
/// which primitives accept them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgorithmClass {
    BlockCipher,
    StreamCipher,
    Mac,
    PublicKey,
    KeyAgreement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Aes,
    Blowfish,
    TripleDes,
    Salsa20,
    ChaCha20,
    Hmac,
    Rsa,
    Dsa,
    Ecdsa,
    Dh,
}

impl Algorithm {
    pub const ALL: [Algorithm; 10] = [
        Algorithm::Aes,
        Algorithm::Blowfish,
        Algorithm::TripleDes,
        Algorithm::Salsa20,
        Algorithm::ChaCha20,
        Algorithm::Hmac,
        Algorithm::Rsa,
        Algorithm::Dsa,
        Algorithm::Ecdsa,
        Algorithm::Dh,
    ];

    pub const fn id(self) -> u8 {
        match self {
            Algorithm::Aes => 1,
            Algorithm::Blowfish => 2,
            Algorithm::TripleDes => 3,
            Algorithm::Salsa20 => 4,
            Algorithm::ChaCha20 => 5,
            Algorithm::Hmac => 6,
            Algorithm::Rsa => 7,
            Algorithm::Dsa => 8,
            Algorithm::Ecdsa => 9,
            Algorithm::Dh => 10,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.id() == id)
    }

    pub const fn name(self) -> &'static str {
        match self {
            Algorithm::Aes => "AES",
            Algorithm::Blowfish => "Blowfish",
            Algorithm::TripleDes => "3DES",
            Algorithm::Salsa20 => "Salsa20",
            Algorithm::ChaCha20 => "ChaCha20",
            Algorithm::Hmac => "HMAC",
            Algorithm::Rsa => "RSA",
            Algorithm::Dsa => "DSA",
            Algorithm::Ecdsa => "ECDSA",
            Algorithm::Dh => "DH",
        }
    }

    /// Case-insensitive lookup of an approved algorithm name.
    pub fn lookup(name: &str) -> Option<Self> {
        let upper = name.trim().to_ascii_uppercase();
        let found = match upper.as_str() {
            "AES" => Algorithm::Aes,
            "BLOWFISH" => Algorithm::Blowfish,
            "3DES" | "TRIPLEDES" | "DES3" | "DES-EDE3" | "TDES" => Algorithm::TripleDes,
            "SALSA20" => Algorithm::Salsa20,
            "CHACHA20" => Algorithm::ChaCha20,
            "HMAC" => Algorithm::Hmac,
            "RSA" => Algorithm::Rsa,
            "DSA" => Algorithm::Dsa,
            "ECDSA" => Algorithm::Ecdsa,
            "DH" | "DIFFIE-HELLMAN" => Algorithm::Dh,
            _ => return None,
        };
        Some(found)
    }

    pub const fn class(self) -> AlgorithmClass {
        match self {
            Algorithm::Aes | Algorithm::Blowfish | Algorithm::TripleDes => {
                AlgorithmClass::BlockCipher
            }
            Algorithm::Salsa20 | Algorithm::ChaCha20 => AlgorithmClass::StreamCipher,
            Algorithm::Hmac => AlgorithmClass::Mac,
            Algorithm::Rsa | Algorithm::Dsa | Algorithm::Ecdsa => AlgorithmClass::PublicKey,
            Algorithm::Dh => AlgorithmClass::KeyAgreement,
        }
    }

    /// Shared-key algorithms produce one secret envelope; the rest produce pairs.
    pub const fn is_shared(self) -> bool {
        matches!(
            self.class(),
            AlgorithmClass::BlockCipher | AlgorithmClass::StreamCipher | AlgorithmClass::Mac
        )
    }

    pub const fn block_size(self) -> Option<usize> {
        match self {
            Algorithm::Aes => Some(16),
            Algorithm::Blowfish | Algorithm::TripleDes => Some(8),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Approved block cipher modes of operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Cbc,
    Ctr,
    Cfb,
    Eax,
    Gcm,
    Ccm,
    Siv,
    Ocb,
}

impl Mode {
    pub const ALL: [Mode; 8] = [
        Mode::Cbc,
        Mode::Ctr,
        Mode::Cfb,
        Mode::Eax,
        Mode::Gcm,
        Mode::Ccm,
        Mode::Siv,
        Mode::Ocb,
    ];

    pub const fn id(self) -> u8 {
        match self {
            Mode::Cbc => 1,
            Mode::Ctr => 2,
            Mode::Cfb => 3,
            Mode::Eax => 4,
            Mode::Gcm => 5,
            Mode::Ccm => 6,
            Mode::Siv => 7,
            Mode::Ocb => 8,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.id() == id)
    }

    pub const fn name(self) -> &'static str {
        match self {
            Mode::Cbc => "CBC",
            Mode::Ctr => "CTR",
            Mode::Cfb => "CFB",
            Mode::Eax => "EAX",
            Mode::Gcm => "GCM",
            Mode::Ccm => "CCM",
            Mode::Siv => "SIV",
            Mode::Ocb => "OCB",
        }
    }

    pub fn lookup(name: &str) -> Option<Self> {
        let upper = name.trim().to_ascii_uppercase();
        Self::ALL
            .into_iter()
            .find(|m| m.name() == upper || (upper == "OCB3" && *m == Mode::Ocb))
    }

    /// Authenticated modes carry a 16-byte tag.
    pub const fn is_aead(self) -> bool {
        !matches!(self, Mode::Cbc | Mode::Ctr | Mode::Cfb)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HashAlg {
    Sha224,
    Sha256,
    Sha384,
    Sha512,
}

impl HashAlg {
    pub const ALL: [HashAlg; 4] = [
        HashAlg::Sha224,
        HashAlg::Sha256,
        HashAlg::Sha384,
        HashAlg::Sha512,
    ];

    pub const fn id(self) -> u8 {
        match self {
            HashAlg::Sha224 => 1,
            HashAlg::Sha256 => 2,
            HashAlg::Sha384 => 3,
            HashAlg::Sha512 => 4,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|h| h.id() == id)
    }

    pub const fn name(self) -> &'static str {
        match self {
            HashAlg::Sha224 => "SHA224",
            HashAlg::Sha256 => "SHA256",
            HashAlg::Sha384 => "SHA384",
            HashAlg::Sha512 => "SHA512",
        }
    }

    /// Accepts `SHA256`, `sha-256` and similar spellings.
    pub fn lookup(name: &str) -> Option<Self> {
        let normalized: String = name
            .trim()
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .collect::<String>()
            .to_ascii_uppercase();
        Self::ALL.into_iter().find(|h| h.name() == normalized)
    }

    pub const fn output_len(self) -> usize {
        match self {
            HashAlg::Sha224 => 28,
            HashAlg::Sha256 => 32,
            HashAlg::Sha384 => 48,
            HashAlg::Sha512 => 64,
        }
    }
}

impl fmt::Display for HashAlg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Curve {
    P256,
    P384,
}

impl Curve {
    pub const fn name(self) -> &'static str {
        match self {
            Curve::P256 => "P-256",
            Curve::P384 => "P-384",
        }
    }

    pub fn lookup(name: &str) -> Option<Self> {
        match name.trim().to_ascii_uppercase().as_str() {
            "P-256" | "P256" | "SECP256R1" | "PRIME256V1" => Some(Curve::P256),
            "P-384" | "P384" | "SECP384R1" => Some(Curve::P384),
            _ => None,
        }
    }
}

/// Key size: a bit count, or a named curve for ECDSA.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KeySize {
    Bits(u32),
    Curve(Curve),
}

impl KeySize {
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Ok(bits) = text.parse::<u32>() {
            return Some(KeySize::Bits(bits));
        }
        Curve::lookup(text).map(KeySize::Curve)
    }

    pub const fn bits(self) -> Option<u32> {
        match self {
            KeySize::Bits(b) => Some(b),
            KeySize::Curve(_) => None,
        }
    }
}

impl fmt::Display for KeySize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KeySize::Bits(b) => write!(f, "{b}"),
            KeySize::Curve(c) => f.write_str(c.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum SignMode {
    #[default]
    Detached,
    Combined,
}

impl SignMode {
    pub const fn name(self) -> &'static str {
        match self {
            SignMode::Detached => "detached",
            SignMode::Combined => "combined",
        }
    }

    pub fn lookup(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "detached" => Some(SignMode::Detached),
            "combined" => Some(SignMode::Combined),
            _ => None,
        }
    }
}

impl fmt::Display for SignMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The generic key types accepted by keygen in place of an algorithm name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KeyKind {
    Shared,
    Public,
}

impl KeyKind {
    pub const fn name(self) -> &'static str {
        match self {
            KeyKind::Shared => "shared",
            KeyKind::Public => "public",
        }
    }

    pub fn lookup(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "shared" => Some(KeyKind::Shared),
            "public" => Some(KeyKind::Public),
            _ => None,
        }
    }
}

impl fmt::Display for KeyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which half of the key material an envelope holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Part {
    Secret,
    Private,
    Public,
}

impl Part {
    pub const fn name(self) -> &'static str {
        match self {
            Part::Secret => "secret",
            Part::Private => "private",
            Part::Public => "public",
        }
    }

    pub fn lookup(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "secret" => Some(Part::Secret),
            "private" => Some(Part::Private),
            "public" => Some(Part::Public),
            _ => None,
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
