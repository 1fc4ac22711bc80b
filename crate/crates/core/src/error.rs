use std::fmt;

use crate::codec::CodecError;
use crate::labels::{Algorithm, Part};

/// The seven misuse types the library prevents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum MisuseClass {
    M1K,
    M2K,
    M1S,
    M2S,
    M3S,
    M1A,
    M1H,
}

impl MisuseClass {
    pub const ALL: [MisuseClass; 7] = [
        MisuseClass::M1K,
        MisuseClass::M2K,
        MisuseClass::M1S,
        MisuseClass::M2S,
        MisuseClass::M3S,
        MisuseClass::M1A,
        MisuseClass::M1H,
    ];

    pub const fn code(self) -> &'static str {
        match self {
            MisuseClass::M1K => "M1K",
            MisuseClass::M2K => "M2K",
            MisuseClass::M1S => "M1S",
            MisuseClass::M2S => "M2S",
            MisuseClass::M3S => "M3S",
            MisuseClass::M1A => "M1A",
            MisuseClass::M1H => "M1H",
        }
    }

    pub const fn description(self) -> &'static str {
        match self {
            MisuseClass::M1K => "Insufficient key size",
            MisuseClass::M2K => "Constant or hardcoded keys",
            MisuseClass::M1S => "Encryption in ECB mode",
            MisuseClass::M2S => "Encryption with predictable IV",
            MisuseClass::M3S => "Encryption with obsolete algorithm",
            MisuseClass::M1A => "RSA encryption without OAEP",
            MisuseClass::M1H => "Hashing with obsolete algorithm",
        }
    }
}

impl fmt::Display for MisuseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("misuse {class} ({}): {detail}", class.description())]
pub struct MisuseError {
    pub class: MisuseClass,
    pub detail: String,
}

impl MisuseError {
    pub fn new(class: MisuseClass, detail: impl Into<String>) -> Self {
        MisuseError {
            class,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Misuse(#[from] MisuseError),

    #[error("unknown configuration item `{0}`")]
    UnknownItem(String),

    #[error("{}value `{value}` is not allowed for `{item}`{}",
        line.map(|l| format!("line {l}: ")).unwrap_or_default(),
        class.map(|c| format!(" (misuse {c})")).unwrap_or_default())]
    DisallowedValue {
        item: String,
        value: String,
        class: Option<MisuseClass>,
        line: Option<usize>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("unknown Diffie-Hellman group `{0}`")]
    UnknownGroup(String),

    #[error("Diffie-Hellman keys belong to different groups")]
    GroupMismatch,

    #[error("degenerate Diffie-Hellman public value")]
    DegenerateValue,

    #[error("{operation} cannot use a {part} key")]
    WrongKeyPart { operation: &'static str, part: Part },

    #[error("{operation} is not supported for {algorithm} keys")]
    UnsupportedOperation {
        operation: &'static str,
        algorithm: Algorithm,
    },

    /// Deliberately carries no detail: bad key, bad tag, bad padding and
    /// malformed envelopes all look the same.
    #[error("decryption failed")]
    DecryptionFailure,

    #[error(transparent)]
    Codec(#[from] CodecError),

    #[error("provider failure: {0}")]
    Provider(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// The misuse class behind this error, for both guard rejections and
    /// whitelisted configuration values.
    pub fn misuse_class(&self) -> Option<MisuseClass> {
        match self {
            Error::Misuse(m) => Some(m.class),
            Error::DisallowedValue { class, .. } => *class,
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
