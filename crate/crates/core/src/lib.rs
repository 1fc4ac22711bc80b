//! Misuse-resistant keygen, encrypt, decrypt, sign and verify.
//!
//! Callers name what they want (`"shared"`, `"public"`, an algorithm) and
//! the library picks IVs, padding and signature schemes. Anything outside
//! the compiled-in whitelists fails with a [`MisuseError`].

pub mod codec;
pub mod config;
pub mod entropy;
pub mod error;
pub mod guard;
pub mod keys;
pub mod labels;
pub mod primitives;
pub mod provider;

pub use codec::PlainValue;
pub use config::ConfigScope;
pub use entropy::Entropy;
pub use error::{Error, MisuseClass, MisuseError, Result};
pub use keys::{GeneratedKey, KeyEnvelope, KeyPair, KeygenOptions};
pub use primitives::{CipherEnvelope, Crypto, SignOutput, Signature, SignedPayload};
