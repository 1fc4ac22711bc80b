//! Committed envelopes, one per scheme, checked against an independent
//! reading of the wire layout. Shared with the acceptance suite.

use std::path::{Path, PathBuf};

use secalgo::{CipherEnvelope, Crypto, KeyEnvelope, PlainValue};
use serde::Deserialize;

#[derive(Deserialize)]
pub struct GoldenCase {
    pub name: String,
    pub scheme: u8,
    pub algorithm: u8,
    pub mode: u8,
    pub header_len: usize,
    pub wrapped: bool,
    pub tagged: bool,
    pub key: String,
    pub envelope: String,
    pub plaintext: String,
}

pub fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden")
}

pub fn cases() -> Vec<GoldenCase> {
    let text = std::fs::read_to_string(dir().join("manifest.json")).expect("golden manifest");
    serde_json::from_str(&text).expect("golden manifest json")
}

/// Splits the bytes by hand and compares every field against the manifest.
fn check_layout(case: &GoldenCase, bytes: &[u8]) -> Result<(), String> {
    let fail = |what: &str| Err(format!("{}: {what}", case.name));
    if bytes.len() < 4 {
        return fail("too short");
    }
    if bytes[0] != 1 {
        return fail("version byte");
    }
    if (bytes[1], bytes[2], bytes[3]) != (case.scheme, case.algorithm, case.mode) {
        return fail("scheme/algorithm/mode bytes");
    }
    let mut rest = &bytes[4..];
    if rest.len() < case.header_len {
        return fail("header truncated");
    }
    rest = &rest[case.header_len..];
    if case.wrapped {
        if rest.len() < 4 {
            return fail("wrapped-key length missing");
        }
        let n = u32::from_be_bytes(rest[..4].try_into().unwrap()) as usize;
        if rest.len() < 4 + n || n == 0 {
            return fail("wrapped key truncated");
        }
        rest = &rest[4 + n..];
    }
    let tag = if case.tagged { 16 } else { 0 };
    if rest.len() < tag {
        return fail("tag truncated");
    }
    let env = CipherEnvelope::from_bytes(bytes).map_err(|e| format!("{}: {e}", case.name))?;
    if env.header().len() != case.header_len
        || env.body() != &rest[..rest.len() - tag]
        || env.tag().map(<[u8]>::len).unwrap_or(0) != tag
        || env.wrapped_key().is_some() != case.wrapped
    {
        return fail("parsed fields disagree with the layout");
    }
    if env.to_bytes() != bytes {
        return fail("re-serialization differs");
    }
    Ok(())
}

pub fn check(case: &GoldenCase) -> Result<(), String> {
    let d = dir();
    let key_bytes = std::fs::read(d.join(&case.key)).map_err(|e| e.to_string())?;
    let key = KeyEnvelope::import(&key_bytes).map_err(|e| format!("{}: {e}", case.name))?;
    let bytes = std::fs::read(d.join(&case.envelope)).map_err(|e| e.to_string())?;
    check_layout(case, &bytes)?;
    let env = CipherEnvelope::from_bytes(&bytes).map_err(|e| e.to_string())?;
    let got = Crypto::with_scope(secalgo::ConfigScope::root())
        .decrypt(&env, &key)
        .map_err(|e| format!("{}: {e}", case.name))?;
    if got != PlainValue::from(case.plaintext.as_str()) {
        return Err(format!("{}: plaintext mismatch", case.name));
    }
    Ok(())
}

pub fn check_all() -> Result<usize, String> {
    let cases = cases();
    let mut schemes: Vec<u8> = cases.iter().map(|c| c.scheme).collect();
    schemes.sort_unstable();
    schemes.dedup();
    if schemes != [1, 2, 3, 4, 5] {
        return Err(format!("schemes covered: {schemes:?}"));
    }
    for c in &cases {
        check(c)?;
    }
    Ok(cases.len())
}
