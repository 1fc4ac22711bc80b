//! Provokes every misuse class through each entry point that can reach it.

use std::collections::HashSet;

use secalgo::config::parse_config;
use secalgo::keys::KeygenOptions;
use secalgo::{ConfigScope, Crypto, Error, KeyEnvelope, MisuseClass, PlainValue};

pub struct Row {
    pub class: MisuseClass,
    pub entry: String,
    pub outcome: Result<(), String>,
}

fn expect(
    class: MisuseClass,
    entry: impl Into<String>,
    result: Result<impl std::fmt::Debug, Error>,
) -> Row {
    let entry = entry.into();
    let outcome = match result {
        Err(e) if e.misuse_class() == Some(class) => Ok(()),
        Err(e) => Err(format!("wrong error: {e}")),
        Ok(v) => Err(format!("accepted: {v:?}")),
    };
    Row {
        class,
        entry,
        outcome,
    }
}

fn tamper(key: &KeyEnvelope, from: &str, to: &str) -> Result<KeyEnvelope, Error> {
    let text = String::from_utf8(key.export()).expect("utf8 export");
    assert!(text.contains(from), "{from} not in export");
    KeyEnvelope::import(text.replacen(from, to, 1).as_bytes())
}

pub fn matrix() -> Vec<Row> {
    use MisuseClass::*;
    let c = Crypto::with_scope(ConfigScope::root());
    let gen = |kind: &str, opts: KeygenOptions| c.keygen_with(kind, &opts).map(|_| ());
    let set = |item: &str, value: &str| ConfigScope::root().set(item, value).map(|_| ());
    let file = |text: &str| parse_config(text, None).map(|_| ());

    let aes = c.keygen_shared("shared").expect("AES key");
    let rsa = c.keygen_pair("public").expect("RSA pair");

    vec![
        // M1K
        expect(
            M1K,
            "keygen AES size 64",
            gen("AES", KeygenOptions::default().size(64)),
        ),
        expect(
            M1K,
            "keygen RSA size 1024",
            gen("RSA", KeygenOptions::default().size(1024)),
        ),
        expect(
            M1K,
            "keygen ECDSA P-192",
            gen("ECDSA", KeygenOptions::default().size("P-192")),
        ),
        expect(
            M1K,
            "config key_size_shared=64",
            set("key_size_shared", "64"),
        ),
        expect(
            M1K,
            "config key_size_public=1024",
            set("key_size_public", "1024"),
        ),
        expect(
            M1K,
            "config file key_size_shared",
            file("key_size_shared = 40\n"),
        ),
        expect(
            M1K,
            "import AES size 40",
            tamper(&aes, "\"size\": 256", "\"size\": 40"),
        ),
        // M1S
        expect(
            M1S,
            "keygen AES mode ECB",
            gen("AES", KeygenOptions::default().mode("ECB")),
        ),
        expect(
            M1S,
            "keygen 3DES mode GCM",
            gen("3DES", KeygenOptions::default().mode("GCM")),
        ),
        expect(
            M1S,
            "config block_cipher_mode=ECB",
            set("block_cipher_mode", "ECB"),
        ),
        expect(
            M1S,
            "config file block_cipher_mode",
            file("block_cipher_mode = ECB\n"),
        ),
        expect(
            M1S,
            "import AES mode ECB",
            tamper(&aes, "\"GCM\"", "\"ECB\""),
        ),
        // M3S
        expect(M3S, "keygen DES", gen("DES", KeygenOptions::default())),
        expect(M3S, "keygen RC4", gen("RC4", KeygenOptions::default())),
        expect(
            M3S,
            "config key_type_shared=DES",
            set("key_type_shared", "DES"),
        ),
        expect(
            M3S,
            "config key_type_public=DES",
            set("key_type_public", "DES"),
        ),
        expect(
            M3S,
            "config file key_type_shared",
            file("key_type_shared = RC4\n"),
        ),
        expect(
            M3S,
            "import algorithm DES",
            tamper(&aes, "\"AES\"", "\"DES\""),
        ),
        // M1A: no configuration item selects RSA padding
        expect(
            M1A,
            "keygen RSA mode PKCS1v15",
            gen("RSA", KeygenOptions::default().mode("PKCS1v15")),
        ),
        expect(
            M1A,
            "keygen RSA mode none",
            gen("RSA", KeygenOptions::default().mode("raw")),
        ),
        expect(
            M1A,
            "import RSA mode PKCS1v15",
            tamper(&rsa.public_key, "\"mode\": null", "\"mode\": \"PKCS1v15\""),
        ),
        // M1H
        expect(
            M1H,
            "keygen HMAC hash MD5",
            gen("HMAC", KeygenOptions::default().sign_hash("MD5")),
        ),
        expect(
            M1H,
            "keygen RSA hash SHA1",
            gen("RSA", KeygenOptions::default().sign_hash("SHA1")),
        ),
        expect(M1H, "config sign_hash=MD5", set("sign_hash", "MD5")),
        expect(M1H, "config file sign_hash", file("sign_hash = SHA1\n")),
        expect(
            M1H,
            "import hash SHA1",
            tamper(&aes, "\"SHA256\"", "\"SHA1\""),
        ),
    ]
}

/// M2K: fresh material on every keygen call.
pub fn distinct_keys(n: usize) -> Result<(), String> {
    let c = Crypto::with_scope(ConfigScope::root());
    let mut seen = HashSet::new();
    for _ in 0..n {
        let k = c.keygen_shared("shared").map_err(|e| e.to_string())?;
        if !seen.insert(k.material().to_vec()) {
            return Err("repeated key material".into());
        }
    }
    Ok(())
}

/// M2S: fresh IV or nonce on every encryption.
pub fn distinct_headers(n: usize) -> Result<(), String> {
    let c = Crypto::with_scope(ConfigScope::root());
    for mode in ["GCM", "CBC", "CTR", "CFB"] {
        let key = c
            .keygen_with("AES", &KeygenOptions::default().mode(mode))
            .ok()
            .and_then(|k| k.into_shared())
            .ok_or("keygen failed")?;
        let v = PlainValue::from("same plaintext");
        let mut seen = HashSet::new();
        for _ in 0..n {
            let env = c.encrypt(&v, &key).map_err(|e| e.to_string())?;
            if !seen.insert(env.header().to_vec()) {
                return Err(format!("{mode}: repeated header"));
            }
        }
    }
    Ok(())
}
