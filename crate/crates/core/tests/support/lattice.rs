//! Round trip over every whitelisted (algorithm, size, mode) combination.

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use secalgo::guard::{allowed_modes, allowed_sizes};
use secalgo::keys::KeygenOptions;
use secalgo::labels::{Algorithm, KeySize, Mode};
use secalgo::{ConfigScope, Crypto, KeyEnvelope, PlainValue};

pub fn plain_value() -> impl Strategy<Value = PlainValue> {
    let leaf = prop_oneof![
        prop::collection::vec(any::<u8>(), 0..300).prop_map(PlainValue::Bytes),
        ".{0,40}".prop_map(PlainValue::Str),
        any::<i64>().prop_map(PlainValue::Int),
        any::<bool>().prop_map(PlainValue::Bool),
    ];
    leaf.prop_recursive(4, 48, 6, |inner| {
        prop::collection::vec(inner, 0..6).prop_map(PlainValue::Tuple)
    })
}

/// Every combination encryption can be configured with.
pub fn combinations() -> Vec<(Algorithm, KeySize, Option<Mode>)> {
    let mut out = vec![];
    for alg in [
        Algorithm::Aes,
        Algorithm::Blowfish,
        Algorithm::TripleDes,
        Algorithm::Salsa20,
        Algorithm::ChaCha20,
        Algorithm::Rsa,
    ] {
        for size in allowed_sizes(alg) {
            let modes = allowed_modes(alg);
            if modes.is_empty() {
                out.push((alg, size, None));
            }
            for m in modes {
                out.push((alg, size, Some(*m)));
            }
        }
    }
    out
}

fn keys(
    c: &Crypto,
    alg: Algorithm,
    size: KeySize,
    mode: Option<Mode>,
) -> (KeyEnvelope, KeyEnvelope) {
    let mut opts = KeygenOptions::default().size(size);
    opts.mode = mode.map(|m| m.name().to_owned());
    let k = c
        .keygen_with(alg.name(), &opts)
        .expect("whitelisted keygen");
    match k {
        secalgo::GeneratedKey::Shared(k) => (k.clone(), k),
        secalgo::GeneratedKey::Pair(p) => (p.public_key, p.private_key),
    }
}

/// Runs `cases` random values through each combination. Returns the number
/// of combinations checked.
pub fn run(cases: u32) -> Result<usize, String> {
    let c = Crypto::with_scope(ConfigScope::root());
    let combos = combinations();
    for &(alg, size, mode) in &combos {
        let (enc, dec) = keys(&c, alg, size, mode);
        let mut runner = TestRunner::new(Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        });
        runner
            .run(&plain_value(), |v| {
                let env = c
                    .encrypt(&v, &enc)
                    .map_err(|e| TestCaseError::fail(e.to_string()))?;
                let wire = secalgo::CipherEnvelope::from_bytes(&env.to_bytes())
                    .map_err(|e| TestCaseError::fail(e.to_string()))?;
                let back = c
                    .decrypt(&wire, &dec)
                    .map_err(|e| TestCaseError::fail(e.to_string()))?;
                prop_assert_eq!(back, v);
                Ok(())
            })
            .map_err(|e| format!("{alg}-{size}-{}: {e}", mode.map_or("none", Mode::name)))?;
    }
    Ok(combos.len())
}
