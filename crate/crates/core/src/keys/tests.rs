use std::collections::HashSet;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::*;
use crate::entropy::Entropy;

fn rng() -> Entropy {
    Entropy::Os
}

fn gen(kind: &str, opts: KeygenOptions) -> Result<GeneratedKey> {
    keygen(kind, &ConfigScope::root(), &opts, &mut rng())
}

#[test]
fn shared_default_is_aes_256_gcm() {
    let key = gen("shared", KeygenOptions::default())
        .unwrap()
        .into_shared()
        .unwrap();
    assert_eq!(key.algorithm(), Algorithm::Aes);
    assert_eq!(key.size(), KeySize::Bits(256));
    assert_eq!(key.mode(), Some(Mode::Gcm));
    assert_eq!(key.part(), Part::Secret);
    assert_eq!(key.sign_hash(), HashAlg::Sha256);
    assert_eq!(key.sign_mode(), SignMode::Detached);
    assert_eq!(key.material().len(), 32);
}

#[test]
fn public_default_is_rsa_2048_pair() {
    let pair = gen("public", KeygenOptions::default())
        .unwrap()
        .into_pair()
        .unwrap();
    assert_eq!(pair.private_key.algorithm(), Algorithm::Rsa);
    assert_eq!(pair.private_key.size(), KeySize::Bits(2048));
    assert_eq!(pair.private_key.part(), Part::Private);
    assert_eq!(pair.public_key.part(), Part::Public);
    assert_eq!(pair.public_key.mode(), None);
    assert_eq!(pair.private_key.public_key().unwrap(), pair.public_key);
}

#[test]
fn insufficient_size_is_m1k() {
    let allowed: Vec<u32> = guard::allowed_sizes(Algorithm::Aes)
        .iter()
        .filter_map(|s| s.bits())
        .collect();
    assert!(allowed.iter().all(|b| 64 < *b));
    let err = gen("AES", KeygenOptions::default().size(64)).unwrap_err();
    assert_eq!(err.misuse_class(), Some(MisuseClass::M1K));
    let err = gen("RSA", KeygenOptions::default().size(1024)).unwrap_err();
    assert_eq!(err.misuse_class(), Some(MisuseClass::M1K));
}

#[test]
fn algorithm_errors() {
    assert_eq!(
        gen("DES", KeygenOptions::default())
            .unwrap_err()
            .misuse_class(),
        Some(MisuseClass::M3S)
    );
    assert_eq!(
        gen("rc4", KeygenOptions::default())
            .unwrap_err()
            .misuse_class(),
        Some(MisuseClass::M3S)
    );
    assert!(matches!(
        gen("Rijndael-9", KeygenOptions::default()),
        Err(Error::UnknownAlgorithm(_))
    ));
    assert_eq!(
        gen("AES", KeygenOptions::default().mode("ECB"))
            .unwrap_err()
            .misuse_class(),
        Some(MisuseClass::M1S)
    );
    assert_eq!(
        gen("RSA", KeygenOptions::default().mode("PKCS1v15"))
            .unwrap_err()
            .misuse_class(),
        Some(MisuseClass::M1A)
    );
    assert_eq!(
        gen("HMAC", KeygenOptions::default().sign_hash("MD5"))
            .unwrap_err()
            .misuse_class(),
        Some(MisuseClass::M1H)
    );
}

#[test]
fn scope_drives_generic_types() {
    let scope = ConfigScope::root()
        .set("key_type_shared", "Blowfish")
        .unwrap()
        .set("key_size_shared", "448")
        .unwrap();
    let key = keygen("shared", &scope, &KeygenOptions::default(), &mut rng()).unwrap();
    let key = key.into_shared().unwrap();
    assert_eq!(
        (key.algorithm(), key.size(), key.mode()),
        (Algorithm::Blowfish, KeySize::Bits(448), Some(Mode::Cbc))
    );
    assert_eq!(key.material().len(), 56);

    // an explicit mode the cipher cannot use is refused, not replaced
    let gcm = scope.set("block_cipher_mode", "GCM").unwrap();
    let err = keygen("shared", &gcm, &KeygenOptions::default(), &mut rng()).unwrap_err();
    assert_eq!(err.misuse_class(), Some(MisuseClass::M1S));

    let ec = ConfigScope::root().set("key_type_public", "ECDSA").unwrap();
    let pair = keygen("public", &ec, &KeygenOptions::default(), &mut rng())
        .unwrap()
        .into_pair()
        .unwrap();
    assert_eq!(pair.public_key.size(), KeySize::Curve(Curve::P256));
}

#[test]
fn triple_des_under_defaults() {
    let key = gen("3DES", KeygenOptions::default())
        .unwrap()
        .into_shared()
        .unwrap();
    assert_eq!(
        (key.size(), key.mode()),
        (KeySize::Bits(192), Some(Mode::Cbc))
    );
    let stream = gen("ChaCha20", KeygenOptions::default())
        .unwrap()
        .into_shared()
        .unwrap();
    assert_eq!(stream.mode(), None);
}

#[test]
fn hmac_key_with_sha512() {
    let key = gen(
        "HMAC",
        KeygenOptions::default().size(256).sign_hash("SHA512"),
    )
    .unwrap();
    let key = key.into_shared().unwrap();
    assert_eq!(key.sign_hash(), HashAlg::Sha512);
    assert_eq!(key.mode(), None);
}

#[test]
fn generated_material_is_fresh() {
    let mut seen = HashSet::new();
    for _ in 0..100 {
        let key = gen("shared", KeygenOptions::default())
            .unwrap()
            .into_shared()
            .unwrap();
        assert!(seen.insert(key.material().to_vec()));
    }
}

#[test]
fn export_import_round_trip_and_layout() {
    let key = gen("AES", KeygenOptions::default().size(128).mode("CTR"))
        .unwrap()
        .into_shared()
        .unwrap();
    let bytes = key.export();
    assert_eq!(KeyEnvelope::import(&bytes).unwrap(), key);
    let text = String::from_utf8(bytes.clone()).unwrap();
    let order = [
        "\"version\"",
        "\"algorithm\"",
        "\"size\"",
        "\"mode\"",
        "\"part\"",
        "\"sign_hash\"",
        "\"sign_mode\"",
        "\"material\"",
    ];
    let positions: Vec<usize> = order.iter().map(|f| text.find(f).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(key.export(), bytes);
}

#[test]
fn tampered_mode_label_is_m1s() {
    let key = gen("shared", KeygenOptions::default())
        .unwrap()
        .into_shared()
        .unwrap();
    let text = String::from_utf8(key.export())
        .unwrap()
        .replace("\"GCM\"", "\"ECB\"");
    let err = KeyEnvelope::import(text.as_bytes()).unwrap_err();
    assert_eq!(err.misuse_class(), Some(MisuseClass::M1S));
}

#[test]
fn tampered_labels_report_their_class() {
    let key = gen("shared", KeygenOptions::default())
        .unwrap()
        .into_shared()
        .unwrap();
    let text = String::from_utf8(key.export()).unwrap();
    let class = |t: String| {
        KeyEnvelope::import(t.as_bytes())
            .unwrap_err()
            .misuse_class()
    };
    assert_eq!(
        class(text.replace("\"AES\"", "\"DES\"")),
        Some(MisuseClass::M3S)
    );
    assert_eq!(class(text.replace("256,", "40,")), Some(MisuseClass::M1K));
    assert_eq!(
        class(text.replace("\"SHA256\"", "\"SHA1\"")),
        Some(MisuseClass::M1H)
    );
}

#[test]
fn malformed_key_files() {
    let key = gen("shared", KeygenOptions::default())
        .unwrap()
        .into_shared()
        .unwrap();
    let bytes = key.export();
    assert!(matches!(
        KeyEnvelope::import(&bytes[..bytes.len() / 2]),
        Err(Error::Parse(_))
    ));
    assert!(matches!(KeyEnvelope::import(b""), Err(Error::Parse(_))));
    // material length must match the size label
    let text = String::from_utf8(bytes).unwrap().replace("256,", "128,");
    assert!(matches!(
        KeyEnvelope::import(text.as_bytes()),
        Err(Error::Parse(_))
    ));
}

#[test]
fn plain_value_round_trip() {
    let key = gen("ChaCha20", KeygenOptions::default())
        .unwrap()
        .into_shared()
        .unwrap();
    assert_eq!(KeyEnvelope::from_plain(&key.to_plain()).unwrap(), key);
    assert!(KeyEnvelope::from_plain(&PlainValue::Int(3)).is_err());
}

#[test]
fn ecdsa_pairs_derive_public_half() {
    for curve in ["P-256", "P-384"] {
        let pair = gen("ECDSA", KeygenOptions::default().size(curve))
            .unwrap()
            .into_pair()
            .unwrap();
        assert_eq!(pair.private_key.public_key().unwrap(), pair.public_key);
        let back = KeyEnvelope::import(&pair.public_key.export()).unwrap();
        assert_eq!(back, pair.public_key);
    }
}

#[test]
fn rsa_round_trip_through_file() {
    let pair = gen("RSA", KeygenOptions::default())
        .unwrap()
        .into_pair()
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.json");
    write_key_file(&path, &pair.private_key).unwrap();
    assert_eq!(read_key_file(&path).unwrap(), pair.private_key);
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let mode = std::fs::metadata(&path).unwrap().permissions().mode();
        assert_eq!(mode & 0o777, 0o600);
    }
}

#[test]
fn dh_pairs_agree() {
    let scope = ConfigScope::root();
    let a = dh_keygen("modp-2048", &scope, &mut rng()).unwrap();
    let b = dh_keygen("modp-2048", &scope, &mut rng()).unwrap();
    assert_ne!(a.private_key.material(), b.private_key.material());
    let group = DhGroup::named("modp-2048").unwrap();
    let y = BigUint::from_bytes_be(a.public_key.material());
    assert!(y > BigUint::from(1u8) && y < group.prime() - 1u8);
    let x = BigUint::from_bytes_be(a.private_key.material());
    assert_eq!(group.generator().modpow(&x, group.prime()), y);
    let s1 = dh_shared_secret(&a.private_key, &b.public_key).unwrap();
    let s2 = dh_shared_secret(&b.private_key, &a.public_key).unwrap();
    assert_eq!(s1, s2);
    assert_eq!(s1.len(), 256);
    assert!(matches!(
        dh_keygen("bogus", &scope, &mut rng()),
        Err(Error::UnknownGroup(_))
    ));
}

#[test]
fn dh_rejects_degenerate_and_mismatched_peers() {
    let scope = ConfigScope::root();
    let mut seeded = ChaCha20Rng::seed_from_u64(1);
    let a = dh_keygen("modp-2048", &scope, &mut seeded).unwrap();
    let mut one = vec![0u8; 256];
    one[255] = 1;
    let peer = KeyEnvelope::from_labels(1, "DH", "2048", None, "public", "SHA256", "detached", one)
        .unwrap();
    assert!(matches!(
        dh_shared_secret(&a.private_key, &peer),
        Err(Error::DegenerateValue)
    ));
    let c = dh_keygen("modp-3072", &scope, &mut seeded).unwrap();
    assert!(matches!(
        dh_shared_secret(&a.private_key, &c.public_key),
        Err(Error::GroupMismatch)
    ));
}

#[test]
fn tiny_group_matches_brute_force() {
    // repeated multiplication, independent of modpow
    fn slow_pow(g: u64, e: u64, p: u64) -> u64 {
        (0..e).fold(1, |acc, _| acc * g % p)
    }
    let group = DhGroup::custom("tiny", 23u8.into(), 5u8.into());
    let (x, y) = (6u64, 15u64);
    let gx = group.public_value(&x.into());
    let gy = group.public_value(&y.into());
    assert_eq!(gx, slow_pow(5, 6, 23).into());
    assert_eq!(gy, slow_pow(5, 15, 23).into());
    let s_a = group.shared_secret(&x.into(), &gy).unwrap();
    let s_b = group.shared_secret(&y.into(), &gx).unwrap();
    assert_eq!(s_a, s_b);
    assert_eq!(s_a, vec![slow_pow(5, 90, 23) as u8]);
    assert_eq!(s_a, vec![2]);
}

#[test]
#[ignore = "DSA parameter generation takes a while"]
fn dsa_pair_round_trip() {
    let pair = gen("DSA", KeygenOptions::default())
        .unwrap()
        .into_pair()
        .unwrap();
    assert_eq!(
        KeyEnvelope::import(&pair.private_key.export()).unwrap(),
        pair.private_key
    );
    assert_eq!(pair.private_key.public_key().unwrap(), pair.public_key);
}
