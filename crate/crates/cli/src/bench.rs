//! Wrapped-versus-direct microbenchmarks.
//!
//! Each operation is measured as the library call ("wrapped") and as the
//! same work done straight against the underlying crates ("direct"). One
//! measurement is a loop of at least `min_loop` that alternates the two
//! and times each call separately, so drift affects both sides equally.
//!
//! RSA key generation costs hundreds of milliseconds per call and its timing
//! varies by several percent between identical calls, so it runs last and
//! keeps adding repetitions until the optional time budget is spent.

use std::time::{Duration, Instant};

use aes::cipher::block_padding::Pkcs7;
use aes::cipher::{BlockDecryptMut, BlockEncryptMut, KeyIvInit};
use hmac::{Hmac, Mac};
use rand::rngs::OsRng;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rsa::pkcs1::DecodeRsaPrivateKey;
use rsa::{Oaep, Pkcs1v15Sign, RsaPrivateKey, RsaPublicKey};
use secalgo::keys::KeygenOptions;
use secalgo::{ConfigScope, Crypto, Entropy, KeyEnvelope};
use serde::Serialize;
use sha2::{Digest, Sha256, Sha512};

/// Per-call overhead ceilings.
pub const SHARED_LIMIT_US: f64 = 25.0;
pub const PUBLIC_LIMIT_PCT: f64 = 2.0;

const SHARED_MSG: usize = 1024;
const RSA_MSG: usize = 32;

/// Total running time the default options aim for.
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(580);

#[derive(Clone, Copy, Debug)]
pub struct BenchOptions {
    pub min_loop: Duration,
    /// Minimum measurements per operation.
    pub repetitions: u32,
    /// Extra RSA keygen measurements are taken while the whole run stays
    /// inside this budget.
    pub budget: Option<Duration>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            min_loop: Duration::from_secs(1),
            repetitions: 50,
            budget: Some(DEFAULT_BUDGET),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Op {
    Keygen,
    Encrypt,
    Decrypt,
    Sign,
    Verify,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub op: Op,
    pub configuration: &'static str,
    pub public_key: bool,
    pub repetitions: u32,
    pub calls: u64,
    pub wrapped_us: f64,
    pub direct_us: f64,
    pub overhead_us: f64,
    pub overhead_pct: f64,
}

impl BenchRow {
    /// Absolute ceiling for shared-key rows, relative for RSA rows.
    pub fn within_limit(&self) -> bool {
        if self.public_key {
            self.overhead_pct < PUBLIC_LIMIT_PCT
        } else {
            self.overhead_us < SHARED_LIMIT_US
        }
    }

    pub fn limit(&self) -> String {
        if self.public_key {
            format!("< {PUBLIC_LIMIT_PCT}%")
        } else {
            format!("< {SHARED_LIMIT_US} us")
        }
    }
}

/// One benchmarked pair. `step(i)` runs call number `i` of the wrapped or
/// direct variant.
struct Case {
    op: Op,
    configuration: &'static str,
    public_key: bool,
    /// Measured last, with any time left in the budget.
    extendable: bool,
    wrapped: Box<dyn FnMut(u64)>,
    direct: Box<dyn FnMut(u64)>,
}

fn time(f: &mut dyn FnMut(u64), i: u64) -> Duration {
    let t = Instant::now();
    f(i);
    t.elapsed()
}

fn measure(case: &mut Case, opts: &BenchOptions, until: Option<Instant>) -> BenchRow {
    let (mut wrapped, mut direct, mut calls) = (0f64, 0f64, 0u64);
    let mut i = 0u64;
    let (mut reps, mut slowest) = (0u32, Duration::ZERO);
    let more_time = |slowest: Duration| until.is_some_and(|u| Instant::now() + slowest * 2 < u);
    while reps < opts.repetitions.max(1) || more_time(slowest) {
        let rep_start = Instant::now();
        let (mut w, mut d, mut n) = (Duration::ZERO, Duration::ZERO, 0u64);
        let start = Instant::now();
        while n == 0 || start.elapsed() < opts.min_loop {
            // alternate which side goes first to cancel ordering effects
            if i % 2 == 0 {
                w += time(&mut case.wrapped, i);
                d += time(&mut case.direct, i);
            } else {
                d += time(&mut case.direct, i);
                w += time(&mut case.wrapped, i);
            }
            n += 1;
            i += 1;
        }
        wrapped += w.as_secs_f64() * 1e6 / n as f64;
        direct += d.as_secs_f64() * 1e6 / n as f64;
        calls += n;
        reps += 1;
        slowest = slowest.max(rep_start.elapsed());
    }
    let (wrapped_us, direct_us) = (wrapped / f64::from(reps), direct / f64::from(reps));
    BenchRow {
        op: case.op,
        configuration: case.configuration,
        public_key: case.public_key,
        repetitions: reps,
        calls,
        wrapped_us,
        direct_us,
        overhead_us: wrapped_us - direct_us,
        overhead_pct: (wrapped_us - direct_us) / direct_us * 100.0,
    }
}

fn random(n: usize) -> Vec<u8> {
    let mut v = vec![0u8; n];
    OsRng.fill_bytes(&mut v);
    v
}

fn shared_cases(crypto: &'static Crypto) -> Vec<Case> {
    type Enc = cbc::Encryptor<aes::Aes256>;
    type Dec = cbc::Decryptor<aes::Aes256>;
    let cbc_opts = KeygenOptions::default().size(256).mode("CBC");
    let aes_key = crypto
        .keygen_with("AES", &cbc_opts)
        .unwrap()
        .into_shared()
        .unwrap();
    let material = aes_key.material().to_vec();
    let msg = random(SHARED_MSG);

    let env = crypto.encrypt_raw(&msg, &aes_key).unwrap();
    let iv = env.header().to_vec();
    let direct_ct = Enc::new_from_slices(&material, &iv)
        .unwrap()
        .encrypt_padded_vec_mut::<Pkcs7>(&msg);

    let hmac_key = crypto
        .keygen_with(
            "HMAC",
            &KeygenOptions::default().size(256).sign_hash("SHA512"),
        )
        .unwrap()
        .into_shared()
        .unwrap();
    let hmac_raw = hmac_key.material().to_vec();
    let sig = crypto.sign_raw(&msg, &hmac_key).unwrap();
    let tag = sig.bytes().to_vec();

    let m = msg.clone();
    let (k1, k2, k3, k4) = (aes_key.clone(), aes_key, hmac_key.clone(), hmac_key);
    let (mat1, mat2, h1, h2) = (material.clone(), material, hmac_raw.clone(), hmac_raw);
    let (m1, m2, m3, m4) = (m.clone(), m.clone(), m.clone(), m);
    vec![
        Case {
            op: Op::Keygen,
            configuration: "AES-256-CBC-PKCS7",
            public_key: false,
            extendable: false,
            wrapped: Box::new(move |_| {
                std::hint::black_box(crypto.keygen_with("AES", &cbc_opts).unwrap());
            }),
            direct: Box::new(|_| {
                std::hint::black_box(random(32));
            }),
        },
        Case {
            op: Op::Encrypt,
            configuration: "AES-256-CBC-PKCS7",
            public_key: false,
            extendable: false,
            wrapped: Box::new(move |_| {
                std::hint::black_box(crypto.encrypt_raw(&msg, &k1).unwrap());
            }),
            direct: Box::new(move |_| {
                let iv = random(16);
                std::hint::black_box(
                    Enc::new_from_slices(&mat1, &iv)
                        .unwrap()
                        .encrypt_padded_vec_mut::<Pkcs7>(&m1),
                );
            }),
        },
        Case {
            op: Op::Decrypt,
            configuration: "AES-256-CBC-PKCS7",
            public_key: false,
            extendable: false,
            wrapped: Box::new(move |_| {
                std::hint::black_box(crypto.decrypt_raw(&env, &k2).unwrap());
            }),
            direct: Box::new(move |_| {
                let dec = Dec::new_from_slices(&mat2, &iv).unwrap();
                std::hint::black_box(dec.decrypt_padded_vec_mut::<Pkcs7>(&direct_ct).unwrap());
            }),
        },
        Case {
            op: Op::Sign,
            configuration: "HMAC-256-SHA512",
            public_key: false,
            extendable: false,
            wrapped: Box::new(move |_| {
                std::hint::black_box(crypto.sign_raw(&m2, &k3).unwrap());
            }),
            direct: Box::new(move |_| {
                let mut mac = <Hmac<Sha512> as Mac>::new_from_slice(&h1).unwrap();
                mac.update(&m3);
                std::hint::black_box(mac.finalize().into_bytes());
            }),
        },
        Case {
            op: Op::Verify,
            configuration: "HMAC-256-SHA512",
            public_key: false,
            extendable: false,
            wrapped: {
                let m = m4.clone();
                Box::new(move |_| {
                    assert!(crypto.verify_raw(&m, &sig, &k4).unwrap());
                })
            },
            direct: Box::new(move |_| {
                let mut mac = <Hmac<Sha512> as Mac>::new_from_slice(&h2).unwrap();
                mac.update(&m4);
                assert!(mac.verify_slice(&tag).is_ok());
            }),
        },
    ]
}

fn rsa_cases(crypto: &'static Crypto) -> Vec<Case> {
    let pair = crypto.keygen_pair("RSA").unwrap();
    let (sk, pk): (KeyEnvelope, KeyEnvelope) = (pair.private_key, pair.public_key);
    let raw_sk = RsaPrivateKey::from_pkcs1_der(sk.material()).unwrap();
    let raw_pk = RsaPublicKey::from(&raw_sk);
    let msg = random(RSA_MSG);

    let env = crypto.encrypt_raw(&msg, &pk).unwrap();
    let direct_ct = raw_pk
        .encrypt(&mut OsRng, Oaep::new::<Sha256>(), &msg)
        .unwrap();
    let sig = crypto.sign_raw(&msg, &sk).unwrap();
    let direct_sig = raw_sk
        .sign(Pkcs1v15Sign::new::<Sha256>(), &Sha256::digest(&msg))
        .unwrap();

    let scope = crypto.scope_arc();
    let (sk2, sk3, pk1, pk2) = (sk.clone(), sk, pk.clone(), pk);
    let (rsk2, rsk3, rpk1, rpk2) = (raw_sk.clone(), raw_sk, raw_pk.clone(), raw_pk);
    let (m1, m2, m3, m4, m5) = (msg.clone(), msg.clone(), msg.clone(), msg.clone(), msg);
    vec![
        Case {
            op: Op::Keygen,
            configuration: "RSA-2048",
            public_key: true,
            extendable: true,
            // both sides draw from the same seeded stream, so they search
            // the same primes and only the wrapper's work differs
            wrapped: Box::new(move |i| {
                let c = Crypto::with_entropy(scope.clone(), Entropy::seeded(i));
                std::hint::black_box(c.keygen_pair("RSA").unwrap());
            }),
            direct: Box::new(|i| {
                let mut rng = ChaCha20Rng::seed_from_u64(i);
                let k = RsaPrivateKey::new(&mut rng, 2048).unwrap();
                std::hint::black_box(RsaPublicKey::from(&k));
            }),
        },
        Case {
            op: Op::Encrypt,
            configuration: "RSA-2048-OAEP",
            public_key: true,
            extendable: false,
            wrapped: Box::new(move |_| {
                std::hint::black_box(crypto.encrypt_raw(&m1, &pk1).unwrap());
            }),
            direct: Box::new(move |_| {
                std::hint::black_box(
                    rpk1.encrypt(&mut OsRng, Oaep::new::<Sha256>(), &m2)
                        .unwrap(),
                );
            }),
        },
        Case {
            op: Op::Decrypt,
            configuration: "RSA-2048-OAEP",
            public_key: true,
            extendable: false,
            wrapped: Box::new(move |_| {
                std::hint::black_box(crypto.decrypt_raw(&env, &sk2).unwrap());
            }),
            direct: Box::new(move |_| {
                std::hint::black_box(rsk2.decrypt(Oaep::new::<Sha256>(), &direct_ct).unwrap());
            }),
        },
        Case {
            op: Op::Sign,
            configuration: "RSA-2048-PKCS1",
            public_key: true,
            extendable: false,
            wrapped: Box::new(move |_| {
                std::hint::black_box(crypto.sign_raw(&m3, &sk3).unwrap());
            }),
            direct: Box::new(move |_| {
                std::hint::black_box(
                    rsk3.sign(Pkcs1v15Sign::new::<Sha256>(), &Sha256::digest(&m4))
                        .unwrap(),
                );
            }),
        },
        Case {
            op: Op::Verify,
            configuration: "RSA-2048-PKCS1",
            public_key: true,
            extendable: false,
            wrapped: {
                let m = m5.clone();
                Box::new(move |_| {
                    assert!(crypto.verify_raw(&m, &sig, &pk2).unwrap());
                })
            },
            direct: Box::new(move |_| {
                rpk2.verify(
                    Pkcs1v15Sign::new::<Sha256>(),
                    &Sha256::digest(&m5),
                    &direct_sig,
                )
                .unwrap();
            }),
        },
    ]
}

/// Runs all ten pairs and returns them in table order. `progress` is
/// called as each row completes.
pub fn run_bench(opts: &BenchOptions, mut progress: impl FnMut(&BenchRow)) -> Vec<BenchRow> {
    let started = Instant::now();
    // the closures outlive this frame only inside it; leaking one small
    // value keeps their signatures simple
    let crypto: &'static Crypto = Box::leak(Box::new(Crypto::with_scope(ConfigScope::root())));
    let mut cases = shared_cases(crypto);
    cases.extend(rsa_cases(crypto));
    let mut order: Vec<usize> = (0..cases.len()).collect();
    order.sort_by_key(|&i| cases[i].extendable);
    let mut rows: Vec<Option<BenchRow>> = vec![None; cases.len()];
    for i in order {
        let until = if cases[i].extendable {
            opts.budget.map(|b| started + b)
        } else {
            None
        };
        let row = measure(&mut cases[i], opts, until);
        progress(&row);
        rows[i] = Some(row);
    }
    rows.into_iter()
        .map(|r| r.expect("every case measured"))
        .collect()
}

pub fn render_table(rows: &[BenchRow]) -> String {
    let mut out = format!(
        "{:<8} {:<18} {:>12} {:>12} {:>12} {:>9} {:>5} {:>10}  {}\n",
        "op",
        "configuration",
        "wrapped_us",
        "direct_us",
        "overhead_us",
        "overhead%",
        "reps",
        "calls",
        "limit"
    );
    for r in rows {
        out.push_str(&render_row(r));
    }
    out
}

pub fn render_row(r: &BenchRow) -> String {
    format!(
        "{:<8} {:<18} {:>12.3} {:>12.3} {:>12.3} {:>9.3} {:>5} {:>10}  {} {}\n",
        format!("{:?}", r.op).to_lowercase(),
        r.configuration,
        r.wrapped_us,
        r.direct_us,
        r.overhead_us,
        r.overhead_pct,
        r.repetitions,
        r.calls,
        r.limit(),
        if r.within_limit() { "ok" } else { "EXCEEDED" }
    )
}
