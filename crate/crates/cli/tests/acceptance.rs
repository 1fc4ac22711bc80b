//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use secalgo::keys::DhGroup;
use secalgo::labels::{HashAlg, Mode, SignMode};
use secalgo::primitives::{aead_open, aead_seal, hmac, pad_pkcs7, unpad_pkcs7};
use secalgo::{MisuseClass, PlainValue};
use secalgo_cli::bench::{run_bench, BenchOptions};
use secalgo_harness::{
    measure, CallCounts, Intercept, MeasureOptions, Message, Protocol, RunOptions,
};
use serde::Deserialize;
use support::{golden, lattice, misuse};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn round_trip_lattice() -> Outcome {
    let started = Instant::now();
    let combos = lattice::combinations().len();
    let n = lattice::run(200)?;
    let took = started.elapsed();
    ensure(n == combos, || format!("{n} of {combos} combinations ran"))?;
    ensure(took < Duration::from_secs(60), || {
        format!("took {took:.1?}")
    })?;
    Ok(format!("{n} combinations x 200 values in {took:.1?}"))
}

/// Drives the command-line tool, which is one more entry point for misuse.
struct Cli {
    dir: tempfile::TempDir,
}

impl Cli {
    fn new() -> Self {
        Cli {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_str().unwrap().to_owned()
    }

    fn run(&self, env: Option<&str>, args: &[&str]) -> (i32, String) {
        let mut c = Command::new(env!("CARGO_BIN_EXE_secalgo"));
        match env {
            Some(path) => c.env("SECALGO_CONFIG", path),
            None => c.env_remove("SECALGO_CONFIG"),
        };
        let o = c.args(args).output().expect("secalgo runs");
        (
            o.status.code().unwrap_or(-1),
            String::from_utf8_lossy(&o.stderr).into_owned(),
        )
    }

    fn keygen(&self, name: &str, extra: &[&str]) -> String {
        let out = self.path(name);
        let mut args = vec!["keygen", "--out", &out];
        args.extend_from_slice(extra);
        let (code, err) = self.run(None, &args);
        assert_eq!(code, 0, "{err}");
        out
    }

    fn tamper(&self, key: &str, field: &str, value: serde_json::Value) -> String {
        let mut v: serde_json::Value = serde_json::from_slice(&fs::read(key).unwrap()).unwrap();
        v[field] = value;
        let out = format!("{key}.{field}");
        fs::write(&out, serde_json::to_vec(&v).unwrap()).unwrap();
        out
    }
}

fn cli_misuse_rows() -> Vec<(MisuseClass, String, Result<(), String>)> {
    use MisuseClass::*;
    let cli = Cli::new();
    let out = cli.path("k.json");
    let input = cli.path("in");
    fs::write(&input, b"payload").unwrap();
    let mut rows = Vec::new();
    let mut expect = |class: MisuseClass, entry: String, (code, err): (i32, String)| {
        let tag = format!("error[{}]", class.code());
        let r = if code == 3 && err.contains(&tag) {
            Ok(())
        } else {
            Err(format!("exit {code}: {}", err.trim()))
        };
        rows.push((class, entry, r));
    };

    let keygen_args: [(MisuseClass, &[&str]); 5] = [
        (M1K, &["--type", "AES", "--size", "64"]),
        (M1S, &["--type", "AES", "--mode", "ECB"]),
        (M3S, &["--type", "DES"]),
        (M1A, &["--type", "RSA", "--mode", "PKCS1"]),
        (M1H, &["--type", "HMAC", "--hash", "SHA1"]),
    ];
    for (class, extra) in keygen_args {
        let mut args = vec!["keygen", "--out", &out];
        args.extend_from_slice(extra);
        expect(
            class,
            format!("cli keygen {}", extra.join(" ")),
            cli.run(None, &args),
        );
    }

    let bindings = [
        (M1K, "key_size_shared", "64", "AES"),
        (M1K, "key_size_public", "1024", "RSA"),
        (M1S, "block_cipher_mode", "ECB", "AES"),
        (M3S, "key_type_shared", "DES", "shared"),
        (M1H, "sign_hash", "MD5", "HMAC"),
    ];
    for (class, item, value, kind) in bindings {
        let set = format!("{item}={value}");
        let args = ["--set", &set, "keygen", "--type", kind, "--out", &out];
        expect(class, format!("cli --set {set}"), cli.run(None, &args));

        let file = cli.path(&format!("{item}.conf"));
        fs::write(&file, format!("{item} = {value}\n")).unwrap();
        let args = ["--config", &file, "keygen", "--type", kind, "--out", &out];
        expect(class, format!("cli --config {set}"), cli.run(None, &args));
        let args = ["keygen", "--type", kind, "--out", &out];
        expect(
            class,
            format!("cli SECALGO_CONFIG {set}"),
            cli.run(Some(&file), &args),
        );
    }

    let aes = cli.keygen("aes.json", &["--type", "AES"]);
    let hmac_key = cli.keygen("hmac.json", &["--type", "HMAC"]);
    let rsa = cli.keygen("rsa.json", &["--type", "RSA"]);
    let rsa_pub = format!("{rsa}.pub");
    let tampered = [
        (M1K, &aes, "size", serde_json::json!(64), "encrypt"),
        (M1S, &aes, "mode", serde_json::json!("ECB"), "encrypt"),
        (M3S, &aes, "algorithm", serde_json::json!("DES"), "encrypt"),
        (M1A, &rsa_pub, "mode", serde_json::json!("PKCS1"), "encrypt"),
        (
            M1H,
            &hmac_key,
            "sign_hash",
            serde_json::json!("MD5"),
            "sign",
        ),
    ];
    for (class, key, field, value, op) in tampered {
        let bad = cli.tamper(key, field, value.clone());
        let ct = cli.path("ct");
        let args = [op, "--key", &bad, "--in", &input, "--out", &ct];
        expect(
            class,
            format!("cli {op} with key {field}={value}"),
            cli.run(None, &args),
        );
    }
    rows
}

fn misuse_matrix() -> Outcome {
    let mut rows: Vec<(MisuseClass, String, Result<(), String>)> = misuse::matrix()
        .into_iter()
        .map(|r| (r.class, format!("library {}", r.entry), r.outcome))
        .collect();
    rows.extend(cli_misuse_rows());
    let failures: Vec<String> = rows
        .iter()
        .filter_map(|(c, e, r)| r.as_ref().err().map(|err| format!("{c} via {e}: {err}")))
        .collect();
    ensure(failures.is_empty(), || failures.join("; "))?;
    use MisuseClass::*;
    for class in [M1K, M1S, M3S, M1A, M1H] {
        let entries: Vec<&str> = rows
            .iter()
            .filter(|r| r.0 == class)
            .map(|r| r.1.as_str())
            .collect();
        for needed in [
            "library keygen",
            "library import",
            "cli keygen",
            "cli encrypt",
            "cli sign",
        ] {
            // M1H is only reachable through signing keys, the rest through encryption keys
            let relevant = match needed {
                "cli encrypt" => class != M1H,
                "cli sign" => class == M1H,
                _ => true,
            };
            if relevant {
                ensure(entries.iter().any(|e| e.starts_with(needed)), || {
                    format!("{class} has no `{needed}` row")
                })?;
            }
        }
        if class != M1A {
            for needed in [
                "library config",
                "cli --set",
                "cli --config",
                "cli SECALGO_CONFIG",
            ] {
                ensure(entries.iter().any(|e| e.starts_with(needed)), || {
                    format!("{class} has no `{needed}` row")
                })?;
            }
        }
    }
    misuse::distinct_keys(100)?;
    misuse::distinct_headers(1000)?;
    Ok(format!(
        "{} rejections across library and CLI; 100 distinct keys; 1000 distinct headers",
        rows.len()
    ))
}

fn call_counters() -> Outcome {
    let expected = [
        (Protocol::NsSk, CallCounts::new(3, 5, 5, 0, 0), 13),
        (Protocol::NsPk, CallCounts::new(3, 3, 3, 2, 2), 13),
        (Protocol::Ds, CallCounts::new(4, 1, 1, 3, 5), 14),
        (Protocol::DsSimp, CallCounts::new(3, 2, 2, 1, 1), 9),
        (Protocol::Sdh, CallCounts::new(5, 0, 0, 2, 2), 9),
    ];
    let mut seen = Vec::new();
    for (p, counts, total) in expected {
        let trace = p.run(&RunOptions::seeded(1)).map_err(|e| e.to_string())?;
        ensure(trace.counts == counts && trace.total_calls == total, || {
            format!(
                "{p}: got {:?} ({}), want {counts:?} ({total})",
                trace.counts, trace.total_calls
            )
        })?;
        let c = trace.counts;
        seen.push(format!(
            "{p} {}/{}/{}/{}/{}",
            c.keygen, c.encrypt, c.decrypt, c.sign, c.verify
        ));
    }
    Ok(seen.join(", "))
}

fn ds_simp_flow() -> Outcome {
    let mut counts = Vec::new();
    for mode in [SignMode::Combined, SignMode::Detached] {
        let opts = RunOptions::seeded(3).sign_mode(mode);
        let trace = Protocol::DsSimp
            .run(&opts)
            .map_err(|e| format!("{mode}: {e}"))?;
        ensure(
            trace.output("A") == Some(&PlainValue::from("secret")),
            || format!("{mode}: A output {:?}", trace.output("A")),
        )?;
        counts.push(trace.counts);

        let flipped = Arc::new(AtomicBool::new(false));
        let seen = Arc::clone(&flipped);
        let tamper = Arc::new(move |mut m: Message| {
            if m.tag == 1 {
                if let PlainValue::Bytes(b) = &mut m.payload {
                    let i = b.len() / 2;
                    b[i] ^= 1;
                    seen.store(true, Ordering::SeqCst);
                }
            }
            Intercept::Deliver(m)
        });
        let failure = match Protocol::DsSimp.run(&opts.clone().interceptor(tamper)) {
            Ok(_) => return Err(format!("{mode}: tampered run completed")),
            Err(f) => f,
        };
        ensure(flipped.load(Ordering::SeqCst), || {
            format!("{mode}: message 1 was not tampered")
        })?;
        ensure(failure.trace.messages.iter().all(|m| m.tag != 2), || {
            format!("{mode}: message 2 was sent")
        })?;
        ensure(failure.trace.output("A").is_none(), || {
            format!("{mode}: A produced output")
        })?;
    }
    ensure(counts[0] == counts[1], || {
        format!("counters differ: {:?} vs {:?}", counts[0], counts[1])
    })?;
    Ok(
        "A outputs \"secret\" in combined and detached modes; tampered runs stop before message 2"
            .into(),
    )
}

fn padding() -> Outcome {
    for len in 0..=64usize {
        let data: Vec<u8> = (0..len).map(|i| (i * 7) as u8).collect();
        let padded = pad_pkcs7(&data, 16);
        let n = 16 - len % 16;
        ensure(padded.len() == len + n, || {
            format!("len {len}: padded to {}", padded.len())
        })?;
        ensure(padded[len..].iter().all(|&b| usize::from(b) == n), || {
            format!("len {len}: pad bytes")
        })?;
        ensure(
            unpad_pkcs7(&padded, 16).as_deref() == Some(&data[..]),
            || format!("len {len}: unpad"),
        )?;
    }
    Ok("lengths 0..=64 at block 16".into())
}

#[derive(Deserialize)]
struct HmacCase {
    case: u32,
    key: String,
    data: String,
    sha256: String,
    sha512: String,
}

#[derive(Deserialize)]
struct GcmCase {
    name: String,
    key: String,
    iv: String,
    aad: String,
    pt: String,
    ct: String,
    tag: String,
}

fn unhex(s: &str) -> Vec<u8> {
    hex::decode(s).expect("vector hex")
}

fn pow_by_repeated_multiplication(g: u64, x: u64, p: u64) -> u64 {
    (0..x).fold(1, |acc, _| acc * g % p)
}

fn external_vectors() -> Outcome {
    let hmacs: Vec<HmacCase> =
        serde_json::from_str(include_str!("../../core/tests/data/hmac_rfc4231.json"))
            .map_err(|e| e.to_string())?;
    for c in &hmacs {
        let (k, d) = (unhex(&c.key), unhex(&c.data));
        ensure(
            hex::encode(hmac(HashAlg::Sha256, &k, &d)) == c.sha256,
            || format!("HMAC-SHA256 case {}", c.case),
        )?;
        ensure(
            hex::encode(hmac(HashAlg::Sha512, &k, &d)) == c.sha512,
            || format!("HMAC-SHA512 case {}", c.case),
        )?;
    }
    let gcms: Vec<GcmCase> =
        serde_json::from_str(include_str!("../../core/tests/data/aes_gcm_nist.json"))
            .map_err(|e| e.to_string())?;
    ensure(gcms.len() >= 2, || "fewer than two GCM vectors".into())?;
    for c in &gcms {
        let (key, iv, aad) = (unhex(&c.key), unhex(&c.iv), unhex(&c.aad));
        let (ct, tag) =
            aead_seal(Mode::Gcm, &key, &iv, &aad, &unhex(&c.pt)).map_err(|e| e.to_string())?;
        ensure(
            hex::encode(&ct) == c.ct && hex::encode(&tag) == c.tag,
            || format!("GCM {}", c.name),
        )?;
        let pt = aead_open(Mode::Gcm, &key, &iv, &aad, &ct, &tag).map_err(|e| e.to_string())?;
        ensure(hex::encode(pt) == c.pt, || format!("GCM open {}", c.name))?;
    }
    let group = DhGroup::custom("p23", BigUint::from(23u8), BigUint::from(5u8));
    let mut pairs = 0;
    for a in 2..=21u64 {
        let ya = pow_by_repeated_multiplication(5, a, 23);
        ensure(
            group.public_value(&BigUint::from(a)) == BigUint::from(ya),
            || format!("5^{a} mod 23"),
        )?;
        for b in 2..=21u64 {
            let yb = pow_by_repeated_multiplication(5, b, 23);
            let want = pow_by_repeated_multiplication(yb, a, 23);
            ensure(want == pow_by_repeated_multiplication(ya, b, 23), || {
                format!("oracle disagrees for {a},{b}")
            })?;
            if (2..=21).contains(&yb) {
                let got = group
                    .shared_secret(&BigUint::from(a), &BigUint::from(yb))
                    .map_err(|e| e.to_string())?;
                ensure(got == vec![want as u8], || {
                    format!("shared secret for {a},{b}")
                })?;
                pairs += 1;
            }
        }
    }
    Ok(format!(
        "{} HMAC cases x 2 hashes, {} GCM vectors, {pairs} DH exchanges in the p=23 group",
        hmacs.len(),
        gcms.len()
    ))
}

fn overhead() -> Outcome {
    let started = Instant::now();
    let rows = run_bench(&BenchOptions::default(), |r| {
        println!(
            "    {:<7} {:<18} wrapped {:>12.3} us  direct {:>12.3} us  overhead {:>10.3} us {:>7.3}%  {:>3} reps  ({})",
            format!("{:?}", r.op).to_lowercase(),
            r.configuration,
            r.wrapped_us,
            r.direct_us,
            r.overhead_us,
            r.overhead_pct,
            r.repetitions,
            if r.within_limit() { "ok" } else { "exceeded" }
        );
    });
    let took = started.elapsed();
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !r.within_limit())
        .map(|r| {
            format!(
                "{:?} {} {:.3} us / {:.3}% (limit {})",
                r.op,
                r.configuration,
                r.overhead_us,
                r.overhead_pct,
                r.limit()
            )
        })
        .collect();
    ensure(rows.len() == 10, || format!("{} rows", rows.len()))?;
    ensure(bad.is_empty(), || bad.join("; "))?;
    ensure(took < Duration::from_secs(600), || {
        format!("bench took {took:.0?}")
    })?;
    Ok(format!("10 operations within limits in {took:.0?}"))
}

fn timing_order() -> Outcome {
    let opts = RunOptions::default();
    let runs = MeasureOptions {
        repetitions: 20,
        min_time: Duration::from_secs(1),
    };
    let mut lib = std::collections::BTreeMap::new();
    let mut report = Vec::new();
    for p in Protocol::ALL {
        let m = measure(p, &opts, runs).map_err(|e| e.to_string())?;
        ensure(m.library_time <= m.protocol_time, || {
            format!(
                "{p}: library {:.1} us > protocol {:.1} us",
                m.library_time_us, m.protocol_time_us
            )
        })?;
        report.push(format!(
            "{p} {:.0}/{:.0} us",
            m.library_time_us, m.protocol_time_us
        ));
        lib.insert(p, m.library_time);
    }
    for p in [Protocol::NsPk, Protocol::Ds] {
        ensure(lib[&p] > lib[&Protocol::NsSk], || {
            format!("{p} library time not above ns-sk")
        })?;
    }
    Ok(format!("library/protocol: {}", report.join(", ")))
}

fn golden_envelopes() -> Outcome {
    let n = golden::check_all()?;
    Ok(format!(
        "{n} committed envelopes decrypt and match the layout"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("round-trip lattice", round_trip_lattice),
        ("misuse matrix", misuse_matrix),
        ("protocol call counters", call_counters),
        ("simplified Denning-Sacco flow", ds_simp_flow),
        ("PKCS#7 padding", padding),
        ("external test vectors", external_vectors),
        ("wrapper overhead", overhead),
        ("library vs protocol time", timing_order),
        ("golden envelopes", golden_envelopes),
    ];
    // the filter argument from `cargo test <name>` selects criteria by name
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = started.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{took:.1?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail}) [{took:.1?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
