//! The `secalgo` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 cryptographic or verification
//! failure, 3 misuse rejected by the library.

pub mod bench;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use secalgo::config::{load_config_file_under, ConfigItem, ConfigValue};
use secalgo::keys::{read_key_file, write_key_file};
use secalgo::labels::SignMode;
use secalgo::{
    CipherEnvelope, ConfigScope, Crypto, Error, GeneratedKey, KeyEnvelope, KeygenOptions,
    PlainValue, Signature, SignedPayload,
};
use secalgo_harness::{measure, MeasureOptions, Protocol, RunOptions, Schedule};

use crate::bench::{render_row, render_table, run_bench, BenchOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_MISUSE: i32 = 3;

/// Lowest-precedence config file, read when set.
pub const CONFIG_ENV: &str = "SECALGO_CONFIG";

const DECRYPT_FAILED: &str = "decryption failed";

#[derive(Parser, Debug)]
#[command(
    name = "secalgo",
    version,
    about = "Misuse-resistant encryption, signing and protocol runs"
)]
struct Cli {
    /// Config file (overrides the file named by SECALGO_CONFIG).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Bind one config item, e.g. `--set block_cipher_mode=CBC`. Repeatable.
    #[arg(long = "set", global = true, value_name = "ITEM=VALUE")]
    set: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a key file. Key pairs also write the public half to FILE.pub.
    Keygen(KeygenArgs),
    /// Encrypt a file.
    Encrypt(IoArgs),
    /// Decrypt a file produced by `encrypt`.
    Decrypt(IoArgs),
    /// Sign a file. Detached mode writes the signature; combined mode writes
    /// the file bundled with it.
    Sign(IoArgs),
    /// Verify a signature. Pass --sig for detached signatures.
    Verify(VerifyArgs),
    /// List each misuse type and where it is stopped.
    Audit {
        #[arg(long)]
        json: bool,
    },
    /// Run one of the built-in protocols and print its trace.
    RunProtocol(RunProtocolArgs),
    /// Compare wrapped calls against direct calls to the underlying crates.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct KeygenArgs {
    /// Algorithm name, or `shared` / `public` for the configured default.
    #[arg(long = "type", value_name = "TYPE")]
    kind: String,
    #[arg(long)]
    size: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    hash: Option<String>,
    #[arg(long)]
    sign_mode: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct IoArgs {
    #[arg(long)]
    key: PathBuf,
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    key: PathBuf,
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Detached signature file.
    #[arg(long)]
    sig: Option<PathBuf>,
    /// For combined signatures, where to write the verified content.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunProtocolArgs {
    /// ns-sk, ns-pk, ds, ds-simp or sdh.
    name: String,
    #[arg(long, default_value_t = 1)]
    reps: u32,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: bool,
    /// Variant of ds-simp: detached or combined.
    #[arg(long)]
    sign_mode: Option<String>,
    /// Let roles run freely instead of taking turns.
    #[arg(long)]
    concurrent: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 50)]
    reps: u32,
    /// Minimum length of each measurement loop.
    #[arg(long, default_value_t = 1000)]
    min_time_ms: u64,
    /// Keep adding RSA keygen repetitions until the whole run reaches this
    /// many seconds.
    #[arg(long)]
    budget_s: Option<u64>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
    Failed(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_FAILURE,
            CliError::Lib(e) if e.misuse_class().is_some() => EXIT_MISUSE,
            CliError::Lib(e) => match e {
                Error::UnknownItem(_)
                | Error::DisallowedValue { .. }
                | Error::Parse(_)
                | Error::UnknownAlgorithm(_)
                | Error::UnknownGroup(_)
                | Error::Io(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
            CliError::Lib(e) => match e.misuse_class() {
                Some(class) => write!(f, "[{class}]: {e}"),
                None => write!(f, "{e}"),
            },
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

type CliResult<T = ()> = Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let code = e.code();
            if code == EXIT_MISUSE {
                let _ = writeln!(err, "error{e}");
            } else {
                let _ = writeln!(err, "error: {e}");
            }
            code
        }
    }
}

/// Builds the effective scope: defaults, then the SECALGO_CONFIG file, then
/// `--config`, then each `--set`.
fn build_scope(config: Option<&Path>, sets: &[String]) -> CliResult<ConfigScope> {
    let mut scope = ConfigScope::root();
    if let Some(env) = std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()) {
        scope = load_file(Path::new(&env), scope)?;
    }
    if let Some(path) = config {
        scope = load_file(path, scope)?;
    }
    if !sets.is_empty() {
        let mut inner = scope.child();
        for s in sets {
            let (item, value) = s
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects ITEM=VALUE, got `{s}`")))?;
            inner = inner.set(item, value)?;
        }
        scope = inner;
    }
    Ok(scope)
}

fn load_file(path: &Path, parent: ConfigScope) -> CliResult<ConfigScope> {
    load_config_file_under(path, Some(Arc::new(parent))).map_err(|e| match e {
        Error::Io(io) => io_error(path, io),
        other => CliError::Lib(other),
    })
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| io_error(path, e))
}

fn write(path: &Path, data: &[u8]) -> CliResult {
    std::fs::write(path, data).map_err(|e| io_error(path, e))
}

fn read_key(path: &Path) -> CliResult<KeyEnvelope> {
    read_key_file(path).map_err(|e| match e {
        Error::Io(io) => io_error(path, io),
        other => CliError::Lib(other),
    })
}

fn write_key(path: &Path, key: &KeyEnvelope) -> CliResult {
    write_key_file(path, key).map_err(|e| match e {
        Error::Io(io) => io_error(path, io),
        other => CliError::Lib(other),
    })
}

fn public_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".pub");
    PathBuf::from(s)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CliResult {
    let scope = build_scope(cli.config.as_deref(), &cli.set)?;
    let crypto = Crypto::with_scope(scope);
    let say = |out: &mut dyn Write, text: &str| {
        out.write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("stdout: {e}")))
    };
    match cli.command {
        Command::Keygen(a) => {
            let opts = KeygenOptions {
                size: a.size,
                mode: a.mode,
                sign_hash: a.hash,
                sign_mode: a.sign_mode,
            };
            match crypto.keygen_with(&a.kind, &opts)? {
                GeneratedKey::Shared(k) => {
                    write_key(&a.out, &k)?;
                    say(out, &format!("wrote {}\n", a.out.display()))
                }
                GeneratedKey::Pair(p) => {
                    let pub_path = public_path(&a.out);
                    write_key(&a.out, &p.private_key)?;
                    write_key(&pub_path, &p.public_key)?;
                    say(
                        out,
                        &format!("wrote {} and {}\n", a.out.display(), pub_path.display()),
                    )
                }
            }
        }
        Command::Encrypt(a) => {
            let key = read_key(&a.key)?;
            let data = read(&a.input)?;
            let env = crypto.encrypt_raw(&data, &key)?;
            write(&a.out, &env.to_bytes())
        }
        Command::Decrypt(a) => {
            let key = read_key(&a.key)?;
            let data = read(&a.input)?;
            // every cause of failure gets the same message
            let plain = CipherEnvelope::from_bytes(&data)
                .and_then(|env| crypto.decrypt_raw(&env, &key))
                .map_err(|e| match e.misuse_class() {
                    Some(_) => CliError::Lib(e),
                    None => CliError::Failed(DECRYPT_FAILED.into()),
                })?;
            write(&a.out, &plain)
        }
        Command::Sign(a) => {
            let key = read_key(&a.key)?;
            let data = read(&a.input)?;
            let mode = match crypto.scope().lookup(ConfigItem::SignMode) {
                Some(ConfigValue::SignMode(m)) => m,
                _ => key.sign_mode(),
            };
            let signature = crypto.sign_raw(&data, &key)?;
            let bytes = match mode {
                SignMode::Detached => signature.to_bytes(),
                SignMode::Combined => SignedPayload {
                    text: PlainValue::Bytes(data),
                    signature,
                }
                .encode()?,
            };
            write(&a.out, &bytes)
        }
        Command::Verify(a) => {
            let key = read_key(&a.key)?;
            let data = read(&a.input)?;
            let bad = || CliError::Failed("verification failed".into());
            match a.sig {
                Some(sig_path) => {
                    let sig = Signature::from_bytes(&read(&sig_path)?).map_err(|_| bad())?;
                    if !crypto.verify_raw(&data, &sig, &key)? {
                        return Err(bad());
                    }
                }
                None => {
                    let payload = SignedPayload::decode(&data).map_err(|_| bad())?;
                    let text = payload.text.as_bytes().ok_or_else(bad)?;
                    if !crypto.verify_raw(text, &payload.signature, &key)? {
                        return Err(bad());
                    }
                    if let Some(path) = &a.out {
                        write(path, text)?;
                    }
                }
            }
            say(out, "verified\n")
        }
        Command::Audit { json } => {
            let rows = secalgo::guard::audit_report();
            if json {
                let text = serde_json::to_string_pretty(&rows).expect("audit rows serialize");
                return say(out, &format!("{text}\n"));
            }
            let mut text = format!(
                "{:<5} {:<40} {:<30} {}\n",
                "class", "misuse", "enforcement", "where"
            );
            for r in rows {
                text.push_str(&format!(
                    "{:<5} {:<40} {:<30} {}\n",
                    r.class.code(),
                    r.description,
                    r.enforcement.label(),
                    r.point
                ));
            }
            say(out, &text)
        }
        Command::RunProtocol(a) => run_protocol(a, crypto.scope_arc(), out),
        Command::Bench(a) => {
            let opts = BenchOptions {
                min_loop: Duration::from_millis(a.min_time_ms),
                repetitions: a.reps.max(1),
                budget: a.budget_s.map(Duration::from_secs),
            };
            if a.json {
                let rows = run_bench(&opts, |_| {});
                let text = serde_json::to_string_pretty(&rows).expect("bench rows serialize");
                say(out, &format!("{text}\n"))
            } else {
                say(out, &render_table(&[]))?;
                let mut failed = None;
                run_bench(&opts, |row| {
                    if let Err(e) = out
                        .write_all(render_row(row).as_bytes())
                        .and_then(|_| out.flush())
                    {
                        failed.get_or_insert(e);
                    }
                });
                match failed {
                    Some(e) => Err(CliError::Usage(format!("stdout: {e}"))),
                    None => Ok(()),
                }
            }
        }
    }
}

fn run_protocol(a: RunProtocolArgs, scope: Arc<ConfigScope>, out: &mut dyn Write) -> CliResult {
    let protocol: Protocol = a
        .name
        .parse()
        .map_err(|e| CliError::Usage(format!("{e}")))?;
    let mut opts = RunOptions::default().scope((*scope).clone());
    if let Some(seed) = a.seed {
        opts = opts.seed(seed);
    }
    if a.concurrent {
        opts = opts.schedule(Schedule::Concurrent);
    }
    if let Some(m) = &a.sign_mode {
        let mode = SignMode::lookup(m)
            .ok_or_else(|| CliError::Usage(format!("unknown sign mode `{m}`")))?;
        opts = opts.sign_mode(mode);
    }
    let trace = protocol
        .run(&opts)
        .map_err(|f| CliError::Failed(f.to_string()))?;
    let measurement = if a.reps > 1 {
        Some(
            measure(protocol, &opts, MeasureOptions::runs(a.reps))
                .map_err(|f| CliError::Failed(f.to_string()))?,
        )
    } else {
        None
    };
    let text = if a.json {
        match &measurement {
            None => trace.to_json(),
            Some(m) => serde_json::to_string_pretty(
                &serde_json::json!({ "trace": &trace, "measurement": m }),
            )
            .expect("trace serializes"),
        }
    } else {
        let mut t = format!("{} ({})\n", protocol.name(), protocol.description());
        for m in &trace.messages {
            t.push_str(&format!(
                "  {:>2}. {} -> {} tag {} {} bytes {}\n",
                m.index, m.from, m.to, m.tag, m.bytes, m.sha256
            ));
        }
        let c = &trace.counts;
        t.push_str(&format!(
            "calls: keygen {} encrypt {} decrypt {} sign {} verify {} (total {})\n",
            c.keygen, c.encrypt, c.decrypt, c.sign, c.verify, trace.total_calls
        ));
        t.push_str(&format!(
            "time: protocol {:.1} us, library {:.1} us\n",
            trace.protocol_time_us, trace.library_time_us
        ));
        for (role, digest) in &trace.outputs {
            if let Some(d) = digest {
                t.push_str(&format!("output {role}: {d}\n"));
            }
        }
        if let Some(m) = &measurement {
            t.push_str(&format!(
                "mean over {} runs: protocol {:.1} us, library {:.1} us\n",
                m.runs, m.protocol_time_us, m.library_time_us
            ));
        }
        t
    };
    out.write_all(text.as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| CliError::Usage(format!("stdout: {e}")))
}
