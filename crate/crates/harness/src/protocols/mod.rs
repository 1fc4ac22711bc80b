//! The protocols, each a set of roles plus a setup phase run in "main".
//!
//! Setup calls (long-term key pairs, shared keys with the server) are
//! counted but not timed.

mod ds;
mod ds_simp;
mod ns_pk;
mod ns_sk;
mod sdh;

pub mod certificate;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use secalgo::keys::KeygenOptions;
use secalgo::labels::SignMode;
use secalgo::{CipherEnvelope, ConfigScope, KeyEnvelope, KeyPair, PlainValue};

use crate::clock::Clock;
use crate::error::{HarnessError, Result};
use crate::instrument::{Counters, Instrumented};
use crate::runtime::{Interceptor, RunConfig, Runtime, Schedule};
use crate::trace::ProtocolTrace;

pub use certificate::Certificate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Protocol {
    NsSk,
    NsPk,
    Ds,
    DsSimp,
    Sdh,
}

impl Protocol {
    pub const ALL: [Protocol; 5] = [
        Protocol::NsSk,
        Protocol::NsPk,
        Protocol::Ds,
        Protocol::DsSimp,
        Protocol::Sdh,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            Protocol::NsSk => "ns-sk",
            Protocol::NsPk => "ns-pk",
            Protocol::Ds => "ds",
            Protocol::DsSimp => "ds-simp",
            Protocol::Sdh => "sdh",
        }
    }

    pub const fn description(self) -> &'static str {
        match self {
            Protocol::NsSk => "corrected Needham-Schroeder, shared keys",
            Protocol::NsPk => "corrected Needham-Schroeder, public keys",
            Protocol::Ds => "Denning-Sacco key distribution with certificates",
            Protocol::DsSimp => "simplified Denning-Sacco",
            Protocol::Sdh => "signed Diffie-Hellman",
        }
    }

    pub fn run(self, opts: &RunOptions) -> Result<ProtocolTrace, ProtocolFailure> {
        match self {
            Protocol::NsSk => ns_sk::run(opts),
            Protocol::NsPk => ns_pk::run(opts),
            Protocol::Ds => ds::run(opts),
            Protocol::DsSimp => ds_simp::run(opts),
            Protocol::Sdh => sdh::run(opts),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == norm || p.name().replace('-', "") == norm)
            .ok_or_else(|| HarnessError::Protocol(format!("unknown protocol `{s}`")))
    }
}

pub fn run_ns_sk(opts: &RunOptions) -> Result<ProtocolTrace, ProtocolFailure> {
    ns_sk::run(opts)
}

pub fn run_ns_pk(opts: &RunOptions) -> Result<ProtocolTrace, ProtocolFailure> {
    ns_pk::run(opts)
}

pub fn run_ds(opts: &RunOptions) -> Result<ProtocolTrace, ProtocolFailure> {
    ds::run(opts)
}

pub fn run_ds_simplified(opts: &RunOptions) -> Result<ProtocolTrace, ProtocolFailure> {
    ds_simp::run(opts)
}

pub fn run_sdh(opts: &RunOptions) -> Result<ProtocolTrace, ProtocolFailure> {
    sdh::run(opts)
}

/// Run settings. `sign_mode` selects the combined or detached variant of
/// the simplified Denning-Sacco protocol.
#[derive(Clone)]
pub struct RunOptions {
    pub config: RunConfig,
    pub sign_mode: SignMode,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            config: RunConfig::default(),
            sign_mode: SignMode::Combined,
        }
    }
}

impl RunOptions {
    pub fn seeded(seed: u64) -> Self {
        RunOptions::default().seed(seed)
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.config.seed = Some(seed);
        self
    }

    pub fn schedule(mut self, schedule: Schedule) -> Self {
        self.config.schedule = schedule;
        self
    }

    pub fn clock(mut self, clock: impl Clock + 'static) -> Self {
        self.config.clock = Arc::new(clock);
        self
    }

    pub fn interceptor(mut self, f: Interceptor) -> Self {
        self.config.interceptor = Some(f);
        self
    }

    pub fn scope(mut self, scope: ConfigScope) -> Self {
        self.config.scope = Arc::new(scope);
        self
    }

    pub fn sign_mode(mut self, mode: SignMode) -> Self {
        self.sign_mode = mode;
        self
    }

    pub fn deadline(mut self, deadline: Duration) -> Self {
        self.config.deadline = deadline;
        self
    }
}

/// A run that did not complete, with whatever was observed before it
/// stopped.
#[derive(Debug)]
pub struct ProtocolFailure {
    pub role: String,
    pub error: HarnessError,
    pub trace: Box<ProtocolTrace>,
}

impl fmt::Display for ProtocolFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} failed at {}: {}",
            self.trace.protocol, self.role, self.error
        )
    }
}

impl std::error::Error for ProtocolFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Counters plus an untimed primitive handle for the setup phase.
pub(crate) struct Setup {
    pub counters: Arc<Counters>,
    pub crypto: Instrumented,
}

impl Setup {
    pub fn new(opts: &RunOptions) -> Self {
        let counters = Arc::new(Counters::default());
        let crypto =
            Instrumented::new(opts.config.crypto_for("main"), Arc::clone(&counters), false);
        Setup { counters, crypto }
    }

    pub fn pair(&self, sign_mode: SignMode) -> Result<KeyPair> {
        let opts = KeygenOptions::default().sign_mode(sign_mode.name());
        let k = self.crypto.keygen_with("public", &opts)?;
        k.into_pair()
            .ok_or_else(|| HarnessError::Protocol("public keygen returned a shared key".into()))
    }

    pub fn runtime(&self, opts: &RunOptions) -> Runtime {
        Runtime::new(opts.config.clone(), Arc::clone(&self.counters))
    }

    pub fn finish(self, protocol: Protocol, rt: Runtime) -> Result<ProtocolTrace, ProtocolFailure> {
        let out = rt.run();
        let trace = ProtocolTrace::build(
            protocol.name(),
            &out.log,
            self.counters.counts(),
            &out.role_times,
            self.counters.library_time(),
            out.outputs,
        );
        match out.failure {
            None => Ok(trace),
            Some((role, error)) => Err(ProtocolFailure {
                role,
                error,
                trace: Box::new(trace),
            }),
        }
    }

    /// Setup errors happen before any role runs.
    pub fn failed(self, protocol: Protocol, error: HarnessError) -> ProtocolFailure {
        let trace = ProtocolTrace::build(
            protocol.name(),
            &[],
            self.counters.counts(),
            &Default::default(),
            Duration::ZERO,
            Default::default(),
        );
        ProtocolFailure {
            role: "main".into(),
            error,
            trace: Box::new(trace),
        }
    }
}

// Message field helpers.

pub(crate) fn fields(v: &PlainValue, n: usize) -> Result<&[PlainValue]> {
    Ok(v.expect_tuple(n)?)
}

pub(crate) fn text(v: &PlainValue) -> Result<&str> {
    v.as_str()
        .ok_or_else(|| HarnessError::Protocol("expected text".into()))
}

pub(crate) fn int(v: &PlainValue) -> Result<i64> {
    v.as_int()
        .ok_or_else(|| HarnessError::Protocol("expected an integer".into()))
}

pub(crate) fn bytes(v: &PlainValue) -> Result<&[u8]> {
    v.as_bytes()
        .ok_or_else(|| HarnessError::Protocol("expected bytes".into()))
}

pub(crate) fn envelope(v: &PlainValue) -> Result<CipherEnvelope> {
    Ok(CipherEnvelope::from_plain(v)?)
}

pub(crate) fn key(v: &PlainValue) -> Result<KeyEnvelope> {
    Ok(KeyEnvelope::from_plain(v)?)
}

pub(crate) fn require(ok: bool, role: &str, tag: u32) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(HarnessError::VerificationFailed {
            role: role.to_owned(),
            tag,
        })
    }
}
