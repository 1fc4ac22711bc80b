//! Counting and timing wrapper around the five primitives.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use secalgo::keys::{GeneratedKey, KeyPair, KeygenOptions};
use secalgo::{CipherEnvelope, Crypto, KeyEnvelope, PlainValue, SignOutput, Signature};
use serde::Serialize;

/// Calls per primitive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CallCounts {
    pub keygen: u64,
    pub encrypt: u64,
    pub decrypt: u64,
    pub sign: u64,
    pub verify: u64,
}

impl CallCounts {
    pub const fn new(keygen: u64, encrypt: u64, decrypt: u64, sign: u64, verify: u64) -> Self {
        CallCounts {
            keygen,
            encrypt,
            decrypt,
            sign,
            verify,
        }
    }

    pub fn total(&self) -> u64 {
        self.keygen + self.encrypt + self.decrypt + self.sign + self.verify
    }
}

#[derive(Clone, Copy)]
enum Op {
    Keygen,
    Encrypt,
    Decrypt,
    Sign,
    Verify,
}

/// Counters shared by every participant of one run.
#[derive(Debug, Default)]
pub struct Counters {
    calls: [AtomicU64; 5],
    library_nanos: AtomicU64,
}

impl Counters {
    pub fn counts(&self) -> CallCounts {
        let c = |op: Op| self.calls[op as usize].load(Ordering::Relaxed);
        CallCounts::new(
            c(Op::Keygen),
            c(Op::Encrypt),
            c(Op::Decrypt),
            c(Op::Sign),
            c(Op::Verify),
        )
    }

    /// Summed duration of timed primitive calls.
    pub fn library_time(&self) -> Duration {
        Duration::from_nanos(self.library_nanos.load(Ordering::Relaxed))
    }
}

/// A [`Crypto`] whose calls are counted; calls made outside setup are also
/// timed.
pub struct Instrumented {
    crypto: Crypto,
    counters: Arc<Counters>,
    timed: bool,
}

impl Instrumented {
    pub fn new(crypto: Crypto, counters: Arc<Counters>, timed: bool) -> Self {
        Instrumented {
            crypto,
            counters,
            timed,
        }
    }

    pub fn inner(&self) -> &Crypto {
        &self.crypto
    }

    fn record<T>(&self, op: Op, f: impl FnOnce(&Crypto) -> T) -> T {
        self.counters.calls[op as usize].fetch_add(1, Ordering::Relaxed);
        if !self.timed {
            return f(&self.crypto);
        }
        let start = Instant::now();
        let out = f(&self.crypto);
        let nanos = start.elapsed().as_nanos() as u64;
        self.counters
            .library_nanos
            .fetch_add(nanos, Ordering::Relaxed);
        out
    }

    pub fn keygen(&self, kind: &str) -> secalgo::Result<GeneratedKey> {
        self.record(Op::Keygen, |c| c.keygen(kind))
    }

    pub fn keygen_with(&self, kind: &str, opts: &KeygenOptions) -> secalgo::Result<GeneratedKey> {
        self.record(Op::Keygen, |c| c.keygen_with(kind, opts))
    }

    pub fn keygen_shared(&self, kind: &str) -> secalgo::Result<KeyEnvelope> {
        self.record(Op::Keygen, |c| c.keygen_shared(kind))
    }

    pub fn keygen_pair(&self, kind: &str) -> secalgo::Result<KeyPair> {
        self.record(Op::Keygen, |c| c.keygen_pair(kind))
    }

    pub fn dh_keygen(&self, group: &str) -> secalgo::Result<KeyPair> {
        self.record(Op::Keygen, |c| c.dh_keygen(group))
    }

    pub fn encrypt(
        &self,
        value: &PlainValue,
        key: &KeyEnvelope,
    ) -> secalgo::Result<CipherEnvelope> {
        self.record(Op::Encrypt, |c| c.encrypt(value, key))
    }

    pub fn decrypt(&self, env: &CipherEnvelope, key: &KeyEnvelope) -> secalgo::Result<PlainValue> {
        self.record(Op::Decrypt, |c| c.decrypt(env, key))
    }

    pub fn sign(&self, value: &PlainValue, key: &KeyEnvelope) -> secalgo::Result<SignOutput> {
        self.record(Op::Sign, |c| c.sign(value, Some(key)))
    }

    pub fn verify(
        &self,
        value: &PlainValue,
        sig: &Signature,
        key: &KeyEnvelope,
    ) -> secalgo::Result<bool> {
        self.record(Op::Verify, |c| c.verify(value, sig, key))
    }

    pub fn verify_signed(
        &self,
        signed: &PlainValue,
        key: &KeyEnvelope,
    ) -> secalgo::Result<Option<PlainValue>> {
        self.record(Op::Verify, |c| c.verify_signed(signed, key))
    }

    pub fn random_u64(&self) -> u64 {
        self.crypto.random_u64()
    }

    pub fn random_bytes(&self, n: usize) -> Vec<u8> {
        let mut buf = vec![0u8; n];
        self.crypto.random_bytes(&mut buf);
        buf
    }
}
