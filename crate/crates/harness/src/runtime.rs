//! In-process message passing between named roles.
//!
//! Every role runs on its own thread. In [`Schedule::Deterministic`] mode a
//! single turn token serializes them: a role runs until it blocks on a
//! receive or finishes, then hands the token to the next live role in name
//! order. When every live role is blocked and nothing has been delivered
//! since each of them last looked, the run is deadlocked and fails with a
//! timeout. [`Schedule::Concurrent`] lets roles run freely and uses a
//! wall-clock deadline instead.

use std::collections::{BTreeMap, VecDeque};
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::time::{Duration, Instant};

use secalgo::entropy::Entropy;
use secalgo::{ConfigScope, Crypto, PlainValue};

use crate::clock::{Clock, SystemClock};
use crate::error::{HarnessError, Result};
use crate::instrument::{Counters, Instrumented};

#[derive(Clone, Debug, PartialEq)]
pub struct Message {
    pub tag: u32,
    pub payload: PlainValue,
    pub sender: String,
    pub receiver: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    #[default]
    Deterministic,
    Concurrent,
}

/// What an interceptor does with a message in flight.
pub enum Intercept {
    Deliver(Message),
    Drop,
}

pub type Interceptor = Arc<dyn Fn(Message) -> Intercept + Send + Sync>;

pub type RoleBody = Box<dyn FnOnce(&mut Process) -> Result<Option<PlainValue>> + Send>;

/// Settings shared by a run and all of its roles.
#[derive(Clone)]
pub struct RunConfig {
    pub schedule: Schedule,
    /// Seeds each role's randomness with this value and the role name.
    pub seed: Option<u64>,
    pub deadline: Duration,
    pub scope: Arc<ConfigScope>,
    pub clock: Arc<dyn Clock>,
    pub interceptor: Option<Interceptor>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schedule: Schedule::Deterministic,
            seed: None,
            deadline: Duration::from_secs(30),
            scope: Arc::new(ConfigScope::root()),
            clock: Arc::new(SystemClock),
            interceptor: None,
        }
    }
}

impl RunConfig {
    pub fn entropy_for(&self, label: &str) -> Entropy {
        match self.seed {
            Some(seed) => Entropy::for_label(seed, label),
            None => Entropy::Os,
        }
    }

    pub fn crypto_for(&self, label: &str) -> Crypto {
        Crypto::with_entropy(Arc::clone(&self.scope), self.entropy_for(label))
    }
}

struct State {
    inboxes: BTreeMap<String, VecDeque<Message>>,
    log: Vec<Message>,
    turn: usize,
    finished: Vec<bool>,
    blocked_at: Vec<Option<u64>>,
    epoch: u64,
    failure: Option<String>,
}

struct Shared {
    roles: Vec<String>,
    state: Mutex<State>,
    wake: Condvar,
    config: RunConfig,
    started: Instant,
}

impl Shared {
    fn lock(&self) -> MutexGuard<'_, State> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn index(&self, role: &str) -> Option<usize> {
        self.roles.iter().position(|r| r == role)
    }

    fn pass_turn(&self, st: &mut State, from: usize) {
        let n = self.roles.len();
        if let Some(next) = (1..=n).map(|d| (from + d) % n).find(|&i| !st.finished[i]) {
            st.turn = next;
        }
        self.wake.notify_all();
    }

    fn fail(&self, st: &mut State, role: &str) {
        if st.failure.is_none() {
            st.failure = Some(role.to_owned());
        }
        self.wake.notify_all();
    }
}

/// A running role: its identity, mailbox access, randomness and primitives.
pub struct Process {
    index: usize,
    name: String,
    shared: Arc<Shared>,
    crypto: Instrumented,
    active: Duration,
    running_since: Option<Instant>,
}

impl Process {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn crypto(&self) -> &Instrumented {
        &self.crypto
    }

    pub fn now(&self) -> u64 {
        self.shared.config.clock.now()
    }

    fn pause(&mut self) {
        if let Some(t) = self.running_since.take() {
            self.active += t.elapsed();
        }
    }

    fn resume(&mut self) {
        self.running_since.get_or_insert_with(Instant::now);
    }

    pub fn send(&mut self, to: &str, tag: u32, payload: PlainValue) -> Result<()> {
        if self.shared.index(to).is_none() {
            return Err(HarnessError::UnknownRole(to.to_owned()));
        }
        let msg = Message {
            tag,
            payload,
            sender: self.name.clone(),
            receiver: to.to_owned(),
        };
        let msg = match &self.shared.config.interceptor {
            None => msg,
            Some(f) => match f(msg) {
                Intercept::Deliver(m) => m,
                Intercept::Drop => return Ok(()),
            },
        };
        let mut st = self.shared.lock();
        if st.failure.is_some() {
            return Err(HarnessError::Aborted);
        }
        st.log.push(msg.clone());
        st.inboxes
            .get_mut(&msg.receiver)
            .expect("inbox exists for every role")
            .push_back(msg);
        st.epoch += 1;
        self.shared.wake.notify_all();
        Ok(())
    }

    /// Blocks until a message with `tag` from `from` arrives. Messages on
    /// one channel are taken in send order.
    pub fn receive(&mut self, tag: u32, from: &str) -> Result<PlainValue> {
        if self.shared.index(from).is_none() {
            return Err(HarnessError::UnknownRole(from.to_owned()));
        }
        let shared = Arc::clone(&self.shared);
        let mut st = shared.lock();
        loop {
            if st.failure.is_some() {
                return Err(HarnessError::Aborted);
            }
            let inbox = st.inboxes.get_mut(&self.name).expect("own inbox");
            if let Some(pos) = inbox.iter().position(|m| m.tag == tag && m.sender == from) {
                let msg = inbox.remove(pos).expect("position is in range");
                st.epoch += 1;
                st.blocked_at[self.index] = None;
                return Ok(msg.payload);
            }
            let timeout = || HarnessError::Timeout {
                role: self.name.clone(),
                tag,
                from: from.to_owned(),
            };
            match shared.config.schedule {
                Schedule::Deterministic => {
                    st.blocked_at[self.index] = Some(st.epoch);
                    let epoch = st.epoch;
                    let stuck = (0..shared.roles.len())
                        .all(|i| st.finished[i] || st.blocked_at[i] == Some(epoch));
                    if stuck {
                        shared.fail(&mut st, &self.name);
                        return Err(timeout());
                    }
                    shared.pass_turn(&mut st, self.index);
                    self.pause();
                    while st.turn != self.index && st.failure.is_none() {
                        st = shared.wake.wait(st).unwrap_or_else(|e| e.into_inner());
                    }
                    self.resume();
                }
                Schedule::Concurrent => {
                    let left = shared
                        .config
                        .deadline
                        .saturating_sub(shared.started.elapsed());
                    if left.is_zero() {
                        shared.fail(&mut st, &self.name);
                        return Err(timeout());
                    }
                    self.pause();
                    st = shared
                        .wake
                        .wait_timeout(st, left)
                        .unwrap_or_else(|e| e.into_inner())
                        .0;
                    self.resume();
                }
            }
        }
    }

    pub fn random_u64(&self) -> u64 {
        self.crypto.random_u64()
    }

    pub fn random_bytes(&self, n: usize) -> Vec<u8> {
        self.crypto.random_bytes(n)
    }
}

/// Result of one run, successful or not.
#[derive(Debug)]
pub struct RunOutcome {
    pub outputs: BTreeMap<String, Option<PlainValue>>,
    pub log: Vec<Message>,
    /// Time each role spent running, excluding time blocked on receives.
    pub role_times: BTreeMap<String, Duration>,
    /// First failure and the role that raised it.
    pub failure: Option<(String, HarnessError)>,
}

impl RunOutcome {
    pub fn protocol_time(&self) -> Duration {
        self.role_times.values().sum()
    }
}

/// Collects roles, then runs them to completion.
pub struct Runtime {
    config: RunConfig,
    counters: Arc<Counters>,
    roles: BTreeMap<String, RoleBody>,
}

impl Runtime {
    pub fn new(config: RunConfig, counters: Arc<Counters>) -> Self {
        Runtime {
            config,
            counters,
            roles: BTreeMap::new(),
        }
    }

    pub fn spawn<F>(&mut self, role: &str, body: F)
    where
        F: FnOnce(&mut Process) -> Result<Option<PlainValue>> + Send + 'static,
    {
        self.roles.insert(role.to_owned(), Box::new(body));
    }

    pub fn run(self) -> RunOutcome {
        let names: Vec<String> = self.roles.keys().cloned().collect();
        let n = names.len();
        let shared = Arc::new(Shared {
            state: Mutex::new(State {
                inboxes: names.iter().map(|r| (r.clone(), VecDeque::new())).collect(),
                log: vec![],
                turn: 0,
                finished: vec![false; n],
                blocked_at: vec![None; n],
                epoch: 0,
                failure: None,
            }),
            roles: names.clone(),
            wake: Condvar::new(),
            config: self.config.clone(),
            started: Instant::now(),
        });

        let mut results = BTreeMap::new();
        std::thread::scope(|s| {
            let handles: Vec<_> = self
                .roles
                .into_iter()
                .enumerate()
                .map(|(index, (name, body))| {
                    let crypto = Instrumented::new(
                        self.config.crypto_for(&name),
                        Arc::clone(&self.counters),
                        true,
                    );
                    let mut proc = Process {
                        index,
                        name: name.clone(),
                        shared: Arc::clone(&shared),
                        crypto,
                        active: Duration::ZERO,
                        running_since: None,
                    };
                    let handle = s.spawn(move || run_role(&mut proc, body));
                    (name, handle)
                })
                .collect();
            for (name, handle) in handles {
                let (out, time) = handle.join().unwrap_or_else(|p| {
                    let msg = p
                        .downcast_ref::<&str>()
                        .map(|s| s.to_string())
                        .or_else(|| p.downcast_ref::<String>().cloned())
                        .unwrap_or_default();
                    (Err(HarnessError::Panicked(msg)), Duration::ZERO)
                });
                results.insert(name, (out, time));
            }
        });

        let mut st = shared.lock();
        let failed_role = st.failure.take();
        let log = std::mem::take(&mut st.log);
        let mut outputs = BTreeMap::new();
        let mut role_times = BTreeMap::new();
        let mut failure = None;
        for (name, (out, time)) in results {
            role_times.insert(name.clone(), time);
            match out {
                Ok(v) => {
                    outputs.insert(name, v);
                }
                Err(e) if failed_role.as_deref() == Some(name.as_str()) => {
                    failure = Some((name, e))
                }
                Err(HarnessError::Aborted) => {}
                Err(e) => failure = failure.or(Some((name, e))),
            }
        }
        if let (None, Some(role)) = (&failure, failed_role) {
            failure = Some((role, HarnessError::Aborted));
        }
        RunOutcome {
            outputs,
            log,
            role_times,
            failure,
        }
    }
}

fn run_role(proc: &mut Process, body: RoleBody) -> (Result<Option<PlainValue>>, Duration) {
    let shared = Arc::clone(&proc.shared);
    if shared.config.schedule == Schedule::Deterministic {
        let mut st = shared.lock();
        while st.turn != proc.index && st.failure.is_none() {
            st = shared.wake.wait(st).unwrap_or_else(|e| e.into_inner());
        }
        if st.failure.is_some() {
            st.finished[proc.index] = true;
            shared.pass_turn(&mut st, proc.index);
            return (Err(HarnessError::Aborted), Duration::ZERO);
        }
    }
    proc.resume();
    let out =
        std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| body(proc))).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_default();
            Err(HarnessError::Panicked(msg))
        });
    proc.pause();
    let mut st = shared.lock();
    st.finished[proc.index] = true;
    if matches!(&out, Err(e) if !matches!(e, HarnessError::Aborted)) {
        shared.fail(&mut st, &proc.name);
    }
    shared.pass_turn(&mut st, proc.index);
    (out, proc.active)
}
