//! Averaged timings over repeated runs.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::instrument::CallCounts;
use crate::protocols::{Protocol, ProtocolFailure, RunOptions};
use crate::trace::micros;

#[derive(Clone, Copy, Debug)]
pub struct MeasureOptions {
    /// Minimum number of runs.
    pub repetitions: u32,
    /// Keep running until at least this much wall time has passed.
    pub min_time: Duration,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            repetitions: 1,
            min_time: Duration::from_secs(1),
        }
    }
}

impl MeasureOptions {
    pub fn runs(repetitions: u32) -> Self {
        MeasureOptions {
            repetitions,
            min_time: Duration::ZERO,
        }
    }
}

/// Per-run means: protocol time is the summed running time of all roles,
/// library time the summed duration of the primitive calls they made.
#[derive(Clone, Debug, Serialize)]
pub struct Measurement {
    pub protocol: String,
    pub runs: u32,
    pub messages: usize,
    pub counts: CallCounts,
    pub protocol_time_us: f64,
    pub library_time_us: f64,
    pub difference_us: f64,
    #[serde(skip)]
    pub protocol_time: Duration,
    #[serde(skip)]
    pub library_time: Duration,
}

pub fn measure(
    protocol: Protocol,
    opts: &RunOptions,
    m: MeasureOptions,
) -> Result<Measurement, ProtocolFailure> {
    let started = Instant::now();
    let (mut runs, mut proto, mut lib) = (0u32, Duration::ZERO, Duration::ZERO);
    let mut last = None;
    while runs < m.repetitions.max(1) || started.elapsed() < m.min_time {
        let trace = protocol.run(opts)?;
        proto += trace.protocol_time;
        lib += trace.library_time;
        runs += 1;
        last = Some(trace);
    }
    let last = last.expect("at least one run");
    let (protocol_time, library_time) = (proto / runs, lib / runs);
    Ok(Measurement {
        protocol: protocol.name().to_owned(),
        runs,
        messages: last.messages.len(),
        counts: last.counts,
        protocol_time_us: micros(protocol_time),
        library_time_us: micros(library_time),
        difference_us: micros(protocol_time.saturating_sub(library_time)),
        protocol_time,
        library_time,
    })
}
