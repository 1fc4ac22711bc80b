use std::collections::BTreeMap;
use std::time::Duration;

use secalgo::codec;
use secalgo::labels::HashAlg;
use secalgo::primitives::digest;
use secalgo::PlainValue;
use serde::Serialize;

use crate::instrument::CallCounts;
use crate::runtime::Message;

#[derive(Clone, Debug, Serialize)]
pub struct MessageRecord {
    pub index: usize,
    pub tag: u32,
    pub from: String,
    pub to: String,
    pub bytes: usize,
    /// SHA-256 of the encoded payload, hex.
    pub sha256: String,
}

/// Everything observable about one protocol run.
#[derive(Clone, Debug, Serialize)]
pub struct ProtocolTrace {
    pub protocol: String,
    pub messages: Vec<MessageRecord>,
    pub counts: CallCounts,
    pub total_calls: u64,
    pub role_times_us: BTreeMap<String, f64>,
    pub library_time_us: f64,
    pub protocol_time_us: f64,
    /// Hex digest of each role's encoded output.
    pub outputs: BTreeMap<String, Option<String>>,
    #[serde(skip)]
    pub wire: Vec<Vec<u8>>,
    #[serde(skip)]
    pub output_values: BTreeMap<String, Option<PlainValue>>,
    #[serde(skip)]
    pub library_time: Duration,
    #[serde(skip)]
    pub protocol_time: Duration,
}

pub(crate) fn micros(d: Duration) -> f64 {
    d.as_secs_f64() * 1e6
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(digest(HashAlg::Sha256, bytes))
}

impl ProtocolTrace {
    pub(crate) fn build(
        protocol: &str,
        log: &[Message],
        counts: CallCounts,
        role_times: &BTreeMap<String, Duration>,
        library_time: Duration,
        outputs: BTreeMap<String, Option<PlainValue>>,
    ) -> Self {
        let wire: Vec<Vec<u8>> = log
            .iter()
            .map(|m| codec::encode(&m.payload).expect("payloads are encodable"))
            .collect();
        let messages = log
            .iter()
            .zip(&wire)
            .enumerate()
            .map(|(i, (m, w))| MessageRecord {
                index: i + 1,
                tag: m.tag,
                from: m.sender.clone(),
                to: m.receiver.clone(),
                bytes: w.len(),
                sha256: sha256_hex(w),
            })
            .collect();
        let protocol_time: Duration = role_times.values().sum();
        ProtocolTrace {
            protocol: protocol.to_owned(),
            messages,
            counts,
            total_calls: counts.total(),
            role_times_us: role_times
                .iter()
                .map(|(k, v)| (k.clone(), micros(*v)))
                .collect(),
            library_time_us: micros(library_time),
            protocol_time_us: micros(protocol_time),
            outputs: outputs
                .iter()
                .map(|(k, v)| {
                    let d = v
                        .as_ref()
                        .map(|v| sha256_hex(&codec::encode(v).expect("encodable output")));
                    (k.clone(), d)
                })
                .collect(),
            wire,
            output_values: outputs,
            library_time,
            protocol_time,
        }
    }

    pub fn output(&self, role: &str) -> Option<&PlainValue> {
        self.output_values.get(role).and_then(Option::as_ref)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}
