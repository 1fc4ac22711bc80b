//! Timestamped public-key certificates signed by an authority.

use secalgo::{KeyEnvelope, PlainValue, SignOutput, SignedPayload};

use super::{fields, int, key, text};
use crate::clock::{is_fresh, FRESHNESS_WINDOW};
use crate::error::{HarnessError, Result};
use crate::instrument::Instrumented;

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub subject: String,
    pub subject_public_key: KeyEnvelope,
    pub timestamp: u64,
    pub wrapper: SignedPayload,
}

impl Certificate {
    /// Signs (subject, key, timestamp) with the authority's private key.
    pub fn issue(
        crypto: &Instrumented,
        subject: &str,
        subject_public_key: &KeyEnvelope,
        timestamp: u64,
        authority: &KeyEnvelope,
    ) -> Result<Certificate> {
        let body = PlainValue::tuple([
            PlainValue::from(subject),
            subject_public_key.to_plain(),
            PlainValue::Int(timestamp as i64),
        ]);
        let wrapper = match crypto.sign(&body, authority)? {
            SignOutput::Combined(p) => p,
            SignOutput::Detached(signature) => SignedPayload {
                text: body,
                signature,
            },
            SignOutput::Digest(_) => unreachable!("signing with a key never yields a bare digest"),
        };
        Ok(Certificate {
            subject: subject.to_owned(),
            subject_public_key: subject_public_key.clone(),
            timestamp,
            wrapper,
        })
    }

    pub fn to_plain(&self) -> PlainValue {
        self.wrapper.to_plain()
    }

    /// Verifies the authority's signature and the timestamp. `Ok(None)`
    /// means the signature did not verify.
    pub fn check(
        crypto: &Instrumented,
        value: &PlainValue,
        authority_public: &KeyEnvelope,
        now: u64,
    ) -> Result<Option<Certificate>> {
        let wrapper = SignedPayload::from_plain(value)?;
        let Some(body) = crypto.verify_signed(value, authority_public)? else {
            return Ok(None);
        };
        let f = fields(&body, 3)?;
        let timestamp = u64::try_from(int(&f[2])?)
            .map_err(|_| HarnessError::Protocol("negative timestamp".into()))?;
        let subject = text(&f[0])?.to_owned();
        if !is_fresh(timestamp, now) {
            return Err(HarnessError::StaleCertificate {
                subject,
                age: now.abs_diff(timestamp),
                window: FRESHNESS_WINDOW,
            });
        }
        Ok(Some(Certificate {
            subject,
            subject_public_key: key(&f[1])?,
            timestamp,
            wrapper,
        }))
    }
}
