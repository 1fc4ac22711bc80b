//! Denning-Sacco key distribution. The authority hands out timestamped
//! certificates; A signs a fresh session key and sends it to B under B's
//! public key.
//!
//! ```text
//! 1. AS <- A : A, B
//! 2. AS -> A : CA, CB
//! 3. A  -> B : CA, CB, {{K, T}Sa}Pb
//! ```

use secalgo::labels::SignMode;
use secalgo::{KeyEnvelope, PlainValue};

use super::{
    envelope, fields, int, key, require, Certificate, Protocol, ProtocolFailure, RunOptions, Setup,
};
use crate::clock::{is_fresh, FRESHNESS_WINDOW};
use crate::error::{HarnessError, Result};
use crate::runtime::Process;
use crate::trace::ProtocolTrace;

fn check_cert(
    p: &Process,
    value: &PlainValue,
    authority: &KeyEnvelope,
    subject: &str,
    tag: u32,
) -> Result<KeyEnvelope> {
    let cert = Certificate::check(p.crypto(), value, authority, p.now())?;
    let cert = cert.ok_or_else(|| HarnessError::VerificationFailed {
        role: p.name().to_owned(),
        tag,
    })?;
    require(cert.subject == subject, p.name(), tag)?;
    Ok(cert.subject_public_key)
}

pub(super) fn run(opts: &RunOptions) -> Result<ProtocolTrace, ProtocolFailure> {
    let setup = Setup::new(opts);
    let pairs = (|| {
        Ok::<_, HarnessError>((
            setup.pair(SignMode::Combined)?,
            setup.pair(SignMode::Combined)?,
            setup.pair(SignMode::Combined)?,
        ))
    })();
    let (a, b, auth) = match pairs {
        Ok(p) => p,
        Err(e) => return Err(setup.failed(Protocol::Ds, e)),
    };
    let mut rt = setup.runtime(opts);

    let (ska, pk_as) = (a.private_key.clone(), auth.public_key.clone());
    rt.spawn("A", move |p| {
        p.send(
            "AS",
            1,
            PlainValue::tuple([PlainValue::from("A"), PlainValue::from("B")]),
        )?;
        let certs = p.receive(2, "AS")?;
        let c = fields(&certs, 2)?;
        check_cert(p, &c[0], &pk_as, "A", 2)?;
        let pkb = check_cert(p, &c[1], &pk_as, "B", 2)?;
        let k = p.crypto().keygen_shared("shared")?;
        let body = PlainValue::tuple([k.to_plain(), PlainValue::Int(p.now() as i64)]);
        let signed = p.crypto().sign(&body, &ska)?.into_plain();
        let env = p.crypto().encrypt(&signed, &pkb)?;
        p.send(
            "B",
            3,
            PlainValue::tuple([c[0].clone(), c[1].clone(), env.to_plain()]),
        )?;
        Ok(Some(k.to_plain()))
    });

    let directory = [("A", a.public_key.clone()), ("B", b.public_key.clone())];
    let sk_as = auth.private_key.clone();
    rt.spawn("AS", move |p| {
        let req = p.receive(1, "A")?;
        fields(&req, 2)?;
        let t = p.now();
        let certs: Result<Vec<PlainValue>> = directory
            .iter()
            .map(|(name, pk)| Ok(Certificate::issue(p.crypto(), name, pk, t, &sk_as)?.to_plain()))
            .collect();
        p.send("A", 2, PlainValue::Tuple(certs?))?;
        Ok(None)
    });

    let (skb, pk_as) = (b.private_key.clone(), auth.public_key.clone());
    rt.spawn("B", move |p| {
        let m3 = p.receive(3, "A")?;
        let f = fields(&m3, 3)?;
        let signed = p.crypto().decrypt(&envelope(&f[2])?, &skb)?;
        let pka = check_cert(p, &f[0], &pk_as, "A", 3)?;
        check_cert(p, &f[1], &pk_as, "B", 3)?;
        let body = p.crypto().verify_signed(&signed, &pka)?;
        let body = body.ok_or_else(|| HarnessError::VerificationFailed {
            role: "B".into(),
            tag: 3,
        })?;
        let kb = fields(&body, 2)?;
        let t = u64::try_from(int(&kb[1])?).unwrap_or(0);
        let now = p.now();
        if !is_fresh(t, now) {
            return Err(HarnessError::StaleCertificate {
                subject: "A".into(),
                age: now.abs_diff(t),
                window: FRESHNESS_WINDOW,
            });
        }
        Ok(Some(key(&kb[0])?.to_plain()))
    });

    setup.finish(Protocol::Ds, rt)
}
