//! Needham-Schroeder with public keys, with Lowe's fix (B's identity in
//! message 6). S certifies public keys on request.
//!
//! ```text
//! 1. A -> S : A, B
//! 2. S -> A : {B, Pb}Ss
//! 3. A -> B : {Na, A}Pb
//! 4. B -> S : B, A
//! 5. S -> B : {A, Pa}Ss
//! 6. B -> A : {Na, Nb, B}Pa
//! 7. A -> B : {Nb}Pb
//! ```

use std::collections::BTreeMap;

use secalgo::labels::SignMode;
use secalgo::{KeyEnvelope, PlainValue, SignOutput};

use super::{
    bytes, envelope, fields, key, require, text, Protocol, ProtocolFailure, RunOptions, Setup,
};
use crate::error::{HarnessError, Result};
use crate::runtime::Process;
use crate::trace::ProtocolTrace;

fn lookup(
    p: &mut Process,
    server: &KeyEnvelope,
    me: &str,
    peer: &str,
    tag: u32,
) -> Result<KeyEnvelope> {
    p.send(
        "S",
        tag,
        PlainValue::tuple([PlainValue::from(me), PlainValue::from(peer)]),
    )?;
    let signed = p.receive(tag + 1, "S")?;
    let body = p.crypto().verify_signed(&signed, server)?;
    let body = body.ok_or_else(|| HarnessError::VerificationFailed {
        role: me.to_owned(),
        tag: tag + 1,
    })?;
    let f = fields(&body, 2)?;
    require(text(&f[0])? == peer, me, tag + 1)?;
    key(&f[1])
}

pub(super) fn run(opts: &RunOptions) -> Result<ProtocolTrace, ProtocolFailure> {
    let setup = Setup::new(opts);
    let pairs = (|| {
        Ok::<_, HarnessError>((
            setup.pair(SignMode::Detached)?,
            setup.pair(SignMode::Detached)?,
            setup.pair(SignMode::Combined)?,
        ))
    })();
    let (a, b, s) = match pairs {
        Ok(p) => p,
        Err(e) => return Err(setup.failed(Protocol::NsPk, e)),
    };
    let mut rt = setup.runtime(opts);

    let (ska, spk) = (a.private_key.clone(), s.public_key.clone());
    rt.spawn("A", move |p| {
        let pkb = lookup(p, &spk, "A", "B", 1)?;
        let na = p.random_bytes(16);
        let m3 = PlainValue::tuple([PlainValue::Bytes(na.clone()), PlainValue::from("A")]);
        p.send("B", 3, p.crypto().encrypt(&m3, &pkb)?.to_plain())?;
        let m6 = p.receive(6, "B")?;
        let m6 = p.crypto().decrypt(&envelope(&m6)?, &ska)?;
        let f = fields(&m6, 3)?;
        require(bytes(&f[0])? == na && text(&f[2])? == "B", "A", 6)?;
        let nb = f[1].clone();
        p.send("B", 7, p.crypto().encrypt(&nb, &pkb)?.to_plain())?;
        Ok(Some(PlainValue::tuple([PlainValue::Bytes(na), nb])))
    });

    let (skb, spk) = (b.private_key.clone(), s.public_key.clone());
    rt.spawn("B", move |p| {
        let m3 = p.receive(3, "A")?;
        let m3 = p.crypto().decrypt(&envelope(&m3)?, &skb)?;
        let f = fields(&m3, 2)?;
        let na = f[0].clone();
        let claimed = text(&f[1])?.to_owned();
        let pka = lookup(p, &spk, "B", &claimed, 4)?;
        let nb = p.random_bytes(16);
        let m6 = PlainValue::tuple([
            na.clone(),
            PlainValue::Bytes(nb.clone()),
            PlainValue::from("B"),
        ]);
        p.send("A", 6, p.crypto().encrypt(&m6, &pka)?.to_plain())?;
        let m7 = p.receive(7, "A")?;
        let got = p.crypto().decrypt(&envelope(&m7)?, &skb)?;
        require(bytes(&got)? == nb, "B", 7)?;
        Ok(Some(PlainValue::tuple([na, PlainValue::Bytes(nb)])))
    });

    let directory: BTreeMap<String, KeyEnvelope> = [
        ("A".to_owned(), a.public_key.clone()),
        ("B".to_owned(), b.public_key.clone()),
    ]
    .into();
    let sks = s.private_key.clone();
    rt.spawn("S", move |p| {
        for (from, tag) in [("A", 1), ("B", 4)] {
            let req = p.receive(tag, from)?;
            let f = fields(&req, 2)?;
            let peer = text(&f[1])?;
            let pk = directory
                .get(peer)
                .ok_or_else(|| HarnessError::UnknownRole(peer.to_owned()))?;
            let body = PlainValue::tuple([PlainValue::from(peer), pk.to_plain()]);
            let signed = match p.crypto().sign(&body, &sks)? {
                SignOutput::Combined(sp) => sp.to_plain(),
                other => {
                    return Err(HarnessError::Protocol(format!(
                        "server key must sign combined, got {other:?}"
                    )))
                }
            };
            p.send(from, tag + 1, signed)?;
        }
        Ok(None)
    });

    setup.finish(Protocol::NsPk, rt)
}
