//! Signed Diffie-Hellman. The group is fixed in setup; each side signs its
//! public value and both derive the session key as SHA-256 of the shared
//! secret. Message 3 confirms the key.
//!
//! ```text
//! 1. A -> B : A, g^x, {A, B, g^x}Sa
//! 2. B -> A : B, g^y, {B, A, g^y, g^x}Sb
//! 3. A -> B : H("confirm", K)
//! ```

use secalgo::keys::{dh_shared_secret, DhGroup};
use secalgo::labels::{HashAlg, KeySize, SignMode};
use secalgo::primitives::digest;
use secalgo::{PlainValue, SignOutput, Signature};

use super::{bytes, fields, key, require, text, Protocol, ProtocolFailure, RunOptions, Setup};
use crate::error::{HarnessError, Result};
use crate::trace::ProtocolTrace;

fn detached(out: SignOutput) -> Result<PlainValue> {
    match out {
        SignOutput::Detached(sig) => Ok(sig.to_plain()),
        SignOutput::Combined(p) => Ok(p.signature.to_plain()),
        SignOutput::Digest(_) => Err(HarnessError::Protocol("unsigned".into())),
    }
}

fn session_key(secret: &[u8]) -> Vec<u8> {
    digest(HashAlg::Sha256, secret)
}

fn confirmation(k: &[u8]) -> Vec<u8> {
    digest(HashAlg::Sha256, &[b"confirm".as_slice(), k].concat())
}

pub(super) fn run(opts: &RunOptions) -> Result<ProtocolTrace, ProtocolFailure> {
    let setup = Setup::new(opts);
    let prepared = (|| {
        let a = setup.pair(SignMode::Detached)?;
        let b = setup.pair(SignMode::Detached)?;
        // agreeing on the group is itself a keygen call
        let params = setup.crypto.keygen("DH")?;
        let bits = match params.into_pair().map(|p| p.public_key.size()) {
            Some(KeySize::Bits(bits)) => bits,
            _ => return Err(HarnessError::Protocol("DH keygen gave no group".into())),
        };
        let group = DhGroup::for_bits(bits)
            .ok_or_else(|| HarnessError::Protocol(format!("no {bits}-bit group")))?;
        Ok::<_, HarnessError>((a, b, group.name().to_owned()))
    })();
    let (a, b, group) = match prepared {
        Ok(p) => p,
        Err(e) => return Err(setup.failed(Protocol::Sdh, e)),
    };
    let mut rt = setup.runtime(opts);

    let (ska, pkb, g) = (a.private_key.clone(), b.public_key.clone(), group.clone());
    rt.spawn("A", move |p| {
        let mine = p.crypto().dh_keygen(&g)?;
        let gx = mine.public_key.to_plain();
        let signed = PlainValue::tuple([PlainValue::from("A"), PlainValue::from("B"), gx.clone()]);
        let sig = detached(p.crypto().sign(&signed, &ska)?)?;
        p.send(
            "B",
            1,
            PlainValue::tuple([PlainValue::from("A"), gx.clone(), sig]),
        )?;

        let m2 = p.receive(2, "B")?;
        let f = fields(&m2, 3)?;
        require(text(&f[0])? == "B", "A", 2)?;
        let covered = PlainValue::tuple([
            PlainValue::from("B"),
            PlainValue::from("A"),
            f[1].clone(),
            gx,
        ]);
        let ok = p
            .crypto()
            .verify(&covered, &Signature::from_plain(&f[2])?, &pkb)?;
        require(ok, "A", 2)?;
        let k = session_key(&dh_shared_secret(&mine.private_key, &key(&f[1])?)?);
        p.send("B", 3, PlainValue::Bytes(confirmation(&k)))?;
        Ok(Some(PlainValue::Bytes(k)))
    });

    let (skb, pka) = (b.private_key.clone(), a.public_key.clone());
    rt.spawn("B", move |p| {
        let m1 = p.receive(1, "A")?;
        let f = fields(&m1, 3)?;
        require(text(&f[0])? == "A", "B", 1)?;
        let gx = f[1].clone();
        let covered = PlainValue::tuple([PlainValue::from("A"), PlainValue::from("B"), gx.clone()]);
        let ok = p
            .crypto()
            .verify(&covered, &Signature::from_plain(&f[2])?, &pka)?;
        require(ok, "B", 1)?;

        let mine = p.crypto().dh_keygen(&group)?;
        let gy = mine.public_key.to_plain();
        let signed = PlainValue::tuple([
            PlainValue::from("B"),
            PlainValue::from("A"),
            gy.clone(),
            gx.clone(),
        ]);
        let sig = detached(p.crypto().sign(&signed, &skb)?)?;
        p.send("A", 2, PlainValue::tuple([PlainValue::from("B"), gy, sig]))?;

        let k = session_key(&dh_shared_secret(&mine.private_key, &key(&gx)?)?);
        let m3 = p.receive(3, "A")?;
        require(bytes(&m3)? == confirmation(&k), "B", 3)?;
        Ok(Some(PlainValue::Bytes(k)))
    });

    setup.finish(Protocol::Sdh, rt)
}
