//! Simplified Denning-Sacco: A signs a fresh shared key and sends it under
//! B's public key; B answers with a secret under that key.
//!
//! ```text
//! 1. A -> B : {{K}Sa}Pb
//! 2. B -> A : {"secret"}K
//! ```
//!
//! With combined signing, message 1 carries the signed payload and B
//! recovers K from `verify` alone. With detached signing, A sends
//! `(K, signature)` and B calls `verify(K, signature, Pa)`.

use secalgo::labels::SignMode;
use secalgo::{PlainValue, SignOutput, Signature};

use super::{envelope, fields, key, require, Protocol, ProtocolFailure, RunOptions, Setup};
use crate::error::{HarnessError, Result};
use crate::trace::ProtocolTrace;

pub const SECRET: &str = "secret";

pub(super) fn run(opts: &RunOptions) -> Result<ProtocolTrace, ProtocolFailure> {
    let setup = Setup::new(opts);
    let pairs =
        (|| Ok::<_, HarnessError>((setup.pair(opts.sign_mode)?, setup.pair(SignMode::Detached)?)))(
        );
    let (a, b) = match pairs {
        Ok(p) => p,
        Err(e) => return Err(setup.failed(Protocol::DsSimp, e)),
    };
    let mut rt = setup.runtime(opts);

    let (ska, pkb) = (a.private_key.clone(), b.public_key.clone());
    rt.spawn("A", move |p| {
        let k = p.crypto().keygen_shared("shared")?;
        let m1 = match p.crypto().sign(&k.to_plain(), &ska)? {
            SignOutput::Combined(signed) => signed.to_plain(),
            SignOutput::Detached(sig) => PlainValue::tuple([k.to_plain(), sig.to_plain()]),
            SignOutput::Digest(_) => unreachable!("signing with a key never yields a bare digest"),
        };
        p.send("B", 1, p.crypto().encrypt(&m1, &pkb)?.to_plain())?;
        let m2 = p.receive(2, "B")?;
        Ok(Some(p.crypto().decrypt(&envelope(&m2)?, &k)?))
    });

    let (skb, pka, mode) = (b.private_key.clone(), a.public_key.clone(), opts.sign_mode);
    rt.spawn("B", move |p| {
        let m1 = p.receive(1, "A")?;
        let opened = p.crypto().decrypt(&envelope(&m1)?, &skb)?;
        let k = match mode {
            SignMode::Combined => p.crypto().verify_signed(&opened, &pka)?,
            SignMode::Detached => {
                let f = fields(&opened, 2)?;
                let sig = Signature::from_plain(&f[1])?;
                p.crypto().verify(&f[0], &sig, &pka)?.then(|| f[0].clone())
            }
        };
        require(k.is_some(), "B", 1)?;
        let k = key(&k.expect("checked above"))?;
        p.send(
            "A",
            2,
            p.crypto()
                .encrypt(&PlainValue::from(SECRET), &k)?
                .to_plain(),
        )?;
        Ok(None)
    });

    setup.finish(Protocol::DsSimp, rt)
}
