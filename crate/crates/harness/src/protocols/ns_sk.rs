//! Needham-Schroeder with shared keys, with the nonce handshake that lets
//! B reject a replayed session key.
//!
//! ```text
//! 1. A -> B : A
//! 2. B -> A : {A, Nb'}Kbs
//! 3. A -> S : A, B, Na, {A, Nb'}Kbs
//! 4. S -> A : {Na, Kab, B, {Kab, A, Nb'}Kbs}Kas
//! 5. A -> B : {Kab, A, Nb'}Kbs
//! 6. B -> A : {Nb}Kab
//! 7. A -> B : {Nb - 1}Kab
//! ```

use secalgo::PlainValue;

use super::{
    envelope, fields, int, key, require, text, Protocol, ProtocolFailure, RunOptions, Setup,
};
use crate::trace::ProtocolTrace;

pub(super) fn run(opts: &RunOptions) -> Result<ProtocolTrace, ProtocolFailure> {
    let setup = Setup::new(opts);
    let keys = (
        setup.crypto.keygen_shared("shared"),
        setup.crypto.keygen_shared("shared"),
    );
    let (kas, kbs) = match keys {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Err(setup.failed(Protocol::NsSk, e.into())),
    };
    let mut rt = setup.runtime(opts);

    let k = kas.clone();
    rt.spawn("A", move |p| {
        p.send("B", 1, PlainValue::from("A"))?;
        let ticket = p.receive(2, "B")?;
        let na = p.random_u64() as i64;
        p.send(
            "S",
            3,
            PlainValue::tuple([
                PlainValue::from("A"),
                PlainValue::from("B"),
                PlainValue::Int(na),
                ticket,
            ]),
        )?;
        let m4 = p.receive(4, "S")?;
        let inner = p.crypto().decrypt(&envelope(&m4)?, &k)?;
        let f = fields(&inner, 4)?;
        require(int(&f[0])? == na && text(&f[2])? == "B", "A", 4)?;
        let kab = key(&f[1])?;
        p.send("B", 5, f[3].clone())?;
        let m6 = p.receive(6, "B")?;
        let nb = int(&p.crypto().decrypt(&envelope(&m6)?, &kab)?)?;
        let reply = p
            .crypto()
            .encrypt(&PlainValue::Int(nb.wrapping_sub(1)), &kab)?;
        p.send("B", 7, reply.to_plain())?;
        Ok(Some(kab.to_plain()))
    });

    let k = kbs.clone();
    rt.spawn("B", move |p| {
        let who = p.receive(1, "A")?;
        let nb0 = p.random_u64() as i64;
        let ticket = p
            .crypto()
            .encrypt(&PlainValue::tuple([who, PlainValue::Int(nb0)]), &k)?;
        p.send("A", 2, ticket.to_plain())?;
        let m5 = p.receive(5, "A")?;
        let inner = p.crypto().decrypt(&envelope(&m5)?, &k)?;
        let f = fields(&inner, 3)?;
        require(text(&f[1])? == "A" && int(&f[2])? == nb0, "B", 5)?;
        let kab = key(&f[0])?;
        let nb = p.random_u64() as i64;
        p.send(
            "A",
            6,
            p.crypto().encrypt(&PlainValue::Int(nb), &kab)?.to_plain(),
        )?;
        let m7 = p.receive(7, "A")?;
        let got = int(&p.crypto().decrypt(&envelope(&m7)?, &kab)?)?;
        require(got == nb.wrapping_sub(1), "B", 7)?;
        Ok(Some(kab.to_plain()))
    });

    rt.spawn("S", move |p| {
        let m3 = p.receive(3, "A")?;
        let f = fields(&m3, 4)?;
        let (a, b, na) = (
            text(&f[0])?.to_owned(),
            text(&f[1])?.to_owned(),
            int(&f[2])?,
        );
        let ticket = p.crypto().decrypt(&envelope(&f[3])?, &kbs)?;
        let t = fields(&ticket, 2)?;
        require(text(&t[0])? == a, "S", 3)?;
        let kab = p.crypto().keygen_shared("shared")?;
        let for_b = PlainValue::tuple([kab.to_plain(), PlainValue::from(a.as_str()), t[1].clone()]);
        let for_b = p.crypto().encrypt(&for_b, &kbs)?;
        let for_a = PlainValue::tuple([
            PlainValue::Int(na),
            kab.to_plain(),
            PlainValue::from(b.as_str()),
            for_b.to_plain(),
        ]);
        p.send("A", 4, p.crypto().encrypt(&for_a, &kas)?.to_plain())?;
        Ok(None)
    });

    setup.finish(Protocol::NsSk, rt)
}
