//! Finite-field Diffie-Hellman over pre-established groups.
//!
//! The shipped groups are the 2048/3072/4096-bit MODP groups of RFC 3526
//! (safe primes, generator 2).

use std::sync::OnceLock;

use num_bigint::{BigUint, RandBigInt};
use rand::{CryptoRng, RngCore};

use crate::error::{Error, Result};

const MODP_2048: &str = concat!(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74",
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437",
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED",
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05",
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB",
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B",
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718",
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF",
);

const MODP_3072: &str = concat!(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74",
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437",
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED",
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05",
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB",
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B",
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718",
    "3995497CEA956AE515D2261898FA051015728E5A8AAAC42DAD33170D04507A33",
    "A85521ABDF1CBA64ECFB850458DBEF0A8AEA71575D060C7DB3970F85A6E1E4C7",
    "ABF5AE8CDB0933D71E8C94E04A25619DCEE3D2261AD2EE6BF12FFA06D98A0864",
    "D87602733EC86A64521F2B18177B200CBBE117577A615D6C770988C0BAD946E2",
    "08E24FA074E5AB3143DB5BFCE0FD108E4B82D120A93AD2CAFFFFFFFFFFFFFFFF",
);

const MODP_4096: &str = concat!(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74",
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437",
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED",
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05",
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB",
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B",
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718",
    "3995497CEA956AE515D2261898FA051015728E5A8AAAC42DAD33170D04507A33",
    "A85521ABDF1CBA64ECFB850458DBEF0A8AEA71575D060C7DB3970F85A6E1E4C7",
    "ABF5AE8CDB0933D71E8C94E04A25619DCEE3D2261AD2EE6BF12FFA06D98A0864",
    "D87602733EC86A64521F2B18177B200CBBE117577A615D6C770988C0BAD946E2",
    "08E24FA074E5AB3143DB5BFCE0FD108E4B82D120A92108011A723C12A787E6D7",
    "88719A10BDBA5B2699C327186AF4E23C1A946834B6150BDA2583E9CA2AD44CE8",
    "DBBBC2DB04DE8EF92E8EFC141FBECAA6287C59474E6BC05D99B2964FA090C3A2",
    "233BA186515BE7ED1F612970CEE2D7AFB81BDD762170481CD0069127D5B05AA9",
    "93B4EA988D8FDDC186FFB7DC90A6C08F4DF435C934063199FFFFFFFFFFFFFFFF",
);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DhGroup {
    name: String,
    p: BigUint,
    g: BigUint,
}

fn named_groups() -> &'static [DhGroup; 3] {
    static GROUPS: OnceLock<[DhGroup; 3]> = OnceLock::new();
    GROUPS.get_or_init(|| {
        let make = |bits: u32, hex: &str| DhGroup {
            name: format!("modp-{bits}"),
            p: BigUint::parse_bytes(hex.as_bytes(), 16).expect("group constant is valid hex"),
            g: BigUint::from(2u8),
        };
        [
            make(2048, MODP_2048),
            make(3072, MODP_3072),
            make(4096, MODP_4096),
        ]
    })
}

impl DhGroup {
    pub const NAMES: [&'static str; 3] = ["modp-2048", "modp-3072", "modp-4096"];

    /// Looks up a shipped group by name, e.g. `modp-2048`.
    pub fn named(name: &str) -> Result<&'static DhGroup> {
        let wanted = name.trim().to_ascii_lowercase().replace('_', "-");
        let wanted = match wanted
            .strip_prefix("modp")
            .map(|r| r.trim_start_matches('-'))
        {
            Some(bits) => format!("modp-{bits}"),
            None => wanted,
        };
        named_groups()
            .iter()
            .find(|g| g.name == wanted)
            .ok_or_else(|| Error::UnknownGroup(name.trim().to_owned()))
    }

    pub fn for_bits(bits: u32) -> Option<&'static DhGroup> {
        named_groups().iter().find(|g| g.bits() == bits)
    }

    /// An ad-hoc group, for tests and worked examples only.
    pub fn custom(name: &str, p: BigUint, g: BigUint) -> DhGroup {
        DhGroup {
            name: name.to_owned(),
            p,
            g,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn prime(&self) -> &BigUint {
        &self.p
    }

    pub fn generator(&self) -> &BigUint {
        &self.g
    }

    pub fn bits(&self) -> u32 {
        self.p.bits() as u32
    }

    /// Byte length of the modulus; all values are encoded at this width.
    pub fn modulus_len(&self) -> usize {
        (self.p.bits() as usize).div_ceil(8)
    }

    /// Uniform private exponent in [2, p-2].
    pub fn random_exponent<R: RngCore + CryptoRng>(&self, rng: &mut R) -> BigUint {
        rng.gen_biguint_range(&BigUint::from(2u8), &(&self.p - 1u8))
    }

    pub fn public_value(&self, x: &BigUint) -> BigUint {
        self.g.modpow(x, &self.p)
    }

    /// Rejects peer values that would pin the shared secret: 0, 1, p-1 and
    /// anything not reduced mod p.
    pub fn check_public(&self, y: &BigUint) -> Result<()> {
        let one = BigUint::from(1u8);
        if *y <= one || *y >= &self.p - 1u8 {
            return Err(Error::DegenerateValue);
        }
        Ok(())
    }

    /// `peer^x mod p`, big-endian at modulus width.
    pub fn shared_secret(&self, x: &BigUint, peer: &BigUint) -> Result<Vec<u8>> {
        self.check_public(peer)?;
        Ok(self.encode(&peer.modpow(x, &self.p)))
    }

    pub fn encode(&self, v: &BigUint) -> Vec<u8> {
        let raw = v.to_bytes_be();
        let mut out = vec![0u8; self.modulus_len().saturating_sub(raw.len())];
        out.extend_from_slice(&raw);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_groups() {
        for (name, bits) in DhGroup::NAMES.iter().zip([2048, 3072, 4096]) {
            let g = DhGroup::named(name).unwrap();
            assert_eq!(g.bits(), bits);
            assert_eq!(g.modulus_len() * 8, bits as usize);
            // RFC 3526 primes start and end with 64 one bits
            let bytes = g.prime().to_bytes_be();
            assert!(bytes[..8]
                .iter()
                .chain(&bytes[bytes.len() - 8..])
                .all(|b| *b == 0xff));
            assert_eq!(g.generator(), &BigUint::from(2u8));
        }
        assert_eq!(DhGroup::named("MODP2048").unwrap().name(), "modp-2048");
        assert!(matches!(
            DhGroup::named("bogus"),
            Err(Error::UnknownGroup(_))
        ));
    }

    #[test]
    fn modp_2048_tail_digits() {
        let hex = DhGroup::named("modp-2048")
            .unwrap()
            .prime()
            .to_str_radix(16)
            .to_uppercase();
        assert!(hex.starts_with("FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD1"));
        assert!(hex.ends_with("15728E5A8AACAA68FFFFFFFFFFFFFFFF"));
    }

    #[test]
    fn degenerate_values() {
        let g = DhGroup::custom("tiny", 23u8.into(), 5u8.into());
        let x = BigUint::from(6u8);
        for bad in [0u32, 1, 22, 23, 100] {
            assert!(matches!(
                g.shared_secret(&x, &bad.into()),
                Err(Error::DegenerateValue)
            ));
        }
    }
}
