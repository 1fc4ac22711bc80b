use rand::rngs::OsRng;
use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

/// Randomness source for key material, IVs and nonces.
///
/// Production code uses the operating system generator. The seeded variant
/// exists so protocol runs can be replayed byte for byte in tests.
#[derive(Clone, Debug, Default)]
pub enum Entropy {
    #[default]
    Os,
    Seeded(Box<ChaCha20Rng>),
}

impl Entropy {
    pub fn seeded(seed: u64) -> Self {
        Entropy::Seeded(Box::new(ChaCha20Rng::seed_from_u64(seed)))
    }

    /// Independent deterministic stream for one named participant.
    pub fn for_label(seed: u64, label: &str) -> Self {
        let mut h = Sha256::new();
        h.update(seed.to_be_bytes());
        h.update(label.as_bytes());
        Entropy::Seeded(Box::new(ChaCha20Rng::from_seed(h.finalize().into())))
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, Entropy::Seeded(_))
    }
}

impl RngCore for Entropy {
    fn next_u32(&mut self) -> u32 {
        match self {
            Entropy::Os => OsRng.next_u32(),
            Entropy::Seeded(r) => r.next_u32(),
        }
    }

    fn next_u64(&mut self) -> u64 {
        match self {
            Entropy::Os => OsRng.next_u64(),
            Entropy::Seeded(r) => r.next_u64(),
        }
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        match self {
            Entropy::Os => OsRng.fill_bytes(dest),
            Entropy::Seeded(r) => r.fill_bytes(dest),
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        match self {
            Entropy::Os => OsRng.try_fill_bytes(dest),
            Entropy::Seeded(r) => r.try_fill_bytes(dest),
        }
    }
}

impl CryptoRng for Entropy {}
