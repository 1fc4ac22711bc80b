//! Binary ciphertext envelope.
//!
//! ```text
//! version(1) scheme(1) algorithm(1) mode(1) header(n)
//!   [wrapped_len(4, BE) wrapped_key]   public-hybrid only
//!   body
//!   [tag(16)]                          AEAD schemes only
//! ```
//!
//! The header length is fixed by (algorithm, mode), so the layout parses
//! without any further length fields. Mode byte 0 means "no mode".

use crate::codec::PlainValue;
use crate::error::{Error, Result};
use crate::guard;
use crate::labels::{Algorithm, AlgorithmClass, Mode};

pub const ENVELOPE_VERSION: u8 = 1;
pub const TAG_LEN: usize = 16;
pub const HYBRID_NONCE_LEN: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    SharedAead,
    SharedClassic,
    Stream,
    PublicDirect,
    PublicHybrid,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::SharedAead,
        Scheme::SharedClassic,
        Scheme::Stream,
        Scheme::PublicDirect,
        Scheme::PublicHybrid,
    ];

    pub const fn id(self) -> u8 {
        match self {
            Scheme::SharedAead => 1,
            Scheme::SharedClassic => 2,
            Scheme::Stream => 3,
            Scheme::PublicDirect => 4,
            Scheme::PublicHybrid => 5,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.id() == id)
    }

    pub const fn name(self) -> &'static str {
        match self {
            Scheme::SharedAead => "shared-aead",
            Scheme::SharedClassic => "shared-classic",
            Scheme::Stream => "stream",
            Scheme::PublicDirect => "public-direct",
            Scheme::PublicHybrid => "public-hybrid",
        }
    }

    pub const fn has_tag(self) -> bool {
        matches!(self, Scheme::SharedAead | Scheme::PublicHybrid)
    }

    /// Scheme used by a shared key with the given labels.
    pub fn for_shared(algorithm: Algorithm, mode: Option<Mode>) -> Option<Scheme> {
        match (algorithm.class(), mode) {
            (AlgorithmClass::StreamCipher, None) => Some(Scheme::Stream),
            (AlgorithmClass::BlockCipher, Some(m)) if m.is_aead() => Some(Scheme::SharedAead),
            (AlgorithmClass::BlockCipher, Some(_)) => Some(Scheme::SharedClassic),
            _ => None,
        }
    }
}

/// Header length dictated by (algorithm, mode); `None` for combinations no
/// scheme uses.
pub fn header_len(algorithm: Algorithm, mode: Option<Mode>) -> Option<usize> {
    let block = algorithm.block_size();
    match (algorithm, mode) {
        (Algorithm::Salsa20, None) => Some(8),
        (Algorithm::ChaCha20, None) => Some(12),
        (Algorithm::Rsa, None) => Some(0),
        (Algorithm::Rsa, Some(Mode::Gcm)) => Some(HYBRID_NONCE_LEN),
        (_, Some(m)) if block.is_some() && guard::allowed_modes(algorithm).contains(&m) => {
            let block = block.unwrap_or(0);
            Some(match m {
                Mode::Cbc | Mode::Cfb => block,
                Mode::Ctr => block / 2,
                Mode::Gcm | Mode::Ccm | Mode::Ocb => 12,
                Mode::Eax | Mode::Siv => 16,
            })
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CipherEnvelope {
    version: u8,
    scheme: Scheme,
    algorithm: Algorithm,
    mode: Option<Mode>,
    header: Vec<u8>,
    wrapped_key: Option<Vec<u8>>,
    body: Vec<u8>,
    tag: Option<Vec<u8>>,
}

fn structure_ok(
    scheme: Scheme,
    algorithm: Algorithm,
    mode: Option<Mode>,
    header: &[u8],
    wrapped_key: Option<&[u8]>,
    body: &[u8],
    tag: Option<&[u8]>,
) -> bool {
    let scheme_fits = match scheme {
        Scheme::PublicDirect => algorithm == Algorithm::Rsa && mode.is_none(),
        Scheme::PublicHybrid => algorithm == Algorithm::Rsa && mode == Some(Mode::Gcm),
        _ => Scheme::for_shared(algorithm, mode) == Some(scheme),
    };
    let body_fits = match (scheme, mode) {
        (Scheme::SharedClassic, Some(Mode::Cbc)) => {
            let bs = algorithm.block_size().unwrap_or(1);
            !body.is_empty() && body.len() % bs == 0
        }
        (Scheme::PublicDirect, _) => !body.is_empty(),
        _ => true,
    };
    scheme_fits
        && body_fits
        && header_len(algorithm, mode) == Some(header.len())
        && (scheme == Scheme::PublicHybrid) == wrapped_key.is_some_and(|w| !w.is_empty())
        && scheme.has_tag() == tag.is_some_and(|t| t.len() == TAG_LEN)
}

impl CipherEnvelope {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        scheme: Scheme,
        algorithm: Algorithm,
        mode: Option<Mode>,
        header: Vec<u8>,
        wrapped_key: Option<Vec<u8>>,
        body: Vec<u8>,
        tag: Option<Vec<u8>>,
    ) -> Self {
        debug_assert!(structure_ok(
            scheme,
            algorithm,
            mode,
            &header,
            wrapped_key.as_deref(),
            &body,
            tag.as_deref()
        ));
        CipherEnvelope {
            version: ENVELOPE_VERSION,
            scheme,
            algorithm,
            mode,
            header,
            wrapped_key,
            body,
            tag,
        }
    }

    pub fn version(&self) -> u8 {
        self.version
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn mode(&self) -> Option<Mode> {
        self.mode
    }

    /// IV, counter prefix or nonce, depending on the mode.
    pub fn header(&self) -> &[u8] {
        &self.header
    }

    pub fn wrapped_key(&self) -> Option<&[u8]> {
        self.wrapped_key.as_deref()
    }

    pub fn body(&self) -> &[u8] {
        &self.body
    }

    pub fn tag(&self) -> Option<&[u8]> {
        self.tag.as_deref()
    }

    /// Bytes authenticated alongside the body in AEAD schemes.
    pub fn associated_data(&self) -> [u8; 3] {
        associated_data(self.algorithm, self.mode)
    }

    /// For CTR envelopes, the first counter block: the random prefix from the
    /// header followed by zero bytes.
    pub fn initial_counter_block(&self) -> Option<Vec<u8>> {
        if self.mode != Some(Mode::Ctr) {
            return None;
        }
        let mut block = self.header.clone();
        block.resize(self.algorithm.block_size()?, 0);
        Some(block)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(
            4 + self.header.len()
                + self.body.len()
                + TAG_LEN
                + self.wrapped_key.as_ref().map_or(0, |w| 4 + w.len()),
        );
        out.extend_from_slice(&[
            self.version,
            self.scheme.id(),
            self.algorithm.id(),
            self.mode.map_or(0, Mode::id),
        ]);
        out.extend_from_slice(&self.header);
        if let Some(w) = &self.wrapped_key {
            out.extend_from_slice(&(w.len() as u32).to_be_bytes());
            out.extend_from_slice(w);
        }
        out.extend_from_slice(&self.body);
        if let Some(t) = &self.tag {
            out.extend_from_slice(t);
        }
        out
    }

    /// Parses an envelope. Every structural problem is reported as the same
    /// [`Error::DecryptionFailure`] as a failed tag or padding check.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::parse(bytes).ok_or(Error::DecryptionFailure)
    }

    fn parse(bytes: &[u8]) -> Option<Self> {
        let (&[version, scheme, alg, mode], rest) = (bytes.get(..4)?.try_into().ok()?, &bytes[4..]);
        if version != ENVELOPE_VERSION {
            return None;
        }
        let scheme = Scheme::from_id(scheme)?;
        let algorithm = Algorithm::from_id(alg)?;
        let mode = if mode == 0 {
            None
        } else {
            Some(Mode::from_id(mode)?)
        };
        let hlen = header_len(algorithm, mode)?;
        let (header, mut rest) = (rest.get(..hlen)?, rest.get(hlen..)?);
        let mut wrapped_key = None;
        if scheme == Scheme::PublicHybrid {
            let len = u32::from_be_bytes(rest.get(..4)?.try_into().ok()?) as usize;
            let tail = &rest[4..];
            wrapped_key = Some(tail.get(..len)?.to_vec());
            rest = tail.get(len..)?;
        }
        let (body, tag) = if scheme.has_tag() {
            let split = rest.len().checked_sub(TAG_LEN)?;
            (&rest[..split], Some(rest[split..].to_vec()))
        } else {
            (rest, None)
        };
        if !structure_ok(
            scheme,
            algorithm,
            mode,
            header,
            wrapped_key.as_deref(),
            body,
            tag.as_deref(),
        ) {
            return None;
        }
        Some(CipherEnvelope {
            version,
            scheme,
            algorithm,
            mode,
            header: header.to_vec(),
            wrapped_key,
            body: body.to_vec(),
            tag,
        })
    }

    /// Envelopes travel inside other values as a byte string.
    pub fn to_plain(&self) -> PlainValue {
        PlainValue::Bytes(self.to_bytes())
    }

    pub fn from_plain(value: &PlainValue) -> Result<Self> {
        value
            .as_bytes()
            .ok_or(Error::DecryptionFailure)
            .and_then(Self::from_bytes)
    }
}

impl From<&CipherEnvelope> for PlainValue {
    fn from(env: &CipherEnvelope) -> Self {
        env.to_plain()
    }
}

pub(crate) fn associated_data(algorithm: Algorithm, mode: Option<Mode>) -> [u8; 3] {
    [ENVELOPE_VERSION, algorithm.id(), mode.map_or(0, Mode::id)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_lengths() {
        assert_eq!(header_len(Algorithm::Aes, Some(Mode::Cbc)), Some(16));
        assert_eq!(header_len(Algorithm::Aes, Some(Mode::Ctr)), Some(8));
        assert_eq!(header_len(Algorithm::Aes, Some(Mode::Gcm)), Some(12));
        assert_eq!(header_len(Algorithm::Blowfish, Some(Mode::Cfb)), Some(8));
        assert_eq!(header_len(Algorithm::TripleDes, Some(Mode::Ctr)), Some(4));
        assert_eq!(header_len(Algorithm::TripleDes, Some(Mode::Gcm)), None);
        assert_eq!(header_len(Algorithm::Salsa20, None), Some(8));
        assert_eq!(header_len(Algorithm::ChaCha20, None), Some(12));
        assert_eq!(header_len(Algorithm::Hmac, None), None);
    }

    #[test]
    fn layout_round_trip() {
        let env = CipherEnvelope::new(
            Scheme::PublicHybrid,
            Algorithm::Rsa,
            Some(Mode::Gcm),
            vec![7; 12],
            Some(vec![9; 256]),
            vec![1, 2, 3],
            Some(vec![5; 16]),
        );
        let bytes = env.to_bytes();
        assert_eq!(&bytes[..4], &[1, 5, 7, 5]);
        assert_eq!(&bytes[16..20], &256u32.to_be_bytes());
        assert_eq!(bytes.len(), 4 + 12 + 4 + 256 + 3 + 16);
        assert_eq!(CipherEnvelope::from_bytes(&bytes).unwrap(), env);
    }

    #[test]
    fn malformed_is_decryption_failure() {
        let env = CipherEnvelope::new(
            Scheme::SharedClassic,
            Algorithm::Aes,
            Some(Mode::Cbc),
            vec![0; 16],
            None,
            vec![0; 32],
            None,
        );
        let bytes = env.to_bytes();
        for bad in [&bytes[..3], &bytes[..bytes.len() - 1], &[2, 2, 1, 1][..]] {
            assert!(matches!(
                CipherEnvelope::from_bytes(bad),
                Err(Error::DecryptionFailure)
            ));
        }
        let mut wrong_scheme = bytes.clone();
        wrong_scheme[1] = 1;
        assert!(matches!(
            CipherEnvelope::from_bytes(&wrong_scheme),
            Err(Error::DecryptionFailure)
        ));
    }

    #[test]
    fn counter_block() {
        let env = CipherEnvelope::new(
            Scheme::SharedClassic,
            Algorithm::Aes,
            Some(Mode::Ctr),
            vec![0xab; 8],
            None,
            vec![1],
            None,
        );
        let block = env.initial_counter_block().unwrap();
        assert_eq!(&block[..8], &[0xab; 8]);
        assert_eq!(&block[8..], &[0; 8]);
    }
}
