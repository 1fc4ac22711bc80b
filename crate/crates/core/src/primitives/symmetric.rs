//! Shared-key encryption: AEAD modes, classic block modes and stream ciphers.

use aes::cipher::block_padding::NoPadding;
use aes::cipher::{
    AsyncStreamCipher, BlockCipher, BlockDecryptMut, BlockEncryptMut, InnerIvInit, KeyInit,
    KeyIvInit, StreamCipher, StreamCipherCore,
};
use aes::{Aes128, Aes192, Aes256};
use aes_gcm::aead::consts::{U12, U16};
use aes_gcm::aead::generic_array::GenericArray;
use aes_gcm::aead::AeadInPlace;
use hkdf::Hkdf;
use rand::{CryptoRng, RngCore};
use sha2::Sha256;
use zeroize::Zeroizing;

use super::envelope::{associated_data, header_len, CipherEnvelope, Scheme};
use super::padding::{pad_pkcs7, unpad_pkcs7};
use crate::error::{Error, Result};
use crate::keys::KeyEnvelope;
use crate::labels::{Algorithm, Mode};

type Aes192Gcm = aes_gcm::AesGcm<Aes192, U12>;

fn provider(msg: &str) -> Error {
    Error::Provider(msg.to_owned())
}

/// Generic SIV with the nonce as the last header. The ready-made AEAD
/// wrapper in `aes_siv` only covers AES-128 and AES-256.
struct SivAes<C>(Zeroizing<Vec<u8>>, std::marker::PhantomData<C>);

macro_rules! siv_aead {
    ($($c:ty),*) => {$(
        impl aes_gcm::aead::KeySizeUser for SivAes<$c> {
            type KeySize = aes_siv::siv::KeySize<$c>;
        }
        impl KeyInit for SivAes<$c> {
            fn new(key: &aes_gcm::Key<Self>) -> Self {
                SivAes(Zeroizing::new(key.to_vec()), std::marker::PhantomData)
            }
        }
        impl aes_gcm::aead::AeadCore for SivAes<$c> {
            type NonceSize = U16;
            type TagSize = U16;
            type CiphertextOverhead = aes_gcm::aead::consts::U0;
        }
        impl AeadInPlace for SivAes<$c> {
            fn encrypt_in_place_detached(
                &self,
                nonce: &GenericArray<u8, U16>,
                ad: &[u8],
                buf: &mut [u8],
            ) -> aes_gcm::aead::Result<GenericArray<u8, U16>> {
                aes_siv::siv::CmacSiv::<$c>::new_from_slice(&self.0)
                    .map_err(|_| aes_gcm::aead::Error)?
                    .encrypt_in_place_detached(&[ad, nonce.as_slice()], buf)
            }
            fn decrypt_in_place_detached(
                &self,
                nonce: &GenericArray<u8, U16>,
                ad: &[u8],
                buf: &mut [u8],
                tag: &GenericArray<u8, U16>,
            ) -> aes_gcm::aead::Result<()> {
                aes_siv::siv::CmacSiv::<$c>::new_from_slice(&self.0)
                    .map_err(|_| aes_gcm::aead::Error)?
                    .decrypt_in_place_detached(&[ad, nonce.as_slice()], buf, tag)
            }
        }
    )*};
}

siv_aead!(Aes128, Aes192, Aes256);

fn seal_with<A: AeadInPlace + KeyInit>(
    key: &[u8],
    nonce: &[u8],
    ad: &[u8],
    data: &[u8],
) -> Result<(Vec<u8>, Vec<u8>)> {
    let cipher = A::new_from_slice(key).map_err(|_| provider("bad AEAD key length"))?;
    if nonce.len() != <A::NonceSize as aes_gcm::aead::generic_array::typenum::Unsigned>::USIZE {
        return Err(provider("bad AEAD nonce length"));
    }
    let mut buf = data.to_vec();
    let tag = cipher
        .encrypt_in_place_detached(GenericArray::from_slice(nonce), ad, &mut buf)
        .map_err(|_| provider("AEAD encryption failed"))?;
    Ok((buf, tag.to_vec()))
}

fn open_with<A: AeadInPlace + KeyInit>(
    key: &[u8],
    nonce: &[u8],
    ad: &[u8],
    body: &[u8],
    tag: &[u8],
) -> Result<Vec<u8>> {
    let cipher = A::new_from_slice(key).map_err(|_| Error::DecryptionFailure)?;
    if nonce.len() != <A::NonceSize as aes_gcm::aead::generic_array::typenum::Unsigned>::USIZE
        || tag.len() != <A::TagSize as aes_gcm::aead::generic_array::typenum::Unsigned>::USIZE
    {
        return Err(Error::DecryptionFailure);
    }
    let mut buf = body.to_vec();
    cipher
        .decrypt_in_place_detached(
            GenericArray::from_slice(nonce),
            ad,
            &mut buf,
            GenericArray::from_slice(tag),
        )
        .map_err(|_| Error::DecryptionFailure)?;
    Ok(buf)
}

macro_rules! aead_dispatch {
    ($f:ident, $mode:expr, $key:expr, $($arg:expr),*) => {{
        let key: &[u8] = $key;
        match ($mode, key.len()) {
            (Mode::Gcm, 16) => $f::<aes_gcm::Aes128Gcm>(key, $($arg),*),
            (Mode::Gcm, 24) => $f::<Aes192Gcm>(key, $($arg),*),
            (Mode::Gcm, 32) => $f::<aes_gcm::Aes256Gcm>(key, $($arg),*),
            (Mode::Ccm, 16) => $f::<ccm::Ccm<Aes128, U16, U12>>(key, $($arg),*),
            (Mode::Ccm, 24) => $f::<ccm::Ccm<Aes192, U16, U12>>(key, $($arg),*),
            (Mode::Ccm, 32) => $f::<ccm::Ccm<Aes256, U16, U12>>(key, $($arg),*),
            (Mode::Eax, 16) => $f::<eax::Eax<Aes128>>(key, $($arg),*),
            (Mode::Eax, 24) => $f::<eax::Eax<Aes192>>(key, $($arg),*),
            (Mode::Eax, 32) => $f::<eax::Eax<Aes256>>(key, $($arg),*),
            (Mode::Ocb, 16) => $f::<ocb3::Ocb3<Aes128, U12, U16>>(key, $($arg),*),
            (Mode::Ocb, 24) => $f::<ocb3::Ocb3<Aes192, U12, U16>>(key, $($arg),*),
            (Mode::Ocb, 32) => $f::<ocb3::Ocb3<Aes256, U12, U16>>(key, $($arg),*),
            // SIV takes a double-length key
            (Mode::Siv, 32) => $f::<SivAes<Aes128>>(key, $($arg),*),
            (Mode::Siv, 48) => $f::<SivAes<Aes192>>(key, $($arg),*),
            (Mode::Siv, 64) => $f::<SivAes<Aes256>>(key, $($arg),*),
            _ => Err(Error::DecryptionFailure),
        }
    }};
}

/// AES in an AEAD mode, returning (ciphertext, tag). For SIV `key` is the
/// double-length key the mode consumes.
pub fn aead_seal(
    mode: Mode,
    key: &[u8],
    nonce: &[u8],
    ad: &[u8],
    data: &[u8],
) -> Result<(Vec<u8>, Vec<u8>)> {
    if !mode.is_aead() {
        return Err(provider("not an AEAD mode"));
    }
    aead_dispatch!(seal_with, mode, key, nonce, ad, data).map_err(|e| match e {
        Error::DecryptionFailure => provider("bad AEAD key length"),
        other => other,
    })
}

pub fn aead_open(
    mode: Mode,
    key: &[u8],
    nonce: &[u8],
    ad: &[u8],
    body: &[u8],
    tag: &[u8],
) -> Result<Vec<u8>> {
    if !mode.is_aead() {
        return Err(Error::DecryptionFailure);
    }
    aead_dispatch!(open_with, mode, key, nonce, ad, body, tag)
}

/// SIV needs two subkeys; both are derived from the envelope's material.
fn siv_key(material: &[u8]) -> Zeroizing<Vec<u8>> {
    let mut out = Zeroizing::new(vec![0u8; material.len() * 2]);
    Hkdf::<Sha256>::new(None, material)
        .expand(b"siv", &mut out)
        .expect("output length is within HKDF bounds");
    out
}

fn mode_key(mode: Mode, material: &[u8]) -> Zeroizing<Vec<u8>> {
    if mode == Mode::Siv {
        siv_key(material)
    } else {
        Zeroizing::new(material.to_vec())
    }
}

fn classic_encrypt<C, K>(cipher: C, mode: Mode, header: &[u8], data: &[u8]) -> Result<Vec<u8>>
where
    C: BlockCipher + BlockEncryptMut + BlockDecryptMut + Clone,
    K: StreamCipherCore + InnerIvInit<Inner = C>,
{
    let bs = C::block_size();
    let bad_iv = |_| provider("bad IV length");
    match mode {
        Mode::Cbc => {
            let mut buf = pad_pkcs7(data, bs);
            let len = buf.len();
            cbc::Encryptor::<C>::inner_iv_slice_init(cipher, header)
                .map_err(bad_iv)?
                .encrypt_padded_mut::<NoPadding>(&mut buf, len)
                .map_err(|_| provider("CBC input not aligned"))?;
            Ok(buf)
        }
        Mode::Cfb => {
            let mut buf = data.to_vec();
            cfb_mode::Encryptor::<C>::inner_iv_slice_init(cipher, header)
                .map_err(bad_iv)?
                .encrypt(&mut buf);
            Ok(buf)
        }
        Mode::Ctr => {
            let mut buf = data.to_vec();
            let mut block = header.to_vec();
            block.resize(bs, 0);
            K::inner_iv_slice_init(cipher, &block)
                .map_err(bad_iv)?
                .apply_keystream_partial(buf.as_mut_slice().into());
            Ok(buf)
        }
        _ => Err(provider("not a classic block mode")),
    }
}

fn classic_decrypt<C, K>(cipher: C, mode: Mode, header: &[u8], body: &[u8]) -> Result<Vec<u8>>
where
    C: BlockCipher + BlockEncryptMut + BlockDecryptMut + Clone,
    K: StreamCipherCore + InnerIvInit<Inner = C>,
{
    let bs = C::block_size();
    match mode {
        Mode::Cbc => {
            let mut buf = body.to_vec();
            cbc::Decryptor::<C>::inner_iv_slice_init(cipher, header)
                .map_err(|_| Error::DecryptionFailure)?
                .decrypt_padded_mut::<NoPadding>(&mut buf)
                .map_err(|_| Error::DecryptionFailure)?;
            unpad_pkcs7(&buf, bs).ok_or(Error::DecryptionFailure)
        }
        Mode::Cfb => {
            let mut buf = body.to_vec();
            cfb_mode::Decryptor::<C>::inner_iv_slice_init(cipher, header)
                .map_err(|_| Error::DecryptionFailure)?
                .decrypt(&mut buf);
            Ok(buf)
        }
        // CTR is its own inverse
        Mode::Ctr => classic_encrypt::<C, K>(cipher, mode, header, body)
            .map_err(|_| Error::DecryptionFailure),
        _ => Err(Error::DecryptionFailure),
    }
}

macro_rules! classic_dispatch {
    ($f:ident, $alg:expr, $key:expr, $($arg:expr),*) => {{
        let key: &[u8] = $key;
        let bad = |_| Error::DecryptionFailure;
        match ($alg, key.len()) {
            (Algorithm::Aes, 16) => $f::<Aes128, ctr::CtrCore<Aes128, ctr::flavors::Ctr64BE>>(Aes128::new_from_slice(key).map_err(bad)?, $($arg),*),
            (Algorithm::Aes, 24) => $f::<Aes192, ctr::CtrCore<Aes192, ctr::flavors::Ctr64BE>>(Aes192::new_from_slice(key).map_err(bad)?, $($arg),*),
            (Algorithm::Aes, 32) => $f::<Aes256, ctr::CtrCore<Aes256, ctr::flavors::Ctr64BE>>(Aes256::new_from_slice(key).map_err(bad)?, $($arg),*),
            (Algorithm::Blowfish, _) => $f::<blowfish::Blowfish, ctr::CtrCore<blowfish::Blowfish, ctr::flavors::Ctr32BE>>(
                blowfish::Blowfish::new_from_slice(key).map_err(bad)?, $($arg),*),
            (Algorithm::TripleDes, 24) => $f::<des::TdesEde3, ctr::CtrCore<des::TdesEde3, ctr::flavors::Ctr32BE>>(
                des::TdesEde3::new_from_slice(key).map_err(bad)?, $($arg),*),
            _ => Err(Error::DecryptionFailure),
        }
    }};
}

fn stream_apply(algorithm: Algorithm, key: &[u8], nonce: &[u8], buf: &mut [u8]) -> Result<()> {
    let bad = |_| Error::DecryptionFailure;
    match algorithm {
        Algorithm::Salsa20 => salsa20::Salsa20::new_from_slices(key, nonce)
            .map_err(bad)?
            .apply_keystream(buf),
        Algorithm::ChaCha20 => chacha20::ChaCha20::new_from_slices(key, nonce)
            .map_err(bad)?
            .apply_keystream(buf),
        _ => return Err(Error::DecryptionFailure),
    }
    Ok(())
}

/// Fresh header for a shared-key encryption. CTR headers are the random top
/// half of the first counter block; the bottom half starts at zero.
fn fresh_header<R: RngCore + CryptoRng>(
    algorithm: Algorithm,
    mode: Option<Mode>,
    rng: &mut R,
) -> Result<Vec<u8>> {
    let len = header_len(algorithm, mode).ok_or_else(|| provider("no header layout"))?;
    let mut header = vec![0u8; len];
    rng.fill_bytes(&mut header);
    Ok(header)
}

pub(crate) fn encrypt<R: RngCore + CryptoRng>(
    key: &KeyEnvelope,
    data: &[u8],
    rng: &mut R,
) -> Result<CipherEnvelope> {
    let (algorithm, mode) = (key.algorithm(), key.mode());
    let scheme = Scheme::for_shared(algorithm, mode).ok_or(Error::UnsupportedOperation {
        operation: "encrypt",
        algorithm,
    })?;
    let header = fresh_header(algorithm, mode, rng)?;
    let provider_err = |e: Error| match e {
        Error::DecryptionFailure => provider("cipher setup failed"),
        other => other,
    };
    let (body, tag) = match (scheme, mode) {
        (Scheme::SharedAead, Some(m)) => {
            let k = mode_key(m, key.material());
            let (body, tag) = aead_seal(m, &k, &header, &associated_data(algorithm, mode), data)?;
            (body, Some(tag))
        }
        (Scheme::SharedClassic, Some(m)) => (
            classic_dispatch!(classic_encrypt, algorithm, key.material(), m, &header, data)
                .map_err(provider_err)?,
            None,
        ),
        (Scheme::Stream, None) => {
            let mut buf = data.to_vec();
            stream_apply(algorithm, key.material(), &header, &mut buf).map_err(provider_err)?;
            (buf, None)
        }
        _ => {
            return Err(Error::UnsupportedOperation {
                operation: "encrypt",
                algorithm,
            })
        }
    };
    Ok(CipherEnvelope::new(
        scheme, algorithm, mode, header, None, body, tag,
    ))
}

pub(crate) fn decrypt(env: &CipherEnvelope, key: &KeyEnvelope) -> Result<Vec<u8>> {
    // a key whose labels differ from the envelope is simply the wrong key
    if env.algorithm() != key.algorithm() || env.mode() != key.mode() {
        return Err(Error::DecryptionFailure);
    }
    let algorithm = env.algorithm();
    match (env.scheme(), env.mode()) {
        (Scheme::SharedAead, Some(m)) => {
            let k = mode_key(m, key.material());
            let tag = env.tag().ok_or(Error::DecryptionFailure)?;
            aead_open(m, &k, env.header(), &env.associated_data(), env.body(), tag)
        }
        (Scheme::SharedClassic, Some(m)) => {
            classic_dispatch!(
                classic_decrypt,
                algorithm,
                key.material(),
                m,
                env.header(),
                env.body()
            )
        }
        (Scheme::Stream, None) => {
            let mut buf = env.body().to_vec();
            stream_apply(algorithm, key.material(), env.header(), &mut buf)?;
            Ok(buf)
        }
        _ => Err(Error::DecryptionFailure),
    }
}
