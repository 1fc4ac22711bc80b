//! PKCS#7 padding: append N bytes of value N, where
//! N = block_size - (len % block_size), so a full block is added when the
//! input is already aligned.

use subtle::{Choice, ConditionallySelectable, ConstantTimeEq, ConstantTimeLess};

pub fn pad_pkcs7(data: &[u8], block_size: usize) -> Vec<u8> {
    assert!(
        (1..=255).contains(&block_size),
        "block size must be in 1..=255"
    );
    let n = block_size - data.len() % block_size;
    let mut out = Vec::with_capacity(data.len() + n);
    out.extend_from_slice(data);
    out.resize(data.len() + n, n as u8);
    out
}

/// Strips PKCS#7 padding. The check runs in time independent of the padding
/// value; any failure yields `None` with no further detail.
pub fn unpad_pkcs7(data: &[u8], block_size: usize) -> Option<Vec<u8>> {
    assert!(
        (1..=255).contains(&block_size),
        "block size must be in 1..=255"
    );
    if data.is_empty() || data.len() % block_size != 0 {
        return None;
    }
    let last_block = &data[data.len() - block_size..];
    let n = last_block[block_size - 1];
    let mut ok = !n.ct_eq(&0) & !(block_size as u8).ct_lt(&n);
    for (i, byte) in last_block.iter().rev().enumerate() {
        // positions inside the claimed padding must equal n
        let inside = (i as u8).ct_lt(&n);
        let matches = byte.ct_eq(&n);
        ok &= Choice::conditional_select(&Choice::from(1), &matches, inside);
    }
    if bool::from(ok) {
        Some(data[..data.len() - n as usize].to_vec())
    } else {
        None
    }
}
