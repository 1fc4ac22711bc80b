//! Canonical tag-length-value encoding of plaintext values.
//!
//! Layout: one tag byte, a 4-byte big-endian length, then the payload.
//!
//! | tag  | value  | length field          | payload                        |
//! |------|--------|-----------------------|--------------------------------|
//! | 0x01 | bytes  | byte count            | raw bytes                      |
//! | 0x02 | string | byte count            | UTF-8                          |
//! | 0x03 | int    | 8                     | i64, big-endian two's complement |
//! | 0x04 | bool   | 1                     | 0x00 or 0x01                   |
//! | 0x05 | tuple  | element count         | encoded elements, in order     |
//!
//! Decoding is strict: every value has exactly one accepted encoding, so the
//! encoding is injective and trailing bytes are rejected.

use std::fmt;

const TAG_BYTES: u8 = 0x01;
const TAG_STRING: u8 = 0x02;
const TAG_INT: u8 = 0x03;
const TAG_BOOL: u8 = 0x04;
const TAG_TUPLE: u8 = 0x05;
const HEADER_LEN: usize = 5;

/// Tuples may nest at most this deep.
pub const MAX_DEPTH: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("malformed encoding: {0}")]
    MalformedEncoding(String),
    #[error("unsupported type: {0}")]
    UnsupportedType(String),
    #[error("tuple nesting exceeds {MAX_DEPTH} levels")]
    DepthExceeded,
}

fn malformed(msg: impl Into<String>) -> CodecError {
    CodecError::MalformedEncoding(msg.into())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PlainValue {
    Bytes(Vec<u8>),
    Str(String),
    Int(i64),
    Bool(bool),
    Tuple(Vec<PlainValue>),
}

impl PlainValue {
    pub fn tuple(items: impl IntoIterator<Item = PlainValue>) -> Self {
        PlainValue::Tuple(items.into_iter().collect())
    }

    /// Nesting depth; scalars are 0 and each tuple level adds one.
    pub fn depth(&self) -> usize {
        match self {
            PlainValue::Tuple(items) => 1 + items.iter().map(PlainValue::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn as_bytes(&self) -> Option<&[u8]> {
        match self {
            PlainValue::Bytes(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            PlainValue::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            PlainValue::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            PlainValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[PlainValue]> {
        match self {
            PlainValue::Tuple(items) => Some(items),
            _ => None,
        }
    }

    /// Borrows the elements of a tuple with exactly `n` elements.
    pub fn expect_tuple(&self, n: usize) -> Result<&[PlainValue], CodecError> {
        match self {
            PlainValue::Tuple(items) if items.len() == n => Ok(items),
            _ => Err(malformed(format!("expected a {n}-tuple"))),
        }
    }
}

impl From<&str> for PlainValue {
    fn from(s: &str) -> Self {
        PlainValue::Str(s.to_owned())
    }
}

impl From<String> for PlainValue {
    fn from(s: String) -> Self {
        PlainValue::Str(s)
    }
}

impl From<Vec<u8>> for PlainValue {
    fn from(b: Vec<u8>) -> Self {
        PlainValue::Bytes(b)
    }
}

impl From<&[u8]> for PlainValue {
    fn from(b: &[u8]) -> Self {
        PlainValue::Bytes(b.to_vec())
    }
}

impl From<i64> for PlainValue {
    fn from(i: i64) -> Self {
        PlainValue::Int(i)
    }
}

impl From<bool> for PlainValue {
    fn from(b: bool) -> Self {
        PlainValue::Bool(b)
    }
}

impl TryFrom<u64> for PlainValue {
    type Error = CodecError;

    fn try_from(v: u64) -> Result<Self, CodecError> {
        i64::try_from(v).map(PlainValue::Int).map_err(|_| {
            CodecError::UnsupportedType(format!("{v} does not fit a signed 64-bit integer"))
        })
    }
}

impl fmt::Display for PlainValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlainValue::Bytes(b) => {
                f.write_str("0x")?;
                for byte in b.iter().take(32) {
                    write!(f, "{byte:02x}")?;
                }
                if b.len() > 32 {
                    write!(f, "..({} bytes)", b.len())?;
                }
                Ok(())
            }
            PlainValue::Str(s) => write!(f, "{s:?}"),
            PlainValue::Int(i) => write!(f, "{i}"),
            PlainValue::Bool(b) => write!(f, "{b}"),
            PlainValue::Tuple(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                if items.len() == 1 {
                    f.write_str(",")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn len_u32(n: usize) -> Result<[u8; 4], CodecError> {
    u32::try_from(n)
        .map(u32::to_be_bytes)
        .map_err(|_| CodecError::UnsupportedType(format!("length {n} exceeds 32 bits")))
}

pub fn encode(value: &PlainValue) -> Result<Vec<u8>, CodecError> {
    let mut out = Vec::new();
    encode_into(value, &mut out)?;
    Ok(out)
}

pub fn encode_into(value: &PlainValue, out: &mut Vec<u8>) -> Result<(), CodecError> {
    if value.depth() > MAX_DEPTH {
        return Err(CodecError::DepthExceeded);
    }
    write_value(value, out)
}

fn write_value(value: &PlainValue, out: &mut Vec<u8>) -> Result<(), CodecError> {
    match value {
        PlainValue::Bytes(b) => {
            out.push(TAG_BYTES);
            out.extend_from_slice(&len_u32(b.len())?);
            out.extend_from_slice(b);
        }
        PlainValue::Str(s) => {
            out.push(TAG_STRING);
            out.extend_from_slice(&len_u32(s.len())?);
            out.extend_from_slice(s.as_bytes());
        }
        PlainValue::Int(i) => {
            out.push(TAG_INT);
            out.extend_from_slice(&8u32.to_be_bytes());
            out.extend_from_slice(&i.to_be_bytes());
        }
        PlainValue::Bool(b) => {
            out.push(TAG_BOOL);
            out.extend_from_slice(&1u32.to_be_bytes());
            out.push(u8::from(*b));
        }
        PlainValue::Tuple(items) => {
            out.push(TAG_TUPLE);
            out.extend_from_slice(&len_u32(items.len())?);
            for item in items {
                write_value(item, out)?;
            }
        }
    }
    Ok(())
}

pub fn decode(bytes: &[u8]) -> Result<PlainValue, CodecError> {
    let mut reader = Reader { buf: bytes, pos: 0 };
    let value = reader.value(0)?;
    if reader.pos != bytes.len() {
        return Err(malformed(format!(
            "{} trailing bytes",
            bytes.len() - reader.pos
        )));
    }
    Ok(value)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        let end = self.pos.checked_add(n).filter(|e| *e <= self.buf.len());
        let end = end.ok_or_else(|| malformed("payload shorter than its length field"))?;
        let slice = &self.buf[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn value(&mut self, depth: usize) -> Result<PlainValue, CodecError> {
        let header = self
            .take(HEADER_LEN)
            .map_err(|_| malformed("truncated header"))?;
        let tag = header[0];
        let len = u32::from_be_bytes([header[1], header[2], header[3], header[4]]) as usize;
        match tag {
            TAG_BYTES => Ok(PlainValue::Bytes(self.take(len)?.to_vec())),
            TAG_STRING => {
                let raw = self.take(len)?;
                std::str::from_utf8(raw)
                    .map(|s| PlainValue::Str(s.to_owned()))
                    .map_err(|_| malformed("string is not UTF-8"))
            }
            TAG_INT => {
                if len != 8 {
                    return Err(malformed("integer length must be 8"));
                }
                let raw = self.take(8)?;
                let mut b = [0u8; 8];
                b.copy_from_slice(raw);
                Ok(PlainValue::Int(i64::from_be_bytes(b)))
            }
            TAG_BOOL => {
                if len != 1 {
                    return Err(malformed("boolean length must be 1"));
                }
                match self.take(1)?[0] {
                    0 => Ok(PlainValue::Bool(false)),
                    1 => Ok(PlainValue::Bool(true)),
                    other => Err(malformed(format!("boolean byte {other:#04x}"))),
                }
            }
            TAG_TUPLE => {
                if depth >= MAX_DEPTH {
                    return Err(CodecError::DepthExceeded);
                }
                // every element needs at least a header
                let remaining = self.buf.len() - self.pos;
                if len > remaining / HEADER_LEN {
                    return Err(malformed("tuple count exceeds remaining input"));
                }
                let mut items = Vec::with_capacity(len);
                for _ in 0..len {
                    items.push(self.value(depth + 1)?);
                }
                Ok(PlainValue::Tuple(items))
            }
            other => Err(malformed(format!("unknown tag {other:#04x}"))),
        }
    }
}
