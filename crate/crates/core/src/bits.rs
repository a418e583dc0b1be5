//! Fixed-length binary strings used in protocol transcripts and channel
//! messages, plus the integer log helpers the bit accounting is built on.

use serde::{Deserialize, Serialize};
use std::fmt;

/// `ceil(log2(x))` for `x >= 1`, with `ceil_log2(1) == 0`.
///
/// Panics on `x == 0`.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1, "ceil_log2 is undefined for 0");
    u64::BITS - (x - 1).leading_zeros()
}

/// A binary string of explicit length, most significant bit first.
///
/// Zero-length values are legal: a party whose codeword length works out to
/// zero bits still "sends" an entry in the transcript.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bits(String);

impl Bits {
    pub fn empty() -> Self {
        Bits(String::new())
    }

    /// A single-bit string.
    pub fn single(bit: u8) -> Self {
        debug_assert!(bit <= 1);
        Bits(if bit == 0 { "0".into() } else { "1".into() })
    }

    /// Big-endian fixed-width encoding of `value` into `len` bits.
    ///
    /// Panics if `value` does not fit.
    pub fn encode_be(value: u64, len: u32) -> Self {
        assert!(len <= 64, "bit width {len} exceeds u64");
        assert!(
            len == 64 || value < (1u64 << len),
            "value {value} does not fit in {len} bits"
        );
        let mut s = String::with_capacity(len as usize);
        for i in (0..len).rev() {
            s.push(if (value >> i) & 1 == 1 { '1' } else { '0' });
        }
        Bits(s)
    }

    /// Big-endian integer value of the string. Empty decodes to 0.
    pub fn decode_be(&self) -> u64 {
        assert!(self.len() <= 64, "bit string too wide for u64");
        self.0
            .bytes()
            .fold(0u64, |acc, b| (acc << 1) | u64::from(b == b'1'))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bit at `pos`, counted from the most significant end (0-based).
    pub fn bit(&self, pos: usize) -> u8 {
        u8::from(self.0.as_bytes()[pos] == b'1')
    }

    pub fn push_bit(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        self.0.push(if bit == 0 { '0' } else { '1' });
    }

    pub fn extend(&mut self, other: &Bits) {
        self.0.push_str(&other.0);
    }

    pub fn concat(mut self, other: &Bits) -> Bits {
        self.extend(other);
        self
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Position of the first bit (from the most significant end) at which two
/// equal-length strings differ, or `None` if they are identical.
pub fn first_diff(a: &Bits, b: &Bits) -> Option<usize> {
    assert_eq!(a.len(), b.len(), "first_diff requires equal lengths");
    a.0.bytes().zip(b.0.bytes()).position(|(x, y)| x != y)
}
