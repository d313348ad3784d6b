//! Bit strings for message payloads, with exact size accounting.

use num_bigint::BigUint;

/// Ceiling of log2, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(x: u64) -> usize {
    if x <= 1 {
        0
    } else {
        (64 - (x - 1).leading_zeros()) as usize
    }
}

/// A packed bit string. Bits are appended LSB-first into 64-bit words.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn new() -> Bits {
        Bits::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Append the low `width` bits of `value`.
    pub fn push_uint(&mut self, value: u64, width: usize) {
        assert!(width <= 64);
        assert!(
            width == 64 || value < (1u64 << width),
            "value {value} does not fit {width} bits"
        );
        let mut pos = self.len;
        self.len += width;
        self.words.resize((self.len + 63) / 64, 0);
        let mut remaining = width;
        let mut v = value;
        while remaining > 0 {
            let word = pos / 64;
            let off = pos % 64;
            let take = remaining.min(64 - off);
            let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
            self.words[word] |= (v & mask) << off;
            v = if take == 64 { 0 } else { v >> take };
            pos += take;
            remaining -= take;
        }
    }

    /// Append an arbitrary-precision value as a length-prefixed blob
    /// (32-bit bit-length, then the bits). Used by exact-mode payloads
    /// where the CONGEST accounting is relaxed.
    pub fn push_biguint(&mut self, v: &BigUint) {
        let bytes = v.to_bytes_le();
        self.push_uint(bytes.len() as u64, 32);
        for b in &bytes {
            self.push_uint(*b as u64, 8);
        }
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { bits: self, pos: 0 }
    }
}

pub struct BitReader<'a> {
    bits: &'a Bits,
    pos: usize,
}

impl BitReader<'_> {
    pub fn read_uint(&mut self, width: usize) -> u64 {
        assert!(width <= 64);
        assert!(self.pos + width <= self.bits.len, "read past end of payload");
        let mut out = 0u64;
        let mut got = 0usize;
        while got < width {
            let word = self.pos / 64;
            let off = self.pos % 64;
            let take = (width - got).min(64 - off);
            let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
            out |= ((self.bits.words[word] >> off) & mask) << got;
            got += take;
            self.pos += take;
        }
        out
    }

    pub fn read_biguint(&mut self) -> BigUint {
        let nbytes = self.read_uint(32) as usize;
        let bytes: Vec<u8> = (0..nbytes).map(|_| self.read_uint(8) as u8).collect();
        BigUint::from_bytes_le(&bytes)
    }
}
