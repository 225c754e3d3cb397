//! Packed bit strings and binary code matrices.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A fixed-length bit string packed into 64-bit words, bit `i` stored in word
/// `i / 64` at position `i % 64`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut out = Self::zeros(0);
        for b in bits {
            out.push(b);
        }
        out
    }

    /// Parses a string of `'0'`/`'1'` characters.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::format("bit string", format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_bools)
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        let i = self.len;
        self.len += 1;
        self.set(i, bit);
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// Number of positions where the two strings differ. Panics on length mismatch;
    /// use [`crate::synthdata::normalized_hamming`] for the checked variant.
    pub fn hamming(&self, other: &Self) -> usize {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn to_bit_chars(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bit_chars())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BitString::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A binary code matrix (IrisCode stand-in) with `height` rows and `width`
/// columns, stored row-major with one byte (0 or 1) per entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryCode {
    height: usize,
    width: usize,
    #[serde(with = "byte_bits")]
    bits: Vec<u8>,
}

impl BinaryCode {
    pub fn new(height: usize, width: usize, bits: Vec<u8>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::param("height/width", "binary codes must be non-empty"));
        }
        if bits.len() != height * width {
            return Err(Error::Dimension {
                expected: height * width,
                actual: bits.len(),
            });
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::param("bits", "entries must be 0 or 1"));
        }
        Ok(Self { height, width, bits })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            bits: vec![0; height * width],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.bits[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, bit: u8) {
        self.bits[row * self.width + col] = bit & 1;
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.bits[row * self.width..(row + 1) * self.width]
    }
}

mod byte_bits {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bits: &[u8], s: S) -> Result<S::Ok, S::Error> {
        let text: String = bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
        s.serialize_str(&text)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(serde::de::Error::custom(format!("unexpected bit {other:?}"))),
            })
            .collect()
    }
}
