//! Bloom-filter templates for binary codes.
//!
//! Columns are permuted by the key, split into blocks of `block_size`
//! consecutive columns, and each column's top `word_size` bits are read as an
//! integer (row 0 is the most significant bit), XORed with the key mask, and
//! used as an index into the block's `2^word_size`-bit filter.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{BinaryCode, BitString};
use crate::error::{check_dim, Error, Result};
use crate::rng;

const MAX_WORD_SIZE: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BloomKey {
    pub height: usize,
    pub width: usize,
    pub word_size: usize,
    pub block_size: usize,
    /// Application key, `word_size` bits, most significant first.
    pub xor_mask: BitString,
    /// Permuted column `k` is original column `perm[k]`.
    pub perm: Vec<usize>,
    pub seed: u64,
}

impl BloomKey {
    pub fn new(height: usize, width: usize, word_size: usize, block_size: usize, xor_mask: BitString, perm: Vec<usize>) -> Result<Self> {
        if word_size == 0 || word_size > height || word_size > MAX_WORD_SIZE {
            return Err(Error::param(
                "word_size",
                format!("need 1 <= word_size <= min(height={height}, {MAX_WORD_SIZE}), got {word_size}"),
            ));
        }
        if block_size == 0 || width % block_size != 0 {
            return Err(Error::param("block_size", format!("{block_size} does not divide width {width}")));
        }
        if xor_mask.len() != word_size {
            return Err(Error::param("xor_mask", format!("must hold {word_size} bits")));
        }
        if !is_permutation(&perm, width) {
            return Err(Error::param("perm", "not a permutation of the code columns"));
        }
        Ok(Self {
            height,
            width,
            word_size,
            block_size,
            xor_mask,
            perm,
            seed: 0,
        })
    }

    pub fn n_blocks(&self) -> usize {
        self.width / self.block_size
    }

    fn mask_value(&self) -> usize {
        self.xor_mask.iter().fold(0, |acc, b| (acc << 1) | b as usize)
    }

    /// Same key with the XOR mask replaced.
    pub fn with_xor_mask(&self, xor_mask: BitString) -> Result<Self> {
        let mut k = Self::new(self.height, self.width, self.word_size, self.block_size, xor_mask, self.perm.clone())?;
        k.seed = self.seed;
        Ok(k)
    }

    /// Same key with the column permutation replaced.
    pub fn with_perm(&self, perm: Vec<usize>) -> Result<Self> {
        let mut k = Self::new(self.height, self.width, self.word_size, self.block_size, self.xor_mask.clone(), perm)?;
        k.seed = self.seed;
        Ok(k)
    }
}

pub(crate) fn is_permutation(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    perm.iter().all(|&p| p < n && !std::mem::replace(&mut seen[p], true))
}

pub fn bloom_keygen(height: usize, width: usize, word_size: usize, block_size: usize, seed: u64) -> Result<BloomKey> {
    let mut rng = rng::stream(seed, "scheme/bloom");
    let xor_mask = BitString::from_bools((0..word_size).map(|_| rng.random::<bool>()));
    let mut perm: Vec<usize> = (0..width).collect();
    perm.shuffle(&mut rng);
    let mut key = BloomKey::new(height, width, word_size, block_size, xor_mask, perm)?;
    key.seed = seed;
    Ok(key)
}

pub fn bloom_transform(code: &BinaryCode, key: &BloomKey) -> Result<Vec<BitString>> {
    check_dim(key.height, code.height())?;
    check_dim(key.width, code.width())?;
    let mask = key.mask_value();
    let mut filters = vec![BitString::zeros(1 << key.word_size); key.n_blocks()];
    for (k, &col) in key.perm.iter().enumerate() {
        let word = (0..key.word_size).fold(0usize, |acc, r| (acc << 1) | code.get(r, col) as usize);
        filters[k / key.block_size].set(word ^ mask, true);
    }
    Ok(filters)
}

/// Mean over blocks of `|b1 XOR b2| / (|b1| + |b2|)`.
pub fn bloom_dissimilarity(a: &[BitString], b: &[BitString]) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    if a.is_empty() {
        return Err(Error::param("bloom template", "no blocks"));
    }
    let mut total = 0.0;
    for (x, y) in a.iter().zip(b) {
        check_dim(x.len(), y.len())?;
        let weight = x.count_ones() + y.count_ones();
        if weight > 0 {
            total += x.hamming(y) as f64 / weight as f64;
        }
    }
    Ok(total / a.len() as f64)
}

pub fn bloom_similarity(a: &[BitString], b: &[BitString]) -> Result<f64> {
    bloom_dissimilarity(a, b).map(|d| 1.0 - d)
}
