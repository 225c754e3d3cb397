//! Indexing-First-One hashing for binary codes.
//!
//! For each of `m` repetitions, `P` column permutations are applied to the
//! code and multiplied element-wise. In every row the first `K` entries of the
//! product are scanned for the first 1; its 0-based position is reduced modulo
//! `K - tau`. Rows without a 1 in the window get [`IFO_SENTINEL`]. The output is
//! row-major with `height` rows and `m` columns.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::bloom::is_permutation;
use crate::bits::BinaryCode;
use crate::error::{check_dim, Error, Result};
use crate::rng;

pub const IFO_SENTINEL: i32 = -1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfoKey {
    pub height: usize,
    pub width: usize,
    pub window: usize,
    pub tau: usize,
    /// `perm_sets[rep][p]` is a column permutation of width `width`.
    pub perm_sets: Vec<Vec<Vec<usize>>>,
    pub seed: u64,
}

impl IfoKey {
    pub fn new(height: usize, width: usize, window: usize, tau: usize, perm_sets: Vec<Vec<Vec<usize>>>, seed: u64) -> Result<Self> {
        if window == 0 || window > width {
            return Err(Error::param("window", format!("need 1 <= K <= width={width}, got {window}")));
        }
        if window < tau + 2 {
            return Err(Error::param("tau", format!("K - tau must be at least 2 (K={window}, tau={tau})")));
        }
        if perm_sets.is_empty() || perm_sets.iter().any(Vec::is_empty) {
            return Err(Error::param("perm_sets", "need m >= 1 sets of P >= 1 permutations"));
        }
        if perm_sets.iter().flatten().any(|p| !is_permutation(p, width)) {
            return Err(Error::param("perm_sets", "every permutation must be a bijection on the columns"));
        }
        Ok(Self {
            height,
            width,
            window,
            tau,
            perm_sets,
            seed,
        })
    }

    pub fn m(&self) -> usize {
        self.perm_sets.len()
    }

    pub fn modulus(&self) -> i32 {
        (self.window - self.tau) as i32
    }
}

pub fn ifo_keygen(height: usize, width: usize, m: usize, p: usize, window: usize, tau: usize, seed: u64) -> Result<IfoKey> {
    let mut rng = rng::stream(seed, "scheme/ifo");
    let perm_sets = (0..m)
        .map(|_| {
            (0..p)
                .map(|_| {
                    let mut perm: Vec<usize> = (0..width).collect();
                    perm.shuffle(&mut rng);
                    perm
                })
                .collect()
        })
        .collect();
    IfoKey::new(height, width, window, tau, perm_sets, seed)
}

pub fn ifo_transform(code: &BinaryCode, key: &IfoKey) -> Result<Vec<i32>> {
    check_dim(key.height, code.height())?;
    check_dim(key.width, code.width())?;
    let modulus = key.modulus();
    let mut out = vec![IFO_SENTINEL; key.height * key.m()];
    for row in 0..key.height {
        let bits = code.row(row);
        for (rep, perms) in key.perm_sets.iter().enumerate() {
            let first = (0..key.window).find(|&c| perms.iter().all(|p| bits[p[c]] == 1));
            if let Some(c) = first {
                out[row * key.m() + rep] = c as i32 % modulus;
            }
        }
    }
    Ok(out)
}

/// Collision fraction over positions where at least one side is not the
/// sentinel; sentinel entries never match.
pub fn ifo_similarity(a: &[i32], b: &[i32]) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    let mut considered = 0usize;
    let mut hits = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        if x == IFO_SENTINEL && y == IFO_SENTINEL {
            continue;
        }
        considered += 1;
        if x == y {
            hits += 1;
        }
    }
    Ok(if considered == 0 { 0.0 } else { hits as f64 / considered as f64 })
}
