//! Index-of-Max hashing: argmax over repeated Gaussian projections.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::dot;
use crate::error::{check_dim, Error, Result};
use crate::rng;

/// `matrices[j][k]` is row `k` of the `q x n` Gaussian matrix `W_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IoMKey {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub matrices: Vec<Vec<Vec<f64>>>,
    pub seed: u64,
}

impl IoMKey {
    pub fn new(matrices: Vec<Vec<Vec<f64>>>, seed: u64) -> Result<Self> {
        let m = matrices.len();
        if m == 0 {
            return Err(Error::param("m", "need at least one projection matrix"));
        }
        let q = matrices[0].len();
        if q < 2 {
            return Err(Error::param("q", "need at least two rows per matrix"));
        }
        let n = matrices[0][0].len();
        if matrices.iter().any(|w| w.len() != q || w.iter().any(|r| r.len() != n)) {
            return Err(Error::param("matrices", "inconsistent shapes"));
        }
        Ok(Self { n, m, q, matrices, seed })
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }
}

pub fn iom_keygen(n: usize, m: usize, q: usize, seed: u64) -> Result<IoMKey> {
    if n == 0 || m == 0 || q < 2 {
        return Err(Error::param("iom", format!("need n >= 1, m >= 1, q >= 2 (n={n}, m={m}, q={q})")));
    }
    let mut rng = rng::stream(seed, "scheme/iom");
    let matrices = (0..m)
        .map(|_| {
            (0..q)
                .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
                .collect()
        })
        .collect();
    IoMKey::new(matrices, seed)
}

/// Entry `j` is the index of the largest of the `q` products `W_j x`; ties go to
/// the smallest index.
pub fn iom_transform(x: &[f64], key: &IoMKey) -> Result<Vec<i32>> {
    check_dim(key.n, x.len())?;
    Ok(key
        .matrices
        .iter()
        .map(|w| {
            let mut best = 0usize;
            let mut best_val = f64::NEG_INFINITY;
            for (k, row) in w.iter().enumerate() {
                let v = dot(row, x);
                if v > best_val {
                    best = k;
                    best_val = v;
                }
            }
            best as i32
        })
        .collect())
}

/// Fraction of positions holding the same index.
pub fn iom_similarity(a: &[i32], b: &[i32]) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    if a.is_empty() {
        return Err(Error::param("iom template", "empty operands"));
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / a.len() as f64)
}
