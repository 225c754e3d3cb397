//! BioHashing: orthonormal random projection followed by thresholding.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{dot, orthonormalize};
use crate::bits::BitString;
use crate::error::{check_dim, Error, Result};
use crate::rng;

/// Projection key. `basis[i]` is the unit vector `b_i`; the basis vectors are
/// the columns of the `n x l` matrix `B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BioHashKey {
    pub n: usize,
    pub l: usize,
    pub tau: f64,
    pub basis: Vec<Vec<f64>>,
    pub seed: u64,
}

impl BioHashKey {
    pub fn new(basis: Vec<Vec<f64>>, tau: f64, seed: u64) -> Result<Self> {
        let l = basis.len();
        let n = basis.first().map_or(0, Vec::len);
        if l == 0 || n == 0 {
            return Err(Error::param("basis", "must be non-empty"));
        }
        if basis.iter().any(|b| b.len() != n) {
            return Err(Error::param("basis", "ragged projection vectors"));
        }
        if l > n {
            return Err(Error::param("l", format!("{l} exceeds input dimension {n}")));
        }
        Ok(Self { n, l, tau, basis, seed })
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }

    /// Raw projections `x . b_i` before thresholding.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, x.len())?;
        Ok(self.basis.iter().map(|b| dot(x, b)).collect())
    }
}

pub fn biohash_keygen(n: usize, l: usize, tau: f64, seed: u64) -> Result<BioHashKey> {
    if l == 0 || l > n {
        return Err(Error::param("l", format!("need 1 <= l <= n, got l={l}, n={n}")));
    }
    if !tau.is_finite() {
        return Err(Error::param("tau", "must be finite"));
    }
    let mut rng = rng::stream(seed, "scheme/biohash");
    // Column-major draw: the first l columns do not depend on l.
    let mut basis: Vec<Vec<f64>> = (0..l)
        .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    orthonormalize(&mut basis)?;
    BioHashKey::new(basis, tau, seed)
}

/// Bit `i` is set iff `x . b_i - tau > 0`.
pub fn biohash_transform(x: &[f64], key: &BioHashKey) -> Result<BitString> {
    check_dim(key.n, x.len())?;
    Ok(BitString::from_bools(key.basis.iter().map(|b| dot(x, b) - key.tau > 0.0)))
}
