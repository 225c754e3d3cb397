//! Non-linear multi-dimensional spectral hashing.
//!
//! Features are first rotated by a seeded random orthonormal matrix (the
//! revocable key). On each rotated coordinate `i` the data range `[a_i, b_i]`
//! is learned from training data and the closed-form one-dimensional
//! eigenfunctions of a uniform density on that range are used:
//!
//! ```text
//! phi_ij(x)    = sin(pi/2 + j * pi * (x - a_i) / (b_i - a_i)),   j = 1, 2, ...
//! lambda_ij    = 1 - exp(-(eps^2 / 2) * (j * pi / (b_i - a_i))^2), eps = 0.1
//! ```
//!
//! Eigenpairs are sorted by ascending eigenvalue and the first `l` form the
//! set `A`. Each output is `softmod(phi_ij(clamp(x_i)), alpha)`.
//!
//! This basis stands in for the eigenfunction construction of the original
//! scheme, which is not restated here; it lives entirely inside
//! [`NmdshModel`] so another basis can replace it.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{dot, orthonormalize};
use crate::error::{check_dim, Error, Result};
use crate::rng;
use crate::synthdata::RealFeatureSet;

const KERNEL_EPS: f64 = 0.1;

/// Odd, bounded non-linearity `2 / (1 + exp(-8 sin(alpha pi x))) - 1`.
pub fn softmod(x: f64, alpha: f64) -> f64 {
    2.0 / (1.0 + (-8.0 * (alpha * PI * x).sin()).exp()) - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    /// Index into [`NmdshModel::dims`].
    pub slot: usize,
    /// Mode number, starting at 1.
    pub mode: u32,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NmdshModel {
    pub n: usize,
    pub l: usize,
    pub alpha: f64,
    /// Rotated coordinates that carry at least one selected eigenpair.
    pub dims: Vec<usize>,
    /// Rotation rows for `dims`, each of length `n`.
    pub projection: Vec<Vec<f64>>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// The selected set `A`, in ascending eigenvalue order.
    pub pairs: Vec<Eigenpair>,
    pub seed: u64,
}

impl NmdshModel {
    pub fn input_dim(&self) -> usize {
        self.n
    }

    /// Same model with a different non-linear rate.
    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self { alpha, ..self.clone() }
    }
}

pub fn nmdsh_train(training: &RealFeatureSet, l: usize, alpha: f64, seed: u64) -> Result<NmdshModel> {
    if training.is_empty() {
        return Err(Error::param("training", "empty training set"));
    }
    if l == 0 {
        return Err(Error::param("l", "must be positive"));
    }
    if !alpha.is_finite() {
        return Err(Error::param("alpha", "must be finite"));
    }
    let n = training.dim;

    let mut stream = rng::stream(seed, "scheme/nmdsh");
    let mut rotation: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| stream.sample(StandardNormal)).collect())
        .collect();
    orthonormalize(&mut rotation)?;

    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for x in &training.features {
        check_dim(n, x.len())?;
        for (i, r) in rotation.iter().enumerate() {
            let z = dot(r, x);
            lo[i] = lo[i].min(z);
            hi[i] = hi[i].max(z);
        }
    }

    // Candidate (coordinate, mode) pairs ordered by frequency j / (b - a); the
    // eigenvalue is strictly increasing in that frequency.
    let mut candidates: Vec<(f64, usize, u32)> = (0..n)
        .filter(|&i| hi[i] > lo[i])
        .flat_map(|i| (1..=l as u32).map(move |j| (i, j)))
        .map(|(i, j)| (j as f64 / (hi[i] - lo[i]), i, j))
        .collect();
    if candidates.len() < l {
        return Err(Error::param("l", format!("only {} eigenpairs available", candidates.len())));
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    candidates.truncate(l);

    let mut dims: Vec<usize> = candidates.iter().map(|c| c.1).collect();
    dims.sort_unstable();
    dims.dedup();
    let slot_of = |i: usize| dims.binary_search(&i).expect("selected dim");
    let pairs = candidates
        .iter()
        .map(|&(freq, i, j)| Eigenpair {
            slot: slot_of(i),
            mode: j,
            eigenvalue: 1.0 - (-(KERNEL_EPS * KERNEL_EPS / 2.0) * (freq * PI).powi(2)).exp(),
        })
        .collect();

    Ok(NmdshModel {
        n,
        l,
        alpha,
        projection: dims.iter().map(|&i| rotation[i].clone()).collect(),
        lo: dims.iter().map(|&i| lo[i]).collect(),
        hi: dims.iter().map(|&i| hi[i]).collect(),
        dims,
        pairs,
        seed,
    })
}

pub fn nmdsh_transform(x: &[f64], model: &NmdshModel) -> Result<Vec<f64>> {
    check_dim(model.n, x.len())?;
    let z: Vec<f64> = model
        .projection
        .iter()
        .zip(model.lo.iter().zip(&model.hi))
        .map(|(r, (&a, &b))| dot(r, x).clamp(a, b))
        .collect();
    Ok(model
        .pairs
        .iter()
        .map(|p| {
            let (a, b) = (model.lo[p.slot], model.hi[p.slot]);
            let phi = (PI / 2.0 + p.mode as f64 * PI * (z[p.slot] - a) / (b - a)).sin();
            softmod(phi, model.alpha)
        })
        .collect())
}

/// `1 - ||a - b|| / (2 sqrt(l))`; outputs lie in (-1, 1) so the ratio is at most 1.
pub fn nmdsh_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    if a.is_empty() {
        return Err(Error::param("nmdsh template", "empty operands"));
    }
    let d = crate::synthdata::euclidean_unchecked(a, b) / (2.0 * (a.len() as f64).sqrt());
    Ok((1.0 - d).clamp(0.0, 1.0))
}
