//! Verification metrics: score generation, EER and threshold, FMR at the EER
//! threshold, successful attack rate, ΔFMR.
//!
//! All scores are similarities in `[0, 1]`. A comparison is accepted when its
//! score is at least the threshold θ: `FMR(θ)` is the fraction of non-mated
//! scores `>= θ` and `FNMR(θ)` the fraction of mated scores `< θ`.

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::schemes::{ProtectedTemplate, SchemeKey};
use crate::synthdata::Dataset;

pub const DEFAULT_MAX_NON_MATED: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSet {
    pub mated: Vec<f64>,
    pub non_mated: Vec<f64>,
    pub mated_imposter: Option<Vec<f64>>,
    /// Cross-class pairs available before subsampling.
    pub non_mated_total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub eer: f64,
    pub theta: f64,
    pub fmr_at_et: f64,
    pub sar: Option<f64>,
    pub delta_fmr: Option<f64>,
    pub lambda_max: Option<f64>,
    pub n_mated: usize,
    pub n_non_mated: usize,
    pub n_non_mated_total: usize,
    pub n_mated_imposter: Option<usize>,
}

impl EvalReport {
    /// Normal-operation columns (θ, EER, FMR@ET), plus attack columns when
    /// the score set carries mated-imposter scores.
    pub fn from_scores(scores: &ScoreSet) -> Result<Self> {
        let (eer, theta) = eer_and_threshold(scores)?;
        let fmr_at_et = fmr(&scores.non_mated, theta);
        let sar_value = scores.mated_imposter.as_deref().map(|mi| sar(mi, theta));
        Ok(Self {
            eer,
            theta,
            fmr_at_et,
            sar: sar_value,
            delta_fmr: sar_value.map(|s| delta_fmr(s, fmr_at_et)),
            lambda_max: None,
            n_mated: scores.mated.len(),
            n_non_mated: scores.non_mated.len(),
            n_non_mated_total: scores.non_mated_total,
            n_mated_imposter: scores.mated_imposter.as_ref().map(Vec::len),
        })
    }
}

pub fn transform_all(dataset: &Dataset, key: &SchemeKey) -> Result<Vec<ProtectedTemplate>> {
    (0..dataset.len())
        .into_par_iter()
        .map(|i| key.transform(dataset.feature(i)))
        .collect()
}

/// All within-class pairs `(i, j)`, `i < j`, in index order.
pub fn mated_pairs(labels: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            if labels[i] == labels[j] {
                out.push((i, j));
            }
        }
    }
    out
}

/// Cross-class pairs; all of them when there are at most `max` pairs,
/// otherwise a seeded sample of `max` distinct pairs in index order.
pub fn non_mated_pairs(labels: &[usize], max: usize, seed: u64) -> (Vec<(usize, usize)>, usize) {
    let mut all = Vec::new();
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            if labels[i] != labels[j] {
                all.push((i, j));
            }
        }
    }
    let total = all.len();
    if total <= max {
        return (all, total);
    }
    let mut rng = rng::stream(seed, "metrics/non-mated");
    let mut picked = index::sample(&mut rng, total, max).into_vec();
    picked.sort_unstable();
    (picked.into_iter().map(|k| all[k]).collect(), total)
}

fn pair_scores(key: &SchemeKey, templates: &[ProtectedTemplate], pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
    pairs
        .par_iter()
        .map(|&(i, j)| key.similarity(&templates[i], &templates[j]))
        .collect()
}

/// Mated scores over every within-class pair and non-mated scores over all (or
/// a seeded sample of at most `max_non_mated`) cross-class pairs.
pub fn generate_scores(dataset: &Dataset, key: &SchemeKey, max_non_mated: usize, seed: u64) -> Result<ScoreSet> {
    let templates = transform_all(dataset, key)?;
    scores_from_templates(dataset.labels(), key, &templates, max_non_mated, seed)
}

pub fn scores_from_templates(
    labels: &[usize],
    key: &SchemeKey,
    templates: &[ProtectedTemplate],
    max_non_mated: usize,
    seed: u64,
) -> Result<ScoreSet> {
    let (nm_pairs, total) = non_mated_pairs(labels, max_non_mated, seed);
    Ok(ScoreSet {
        mated: pair_scores(key, templates, &mated_pairs(labels))?,
        non_mated: pair_scores(key, templates, &nm_pairs)?,
        mated_imposter: None,
        non_mated_total: total,
    })
}

/// Fraction of non-mated scores accepted at `theta`.
pub fn fmr(non_mated: &[f64], theta: f64) -> f64 {
    if non_mated.is_empty() {
        return 0.0;
    }
    non_mated.iter().filter(|&&s| s >= theta).count() as f64 / non_mated.len() as f64
}

/// Fraction of mated scores rejected at `theta`.
pub fn fnmr(mated: &[f64], theta: f64) -> f64 {
    if mated.is_empty() {
        return 0.0;
    }
    mated.iter().filter(|&&s| s < theta).count() as f64 / mated.len() as f64
}

/// Fraction of mated-imposter (attack) scores accepted at `theta`.
pub fn sar(mated_imposter: &[f64], theta: f64) -> f64 {
    fmr(mated_imposter, theta)
}

pub fn delta_fmr(sar: f64, fmr_at_et: f64) -> f64 {
    sar - fmr_at_et
}

/// Equal error rate and its threshold.
///
/// Thresholds sweep the distinct observed scores. Both rates are constant on
/// each interval `(t_{k-1}, t_k]`, so when they are equal at `t_k` the whole
/// interval (extended over consecutive equal thresholds) is an EER region and
/// its midpoint is returned. Otherwise the rates are interpolated linearly
/// between the two thresholds bracketing the sign change of `FMR - FNMR`.
pub fn eer_and_threshold(scores: &ScoreSet) -> Result<(f64, f64)> {
    let (mated, non_mated) = (&scores.mated, &scores.non_mated);
    if mated.is_empty() || non_mated.is_empty() {
        return Err(Error::param("scores", "mated and non-mated lists must be non-empty"));
    }
    if mated.iter().chain(non_mated.iter()).any(|s| !s.is_finite()) {
        return Err(Error::param("scores", "scores must be finite"));
    }

    let mut m = mated.clone();
    let mut nm = non_mated.clone();
    m.sort_by(f64::total_cmp);
    nm.sort_by(f64::total_cmp);
    let fmr_at = |t: f64| (nm.len() - nm.partition_point(|&s| s < t)) as f64 / nm.len() as f64;
    let fnmr_at = |t: f64| m.partition_point(|&s| s < t) as f64 / m.len() as f64;

    let mut thresholds: Vec<f64> = m.iter().chain(nm.iter()).copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    // Above every score nothing is accepted: FMR = 0, FNMR = 1.
    let top = *thresholds.last().expect("non-empty");
    thresholds.push(top + 1.0);

    let rates: Vec<(f64, f64)> = thresholds.iter().map(|&t| (fmr_at(t), fnmr_at(t))).collect();
    let diff = |k: usize| rates[k].0 - rates[k].1;

    // At the smallest score every non-mated comparison is accepted and no
    // mated one rejected, so diff(0) = 1 and the crossing has k >= 1.
    let k = (0..thresholds.len()).find(|&k| diff(k) <= 0.0).expect("sentinel threshold");
    debug_assert!(k >= 1);

    if diff(k) == 0.0 {
        let mut last = k;
        while last + 1 < thresholds.len() && diff(last + 1) == 0.0 {
            last += 1;
        }
        let theta = 0.5 * (thresholds[k - 1] + thresholds[last]);
        return Ok((rates[k].0, theta));
    }

    let (d0, d1) = (diff(k - 1), diff(k));
    let w = d0 / (d0 - d1);
    let theta = thresholds[k - 1] + w * (thresholds[k] - thresholds[k - 1]);
    let eer = rates[k - 1].0 + w * (rates[k].0 - rates[k - 1].0);
    Ok((eer, theta))
}

/// Area under the ROC curve: probability that a random mated score exceeds a
/// random non-mated one, ties counting one half.
pub fn auc(mated: &[f64], non_mated: &[f64]) -> f64 {
    let mut nm = non_mated.to_vec();
    nm.sort_by(f64::total_cmp);
    let total: f64 = mated
        .iter()
        .map(|&s| {
            let below = nm.partition_point(|&x| x < s);
            let ties = nm[below..].partition_point(|&x| x <= s);
            below as f64 + 0.5 * ties as f64
        })
        .sum();
    total / (mated.len() as f64 * nm.len() as f64)
}
