//! Score-level information leakage.
//!
//! A scheme is modelled as a channel from quantized input-space distances `S`
//! to quantized transform-space distances `T`. The channel is estimated from
//! pair counts ([`estimate_transition_matrix`]) and its capacity, the maximum
//! leakage `λmax`, is computed with the Blahut–Arimoto iteration.

mod capacity;
mod oracle;
mod transition;

pub use capacity::{blahut_arimoto, blahut_arimoto_capped, mutual_information, LeakageResult, BA_DEFAULT_DELTA, BA_MAX_ITERATIONS};
pub use oracle::{discrete_mi_oracle, entropy, three_way_mi, MiReport, ThreeWayMi};
pub use transition::{estimate_transition_matrix, TransitionMatrix, ROW_SUM_TOLERANCE};

use rayon::prelude::*;

use crate::error::Result;
use crate::metrics::transform_all;
use crate::schemes::SchemeKey;
use crate::synthdata::{Dataset, DistancePair};

pub const DEFAULT_BIN_WIDTH: f64 = 0.01;

/// Input/transform distance pairs over every pair of samples, both
/// intra- and inter-class, each axis min-max normalized to `[0, 1]`.
pub fn scheme_distance_pairs(dataset: &Dataset, key: &SchemeKey) -> Result<Vec<DistancePair>> {
    let templates = transform_all(dataset, key)?;
    let n = dataset.len();
    let raw: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Vec<(f64, f64)>> {
            (i + 1..n)
                .map(|j| Ok((dataset.input_distance(i, j), key.distance(&templates[i], &templates[j])?)))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let s = normalizer(raw.iter().map(|p| p.0));
    let t = normalizer(raw.iter().map(|p| p.1));
    raw.into_iter().map(|(a, b)| DistancePair::new(s(a), t(b))).collect()
}

fn normalizer(values: impl Iterator<Item = f64>) -> impl Fn(f64) -> f64 + 'static {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    move |v| if span > 0.0 { ((v - lo) / span).clamp(0.0, 1.0) } else { 0.0 }
}

/// Channel estimate and maximum leakage of `key` on `dataset`.
pub fn leakage_for_scheme(
    dataset: &Dataset,
    key: &SchemeKey,
    bin_width: f64,
    delta: f64,
) -> Result<(LeakageResult, TransitionMatrix)> {
    let pairs = scheme_distance_pairs(dataset, key)?;
    let matrix = estimate_transition_matrix(&pairs, bin_width)?;
    let result = blahut_arimoto(&matrix, delta)?;
    Ok((result, matrix))
}
