use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synthdata::DistancePair;

pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Row-stochastic `p(t_j | s_i)` over distance bins.
///
/// `s_edges[i]` / `t_edges[j]` are the lower edges of the retained bins. For
/// matrices built directly from rows the edges are the row/column indices and
/// `bin_width` is 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    pub probs: Vec<Vec<f64>>,
    pub bin_width: f64,
    pub s_edges: Vec<f64>,
    pub t_edges: Vec<f64>,
    /// Pairs observed per retained row; empty for hand-built matrices.
    pub row_counts: Vec<usize>,
}

impl TransitionMatrix {
    /// Validates that every row is a probability distribution.
    pub fn from_rows(probs: Vec<Vec<f64>>) -> Result<Self> {
        let rows = probs.len();
        let cols = probs.first().map_or(0, Vec::len);
        let m = Self {
            s_edges: (0..rows).map(|i| i as f64).collect(),
            t_edges: (0..cols).map(|j| j as f64).collect(),
            bin_width: 1.0,
            row_counts: Vec::new(),
            probs,
        };
        m.validate()?;
        Ok(m)
    }

    /// Scales each non-negative row to sum to one.
    pub fn from_weights(weights: Vec<Vec<f64>>) -> Result<Self> {
        let mut probs = weights;
        for row in &mut probs {
            if row.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
                return Err(Error::param("weights", "entries must be finite and non-negative"));
            }
            let total: f64 = row.iter().sum();
            if total <= 0.0 {
                return Err(Error::param("weights", "every row needs positive mass"));
            }
            row.iter_mut().for_each(|w| *w /= total);
        }
        Self::from_rows(probs)
    }

    pub fn rows(&self) -> usize {
        self.probs.len()
    }

    pub fn cols(&self) -> usize {
        self.probs.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        if self.probs.is_empty() || self.cols() == 0 {
            return Err(Error::param("transition matrix", "must have at least one row and column"));
        }
        let cols = self.cols();
        for (i, row) in self.probs.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::param("transition matrix", format!("row {i} has {} entries, expected {cols}", row.len())));
            }
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::param("transition matrix", format!("row {i} has an entry outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::param("transition matrix", format!("row {i} sums to {sum}")));
            }
        }
        Ok(())
    }

    /// CSV: header `s_bin,<t edge>...`, then one line per row with its s edge.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s_bin");
        for e in &self.t_edges {
            out.push_str(&format!(",{}", tidy(*e)));
        }
        out.push('\n');
        for (edge, row) in self.s_edges.iter().zip(&self.probs) {
            out.push_str(&tidy(*edge).to_string());
            for p in row {
                out.push_str(&format!(",{p}"));
            }
            out.push('\n');
        }
        out
    }
}

// Edges are `lo + i * width`; drop the float noise that adds for display.
fn tidy(edge: f64) -> f64 {
    (edge * 1e10).round() / 1e10
}

fn bin_of(v: f64, lo: f64, width: f64, n: usize) -> usize {
    (((v - lo) / width).floor() as usize).min(n - 1)
}

fn bin_count(lo: f64, hi: f64, width: f64) -> usize {
    ((hi - lo) / width).floor() as usize + 1
}

/// Quantizes `s` and `t` into width-`bin_width` bins spanning their observed
/// ranges and returns the conditional frequencies `#(i, j) / #i`.
///
/// Bins that receive no pairs are dropped on both axes: an empty row has no
/// defined conditional distribution and an empty column carries no mass.
pub fn estimate_transition_matrix(pairs: &[DistancePair], bin_width: f64) -> Result<TransitionMatrix> {
    if pairs.is_empty() {
        return Err(Error::param("pairs", "need at least one distance pair"));
    }
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(Error::param("bin_width", "must be positive and finite"));
    }
    let range = |f: fn(&DistancePair) -> f64| {
        pairs.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (s_lo, s_hi) = range(|p| p.s);
    let (t_lo, t_hi) = range(|p| p.t);
    let ns = bin_count(s_lo, s_hi, bin_width);
    let nt = bin_count(t_lo, t_hi, bin_width);

    let mut counts = vec![vec![0usize; nt]; ns];
    for p in pairs {
        counts[bin_of(p.s, s_lo, bin_width, ns)][bin_of(p.t, t_lo, bin_width, nt)] += 1;
    }

    let keep_cols: Vec<usize> = (0..nt).filter(|&j| counts.iter().any(|row| row[j] > 0)).collect();
    let mut probs = Vec::new();
    let mut s_edges = Vec::new();
    let mut row_counts = Vec::new();
    for (i, row) in counts.iter().enumerate() {
        let total: usize = row.iter().sum();
        if total == 0 {
            continue;
        }
        probs.push(keep_cols.iter().map(|&j| row[j] as f64 / total as f64).collect());
        s_edges.push(s_lo + i as f64 * bin_width);
        row_counts.push(total);
    }
    Ok(TransitionMatrix {
        probs,
        bin_width,
        s_edges,
        t_edges: keep_cols.iter().map(|&j| t_lo + j as f64 * bin_width).collect(),
        row_counts,
    })
}
