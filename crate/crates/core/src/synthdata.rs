//! Seeded synthetic datasets and the two base distance metrics.
//!
//! Real-valued sets model length-normalized face embeddings: unit-norm class
//! centers plus isotropic Gaussian noise, re-normalized. Binary sets model
//! IrisCodes: a Bernoulli(0.5) master code per class with independent bit
//! flips per sample.
//!
//! # Text format
//!
//! Both set types round-trip through a line-oriented format. The first line is
//! a header of `key=value` pairs, then one sample per line: the class label
//! followed by the values, separated by single spaces.
//!
//! ```text
//! # cbleak real v1 n_classes=2 samples_per_class=2 dim=3 intra_sigma=0.1 seed=7
//! 0 0.57 -0.21 0.79
//! ...
//! # cbleak binary v1 n_classes=2 samples_per_class=2 height=2 width=4 flip_rate=0.05 seed=1
//! 0 01101001
//! ```
//!
//! Real values are written in shortest round-trip form, binary codes as one
//! row-major string of `0`/`1`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bits::{BinaryCode, BitString};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealFeatureSet {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub dim: usize,
    pub n_classes: usize,
    pub samples_per_class: usize,
    pub intra_sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryCodeSet {
    pub codes: Vec<BinaryCode>,
    pub labels: Vec<usize>,
    pub height: usize,
    pub width: usize,
    pub n_classes: usize,
    pub samples_per_class: usize,
    pub flip_rate: f64,
    pub seed: u64,
}

/// An input-space distance `s` paired with the transform-space distance `t`
/// of the same two samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistancePair {
    pub s: f64,
    pub t: f64,
}

impl DistancePair {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        if !(s.is_finite() && t.is_finite() && s >= 0.0 && t >= 0.0) {
            return Err(Error::param("distance pair", format!("({s}, {t}) must be finite and non-negative")));
        }
        Ok(Self { s, t })
    }
}

fn check_sizes(n_classes: usize, samples_per_class: usize) -> Result<()> {
    if n_classes < 2 {
        return Err(Error::param("n_classes", "need at least 2 classes"));
    }
    if samples_per_class < 2 {
        return Err(Error::param("samples_per_class", "need at least 2 samples per class"));
    }
    Ok(())
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

pub fn gen_real_dataset(
    n_classes: usize,
    samples_per_class: usize,
    dim: usize,
    intra_sigma: f64,
    seed: u64,
) -> Result<RealFeatureSet> {
    check_sizes(n_classes, samples_per_class)?;
    if dim < 2 {
        return Err(Error::param("dim", "need at least 2 dimensions"));
    }
    // Zero noise is accepted: it degenerates to identical samples per class.
    if !(intra_sigma.is_finite() && intra_sigma >= 0.0) {
        return Err(Error::param("intra_sigma", "must be finite and non-negative"));
    }

    let mut centers_rng = rng::stream(seed, "data/centers");
    let mut noise_rng = rng::stream(seed, "data/noise");

    let mut features = Vec::with_capacity(n_classes * samples_per_class);
    let mut labels = Vec::with_capacity(n_classes * samples_per_class);
    for class in 0..n_classes {
        let mut center: Vec<f64> = (0..dim).map(|_| centers_rng.sample(StandardNormal)).collect();
        normalize(&mut center);
        for _ in 0..samples_per_class {
            let mut sample: Vec<f64> = center
                .iter()
                .map(|&c| {
                    let z: f64 = noise_rng.sample(StandardNormal);
                    c + intra_sigma * z
                })
                .collect();
            normalize(&mut sample);
            features.push(sample);
            labels.push(class);
        }
    }

    Ok(RealFeatureSet {
        features,
        labels,
        dim,
        n_classes,
        samples_per_class,
        intra_sigma,
        seed,
    })
}

pub fn gen_binary_dataset(
    n_classes: usize,
    samples_per_class: usize,
    height: usize,
    width: usize,
    flip_rate: f64,
    seed: u64,
) -> Result<BinaryCodeSet> {
    check_sizes(n_classes, samples_per_class)?;
    if height == 0 || width == 0 {
        return Err(Error::param("height/width", "must be positive"));
    }
    if !(0.0..0.5).contains(&flip_rate) {
        return Err(Error::param("flip_rate", format!("{flip_rate} is outside [0, 0.5)")));
    }

    let mut master_rng = rng::stream(seed, "data/masters");
    let mut flip_rng = rng::stream(seed, "data/flips");

    let mut codes = Vec::with_capacity(n_classes * samples_per_class);
    let mut labels = Vec::with_capacity(n_classes * samples_per_class);
    for class in 0..n_classes {
        let master: Vec<u8> = (0..height * width).map(|_| master_rng.random::<bool>() as u8).collect();
        for _ in 0..samples_per_class {
            let bits = master
                .iter()
                .map(|&b| if flip_rng.random_bool(flip_rate) { b ^ 1 } else { b })
                .collect();
            codes.push(BinaryCode::new(height, width, bits)?);
            labels.push(class);
        }
    }

    Ok(BinaryCodeSet {
        codes,
        labels,
        height,
        width,
        n_classes,
        samples_per_class,
        flip_rate,
        seed,
    })
}

pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    crate::error::check_dim(a.len(), b.len())?;
    Ok(euclidean_unchecked(a, b))
}

#[inline]
pub(crate) fn euclidean_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn normalized_hamming(a: &BitString, b: &BitString) -> Result<f64> {
    crate::error::check_dim(a.len(), b.len())?;
    if a.is_empty() {
        return Err(Error::param("bit string", "empty operands"));
    }
    Ok(a.hamming(b) as f64 / a.len() as f64)
}

/// Normalized Hamming distance between two binary code matrices of equal shape.
pub fn code_hamming(a: &BinaryCode, b: &BinaryCode) -> Result<f64> {
    if a.height() != b.height() || a.width() != b.width() {
        return Err(Error::Dimension {
            expected: a.height() * a.width(),
            actual: b.height() * b.width(),
        });
    }
    let diff = a.as_slice().iter().zip(b.as_slice()).filter(|(x, y)| x != y).count();
    Ok(diff as f64 / a.as_slice().len() as f64)
}

fn header_line(kind: &str, fields: &[(&str, String)]) -> String {
    let mut line = format!("# cbleak {kind} v1");
    for (k, v) in fields {
        let _ = write!(line, " {k}={v}");
    }
    line
}

fn parse_header<'a>(line: Option<&'a str>, kind: &str) -> Result<BTreeMap<&'a str, &'a str>> {
    let line = line.ok_or_else(|| Error::format("dataset", "missing header"))?;
    let mut parts = line.split_whitespace();
    let prefix: Vec<_> = parts.by_ref().take(4).collect();
    if prefix != ["#", "cbleak", kind, "v1"] {
        return Err(Error::format("dataset", format!("expected `# cbleak {kind} v1` header, got {line:?}")));
    }
    parts
        .map(|kv| {
            kv.split_once('=')
                .ok_or_else(|| Error::format("dataset", format!("bad header field {kv:?}")))
        })
        .collect()
}

fn header_value<T: std::str::FromStr>(h: &BTreeMap<&str, &str>, key: &'static str) -> Result<T> {
    h.get(key)
        .ok_or_else(|| Error::format("dataset", format!("header lacks `{key}`")))?
        .parse()
        .map_err(|_| Error::format("dataset", format!("header field `{key}` is malformed")))
}

fn parse_label(tok: Option<&str>, n_classes: usize) -> Result<usize> {
    let label: usize = tok
        .ok_or_else(|| Error::format("dataset", "empty sample line"))?
        .parse()
        .map_err(|_| Error::format("dataset", "label is not an integer"))?;
    if label >= n_classes {
        return Err(Error::format("dataset", format!("label {label} >= n_classes {n_classes}")));
    }
    Ok(label)
}

impl RealFeatureSet {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Indices of the samples of one class, in generation order.
    pub fn class_indices(&self, class: usize) -> std::ops::Range<usize> {
        class * self.samples_per_class..(class + 1) * self.samples_per_class
    }

    pub fn to_text(&self) -> String {
        let mut out = header_line(
            "real",
            &[
                ("n_classes", self.n_classes.to_string()),
                ("samples_per_class", self.samples_per_class.to_string()),
                ("dim", self.dim.to_string()),
                ("intra_sigma", self.intra_sigma.to_string()),
                ("seed", self.seed.to_string()),
            ],
        );
        out.push('\n');
        for (label, f) in self.labels.iter().zip(&self.features) {
            let _ = write!(out, "{label}");
            for v in f {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let h = parse_header(lines.next(), "real")?;
        let n_classes: usize = header_value(&h, "n_classes")?;
        let samples_per_class: usize = header_value(&h, "samples_per_class")?;
        let dim: usize = header_value(&h, "dim")?;
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let mut toks = line.split(' ');
            labels.push(parse_label(toks.next(), n_classes)?);
            let values = toks
                .map(|t| t.parse::<f64>().map_err(|_| Error::format("dataset", format!("bad value {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if values.len() != dim || values.iter().any(|v| !v.is_finite()) {
                return Err(Error::format("dataset", format!("sample {} must hold {dim} finite values", labels.len())));
            }
            features.push(values);
        }
        if features.len() != n_classes * samples_per_class {
            return Err(Error::format("dataset", "sample count disagrees with header"));
        }
        Ok(Self {
            features,
            labels,
            dim,
            n_classes,
            samples_per_class,
            intra_sigma: header_value(&h, "intra_sigma")?,
            seed: header_value(&h, "seed")?,
        })
    }
}

impl BinaryCodeSet {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn class_indices(&self, class: usize) -> std::ops::Range<usize> {
        class * self.samples_per_class..(class + 1) * self.samples_per_class
    }

    pub fn to_text(&self) -> String {
        let mut out = header_line(
            "binary",
            &[
                ("n_classes", self.n_classes.to_string()),
                ("samples_per_class", self.samples_per_class.to_string()),
                ("height", self.height.to_string()),
                ("width", self.width.to_string()),
                ("flip_rate", self.flip_rate.to_string()),
                ("seed", self.seed.to_string()),
            ],
        );
        out.push('\n');
        for (label, c) in self.labels.iter().zip(&self.codes) {
            let _ = write!(out, "{label} ");
            out.extend(c.as_slice().iter().map(|&b| if b == 1 { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let h = parse_header(lines.next(), "binary")?;
        let n_classes: usize = header_value(&h, "n_classes")?;
        let samples_per_class: usize = header_value(&h, "samples_per_class")?;
        let height: usize = header_value(&h, "height")?;
        let width: usize = header_value(&h, "width")?;
        let mut codes = Vec::new();
        let mut labels = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let mut toks = line.split(' ');
            labels.push(parse_label(toks.next(), n_classes)?);
            let bits = toks
                .next()
                .ok_or_else(|| Error::format("dataset", "missing code"))?
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(Error::format("dataset", format!("bad bit {c:?}"))),
                })
                .collect::<Result<Vec<u8>>>()?;
            codes.push(BinaryCode::new(height, width, bits)?);
        }
        if codes.len() != n_classes * samples_per_class {
            return Err(Error::format("dataset", "sample count disagrees with header"));
        }
        Ok(Self {
            codes,
            labels,
            height,
            width,
            n_classes,
            samples_per_class,
            flip_rate: header_value(&h, "flip_rate")?,
            seed: header_value(&h, "seed")?,
        })
    }
}

/// Declarative description of a synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DatasetSpec {
    Real {
        #[serde(default = "defaults::n_classes")]
        n_classes: usize,
        #[serde(default = "defaults::samples_per_class")]
        samples_per_class: usize,
        #[serde(default = "defaults::dim")]
        dim: usize,
        #[serde(default = "defaults::intra_sigma")]
        intra_sigma: f64,
        seed: u64,
    },
    Binary {
        #[serde(default = "defaults::binary_classes")]
        n_classes: usize,
        #[serde(default = "defaults::binary_samples")]
        samples_per_class: usize,
        #[serde(default = "defaults::height")]
        height: usize,
        #[serde(default = "defaults::width")]
        width: usize,
        #[serde(default = "defaults::flip_rate")]
        flip_rate: f64,
        seed: u64,
    },
}

/// Defaults of the synthetic datasets: a face-like set of 100 identities with
/// 10 unit-norm 512-d samples each, and an iris-like set of 124 identities
/// with 7 codes of 20 x 512 bits.
pub mod defaults {
    pub fn n_classes() -> usize {
        100
    }
    pub fn samples_per_class() -> usize {
        10
    }
    pub fn dim() -> usize {
        512
    }
    pub fn intra_sigma() -> f64 {
        0.05
    }
    pub fn binary_classes() -> usize {
        124
    }
    pub fn binary_samples() -> usize {
        7
    }
    pub fn height() -> usize {
        20
    }
    pub fn width() -> usize {
        512
    }
    pub fn flip_rate() -> f64 {
        0.05
    }
}

impl DatasetSpec {
    pub fn default_real(seed: u64) -> Self {
        DatasetSpec::Real {
            n_classes: defaults::n_classes(),
            samples_per_class: defaults::samples_per_class(),
            dim: defaults::dim(),
            intra_sigma: defaults::intra_sigma(),
            seed,
        }
    }

    pub fn default_binary(seed: u64) -> Self {
        DatasetSpec::Binary {
            n_classes: defaults::binary_classes(),
            samples_per_class: defaults::binary_samples(),
            height: defaults::height(),
            width: defaults::width(),
            flip_rate: defaults::flip_rate(),
            seed,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            DatasetSpec::Real { seed, .. } | DatasetSpec::Binary { seed, .. } => *seed,
        }
    }

    pub fn with_seed(&self, new_seed: u64) -> Self {
        let mut out = self.clone();
        match &mut out {
            DatasetSpec::Real { seed, .. } | DatasetSpec::Binary { seed, .. } => *seed = new_seed,
        }
        out
    }

    pub fn generate(&self) -> Result<Dataset> {
        match *self {
            DatasetSpec::Real {
                n_classes,
                samples_per_class,
                dim,
                intra_sigma,
                seed,
            } => gen_real_dataset(n_classes, samples_per_class, dim, intra_sigma, seed).map(Dataset::Real),
            DatasetSpec::Binary {
                n_classes,
                samples_per_class,
                height,
                width,
                flip_rate,
                seed,
            } => gen_binary_dataset(n_classes, samples_per_class, height, width, flip_rate, seed).map(Dataset::Binary),
        }
    }
}

/// Either kind of dataset, for code paths that are agnostic to the feature type.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Real(RealFeatureSet),
    Binary(BinaryCodeSet),
}

impl Dataset {
    pub fn len(&self) -> usize {
        match self {
            Dataset::Real(d) => d.len(),
            Dataset::Binary(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_classes(&self) -> usize {
        match self {
            Dataset::Real(d) => d.n_classes,
            Dataset::Binary(d) => d.n_classes,
        }
    }

    pub fn samples_per_class(&self) -> usize {
        match self {
            Dataset::Real(d) => d.samples_per_class,
            Dataset::Binary(d) => d.samples_per_class,
        }
    }

    pub fn labels(&self) -> &[usize] {
        match self {
            Dataset::Real(d) => &d.labels,
            Dataset::Binary(d) => &d.labels,
        }
    }

    pub fn feature(&self, i: usize) -> crate::schemes::FeatureRef<'_> {
        match self {
            Dataset::Real(d) => crate::schemes::FeatureRef::Real(&d.features[i]),
            Dataset::Binary(d) => crate::schemes::FeatureRef::Binary(&d.codes[i]),
        }
    }

    /// Input-space distance: Euclidean for real features, normalized Hamming for codes.
    pub fn input_distance(&self, i: usize, j: usize) -> f64 {
        match self {
            Dataset::Real(d) => euclidean_unchecked(&d.features[i], &d.features[j]),
            Dataset::Binary(d) => code_hamming(&d.codes[i], &d.codes[j]).expect("codes share a shape"),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Dataset::Real(d) => d.to_text(),
            Dataset::Binary(d) => d.to_text(),
        }
    }

    pub fn from_text(text: &str) -> Result<Self> {
        if text.starts_with("# cbleak binary") {
            BinaryCodeSet::from_text(text).map(Dataset::Binary)
        } else {
            RealFeatureSet::from_text(text).map(Dataset::Real)
        }
    }
}
