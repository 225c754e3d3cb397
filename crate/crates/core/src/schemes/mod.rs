//! Cancelable transforms behind one contract.
//!
//! A [`SchemeKey`] holds everything needed to transform a feature and to
//! compare two protected templates. Every scheme reports similarity in
//! `[0, 1]`; the native distance used by the attack objective is
//! `1 - similarity`, so one threshold convention serves all schemes.
//!
//! | scheme  | input        | template                  | similarity                     |
//! |---------|--------------|---------------------------|--------------------------------|
//! | biohash | real vector  | bit string (`l` bits)     | 1 - normalized Hamming         |
//! | iom     | real vector  | `m` argmax indices        | collision fraction             |
//! | nmdsh   | real vector  | `l` reals in (-1, 1)      | 1 - Euclidean / (2 sqrt l)     |
//! | bloom   | binary code  | `K` filters of `2^w` bits | 1 - mean block dissimilarity   |
//! | ifo     | binary code  | `H x m` indices or -1     | collision fraction (no -1)     |

mod biohash;
mod bloom;
mod codec;
mod ifo;
mod iom;
mod nmdsh;
pub mod spec;

pub use biohash::{biohash_keygen, biohash_transform, BioHashKey};
pub use bloom::{bloom_dissimilarity, bloom_keygen, bloom_similarity, bloom_transform, BloomKey};
pub use codec::{KEY_FORMAT, TEMPLATE_FORMAT, FORMAT_VERSION};
pub use ifo::{ifo_keygen, ifo_similarity, ifo_transform, IfoKey, IFO_SENTINEL};
pub use iom::{iom_keygen, iom_similarity, iom_transform, IoMKey};
pub use nmdsh::{nmdsh_similarity, nmdsh_train, nmdsh_transform, softmod, Eigenpair, NmdshModel};
pub use spec::SchemeSpec;

use serde::{Deserialize, Serialize};

use crate::bits::{BinaryCode, BitString};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    BioHash,
    IoM,
    Nmdsh,
    Bloom,
    Ifo,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::BioHash => "biohash",
            SchemeKind::IoM => "iom",
            SchemeKind::Nmdsh => "nmdsh",
            SchemeKind::Bloom => "bloom",
            SchemeKind::Ifo => "ifo",
        }
    }

    pub fn takes_binary_input(self) -> bool {
        matches!(self, SchemeKind::Bloom | SchemeKind::Ifo)
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "biohash" | "biohashing" => Ok(SchemeKind::BioHash),
            "iom" => Ok(SchemeKind::IoM),
            "nmdsh" => Ok(SchemeKind::Nmdsh),
            "bloom" => Ok(SchemeKind::Bloom),
            "ifo" => Ok(SchemeKind::Ifo),
            other => Err(Error::param("scheme", format!("unknown scheme {other:?}"))),
        }
    }
}

/// A borrowed biometric feature.
#[derive(Debug, Clone, Copy)]
pub enum FeatureRef<'a> {
    Real(&'a [f64]),
    Binary(&'a BinaryCode),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "lowercase")]
pub enum Payload {
    Bits(BitString),
    Indices(Vec<i32>),
    Real(Vec<f64>),
    Bloom(Vec<BitString>),
}

impl Payload {
    pub fn len(&self) -> usize {
        match self {
            Payload::Bits(b) => b.len(),
            Payload::Indices(v) => v.len(),
            Payload::Real(v) => v.len(),
            Payload::Bloom(f) => f.iter().map(BitString::len).sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtectedTemplate {
    pub scheme: SchemeKind,
    pub payload: Payload,
}

impl ProtectedTemplate {
    pub fn len(&self) -> usize {
        self.payload.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payload.is_empty()
    }
}

/// Transform parameters for one scheme instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase")]
pub enum SchemeKey {
    #[serde(rename = "biohash")]
    BioHash(BioHashKey),
    #[serde(rename = "iom")]
    IoM(IoMKey),
    Nmdsh(NmdshModel),
    Bloom(BloomKey),
    Ifo(IfoKey),
}

impl SchemeKey {
    pub fn kind(&self) -> SchemeKind {
        match self {
            SchemeKey::BioHash(_) => SchemeKind::BioHash,
            SchemeKey::IoM(_) => SchemeKind::IoM,
            SchemeKey::Nmdsh(_) => SchemeKind::Nmdsh,
            SchemeKey::Bloom(_) => SchemeKind::Bloom,
            SchemeKey::Ifo(_) => SchemeKind::Ifo,
        }
    }

    /// Dimension of real inputs, or `None` for binary-code schemes.
    pub fn real_input_dim(&self) -> Option<usize> {
        match self {
            SchemeKey::BioHash(k) => Some(k.input_dim()),
            SchemeKey::IoM(k) => Some(k.input_dim()),
            SchemeKey::Nmdsh(m) => Some(m.input_dim()),
            SchemeKey::Bloom(_) | SchemeKey::Ifo(_) => None,
        }
    }

    /// `(height, width)` of binary inputs, or `None` for real-vector schemes.
    pub fn binary_input_shape(&self) -> Option<(usize, usize)> {
        match self {
            SchemeKey::Bloom(k) => Some((k.height, k.width)),
            SchemeKey::Ifo(k) => Some((k.height, k.width)),
            _ => None,
        }
    }

    pub fn transform(&self, x: FeatureRef<'_>) -> Result<ProtectedTemplate> {
        let payload = match (self, x) {
            (SchemeKey::BioHash(k), FeatureRef::Real(x)) => Payload::Bits(biohash_transform(x, k)?),
            (SchemeKey::IoM(k), FeatureRef::Real(x)) => Payload::Indices(iom_transform(x, k)?),
            (SchemeKey::Nmdsh(m), FeatureRef::Real(x)) => Payload::Real(nmdsh_transform(x, m)?),
            (SchemeKey::Bloom(k), FeatureRef::Binary(c)) => Payload::Bloom(bloom_transform(c, k)?),
            (SchemeKey::Ifo(k), FeatureRef::Binary(c)) => Payload::Indices(ifo_transform(c, k)?),
            (key, _) => {
                return Err(Error::UnsupportedScheme {
                    scheme: key.kind().name(),
                    operation: "this feature type",
                })
            }
        };
        Ok(ProtectedTemplate {
            scheme: self.kind(),
            payload,
        })
    }

    /// Similarity in `[0, 1]`, higher meaning more alike.
    pub fn similarity(&self, a: &ProtectedTemplate, b: &ProtectedTemplate) -> Result<f64> {
        for t in [a, b] {
            if t.scheme != self.kind() {
                return Err(Error::SchemeMismatch {
                    expected: self.kind().name(),
                    actual: t.scheme.name(),
                });
            }
        }
        match (&a.payload, &b.payload) {
            (Payload::Bits(x), Payload::Bits(y)) => Ok(1.0 - crate::synthdata::normalized_hamming(x, y)?),
            (Payload::Indices(x), Payload::Indices(y)) => match self {
                SchemeKey::Ifo(_) => ifo_similarity(x, y),
                _ => iom_similarity(x, y),
            },
            (Payload::Real(x), Payload::Real(y)) => nmdsh_similarity(x, y),
            (Payload::Bloom(x), Payload::Bloom(y)) => bloom_similarity(x, y),
            _ => Err(Error::format("template", "payload type does not match scheme")),
        }
    }

    /// Native distance `1 - similarity`.
    pub fn distance(&self, a: &ProtectedTemplate, b: &ProtectedTemplate) -> Result<f64> {
        self.similarity(a, b).map(|s| 1.0 - s)
    }
}

/// Unrolled dot product; four independent accumulators let the compiler vectorize.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. `columns` are
/// orthonormalized in place, in order.
pub(crate) fn orthonormalize(columns: &mut [Vec<f64>]) -> Result<()> {
    for i in 0..columns.len() {
        let (done, rest) = columns.split_at_mut(i);
        let v = &mut rest[0];
        for _pass in 0..2 {
            for q in done.iter() {
                let r = dot(q, v);
                v.iter_mut().zip(q).for_each(|(x, qk)| *x -= r * qk);
            }
        }
        let norm = dot(v, v).sqrt();
        if norm < 1e-12 {
            return Err(Error::param("projection", "random matrix is rank deficient"));
        }
        v.iter_mut().for_each(|x| *x /= norm);
    }
    Ok(())
}
