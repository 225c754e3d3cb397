use serde::{Deserialize, Serialize};

use super::{biohash_keygen, bloom_keygen, ifo_keygen, iom_keygen, nmdsh_train, SchemeKey, SchemeKind};
use crate::error::{Error, Result};
use crate::synthdata::Dataset;

/// Scheme parameters without the key material; [`SchemeSpec::keygen`] turns
/// them into a [`SchemeKey`] for a dataset and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase", deny_unknown_fields)]
pub enum SchemeSpec {
    #[serde(rename = "biohash")]
    BioHash {
        #[serde(default = "defaults::biohash_l")]
        l: usize,
        #[serde(default)]
        tau: f64,
    },
    #[serde(rename = "iom")]
    IoM {
        #[serde(default = "defaults::iom_m")]
        m: usize,
        #[serde(default = "defaults::iom_q")]
        q: usize,
    },
    Nmdsh {
        #[serde(default = "defaults::nmdsh_l")]
        l: usize,
        #[serde(default = "defaults::nmdsh_alpha")]
        alpha: f64,
    },
    Bloom {
        #[serde(default = "defaults::bloom_word_size")]
        word_size: usize,
        #[serde(default = "defaults::bloom_block_size")]
        block_size: usize,
    },
    Ifo {
        #[serde(default = "defaults::ifo_m")]
        m: usize,
        #[serde(default = "defaults::ifo_p")]
        p: usize,
        #[serde(default = "defaults::ifo_window")]
        window: usize,
        #[serde(default = "defaults::ifo_tau")]
        tau: usize,
    },
}

pub mod defaults {
    pub fn biohash_l() -> usize {
        256
    }
    pub fn iom_m() -> usize {
        128
    }
    pub fn iom_q() -> usize {
        16
    }
    pub fn nmdsh_l() -> usize {
        256
    }
    pub fn nmdsh_alpha() -> f64 {
        0.5
    }
    pub fn bloom_word_size() -> usize {
        10
    }
    pub fn bloom_block_size() -> usize {
        32
    }
    pub fn ifo_m() -> usize {
        100
    }
    pub fn ifo_p() -> usize {
        2
    }
    pub fn ifo_window() -> usize {
        16
    }
    pub fn ifo_tau() -> usize {
        0
    }
}

impl SchemeSpec {
    /// Default parameters of `kind`.
    pub fn default_for(kind: SchemeKind) -> Self {
        match kind {
            SchemeKind::BioHash => SchemeSpec::BioHash {
                l: defaults::biohash_l(),
                tau: 0.0,
            },
            SchemeKind::IoM => SchemeSpec::IoM {
                m: defaults::iom_m(),
                q: defaults::iom_q(),
            },
            SchemeKind::Nmdsh => SchemeSpec::Nmdsh {
                l: defaults::nmdsh_l(),
                alpha: defaults::nmdsh_alpha(),
            },
            SchemeKind::Bloom => SchemeSpec::Bloom {
                word_size: defaults::bloom_word_size(),
                block_size: defaults::bloom_block_size(),
            },
            SchemeKind::Ifo => SchemeSpec::Ifo {
                m: defaults::ifo_m(),
                p: defaults::ifo_p(),
                window: defaults::ifo_window(),
                tau: defaults::ifo_tau(),
            },
        }
    }

    pub fn kind(&self) -> SchemeKind {
        match self {
            SchemeSpec::BioHash { .. } => SchemeKind::BioHash,
            SchemeSpec::IoM { .. } => SchemeKind::IoM,
            SchemeSpec::Nmdsh { .. } => SchemeKind::Nmdsh,
            SchemeSpec::Bloom { .. } => SchemeKind::Bloom,
            SchemeSpec::Ifo { .. } => SchemeKind::Ifo,
        }
    }

    /// Sets the integer parameter named `name` (`l`, `m`, `q`, ...) or the
    /// real parameter `alpha` / `tau`; used by parameter sweeps.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self> {
        let as_count = || -> Result<usize> {
            if value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
                Ok(value as usize)
            } else {
                Err(Error::param("sweep value", format!("{value} is not a non-negative integer")))
            }
        };
        let mut out = self.clone();
        match (&mut out, name) {
            (SchemeSpec::BioHash { l, .. }, "l") | (SchemeSpec::Nmdsh { l, .. }, "l") => *l = as_count()?,
            (SchemeSpec::BioHash { tau, .. }, "tau") => *tau = value,
            (SchemeSpec::IoM { m, .. }, "m") | (SchemeSpec::IoM { m, .. }, "l") => *m = as_count()?,
            (SchemeSpec::IoM { q, .. }, "q") => *q = as_count()?,
            (SchemeSpec::Nmdsh { alpha, .. }, "alpha") => *alpha = value,
            (SchemeSpec::Bloom { word_size, .. }, "word_size") => *word_size = as_count()?,
            (SchemeSpec::Bloom { block_size, .. }, "block_size") | (SchemeSpec::Bloom { block_size, .. }, "l") => {
                *block_size = as_count()?
            }
            (SchemeSpec::Ifo { m, .. }, "m") | (SchemeSpec::Ifo { m, .. }, "l") => *m = as_count()?,
            (SchemeSpec::Ifo { p, .. }, "p") => *p = as_count()?,
            (SchemeSpec::Ifo { window, .. }, "window") => *window = as_count()?,
            (SchemeSpec::Ifo { tau, .. }, "tau") => *tau = as_count()?,
            (spec, _) => {
                return Err(Error::param(
                    "sweep parameter",
                    format!("{} has no parameter {name:?}", spec.kind().name()),
                ))
            }
        }
        Ok(out)
    }

    /// Draws a key for features of `dataset`. NMDSH learns its ranges from the
    /// whole dataset.
    pub fn keygen(&self, dataset: &Dataset, seed: u64) -> Result<SchemeKey> {
        let mismatch = || Error::UnsupportedScheme {
            scheme: self.kind().name(),
            operation: "this dataset kind",
        };
        match (self, dataset) {
            (&SchemeSpec::BioHash { l, tau }, Dataset::Real(d)) => biohash_keygen(d.dim, l, tau, seed).map(SchemeKey::BioHash),
            (&SchemeSpec::IoM { m, q }, Dataset::Real(d)) => iom_keygen(d.dim, m, q, seed).map(SchemeKey::IoM),
            (&SchemeSpec::Nmdsh { l, alpha }, Dataset::Real(d)) => nmdsh_train(d, l, alpha, seed).map(SchemeKey::Nmdsh),
            (&SchemeSpec::Bloom { word_size, block_size }, Dataset::Binary(d)) => {
                bloom_keygen(d.height, d.width, word_size, block_size, seed).map(SchemeKey::Bloom)
            }
            (&SchemeSpec::Ifo { m, p, window, tau }, Dataset::Binary(d)) => {
                ifo_keygen(d.height, d.width, m, p, window, tau, seed).map(SchemeKey::Ifo)
            }
            _ => Err(mismatch()),
        }
    }
}
