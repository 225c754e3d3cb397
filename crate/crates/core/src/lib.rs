//! Cancelable biometric transforms, genetic-algorithm pre-image attacks, and
//! score-level information leakage.
//!
//! The crate is organised by stage:
//!
//! - [`synthdata`]: seeded synthetic face-like and iris-like datasets, base distances.
//! - [`schemes`]: BioHashing, IoM, NMDSH, Bloom-filter and IFO transforms.
//! - [`attack`]: the GA pre-image attack, attack campaigns, projection bounds.
//! - [`leakage`]: transition matrices, Blahut–Arimoto capacity, discrete MI.
//! - [`metrics`]: score sets, EER/threshold, SAR and ΔFMR.

pub mod attack;
pub mod bits;
pub mod error;
pub mod leakage;
pub mod metrics;
pub mod rng;
pub mod schemes;
pub mod synthdata;

pub use bits::{BinaryCode, BitString};
pub use error::{Error, Result};
pub use schemes::{FeatureRef, Payload, ProtectedTemplate, SchemeKey, SchemeKind, SchemeSpec};
pub use synthdata::{BinaryCodeSet, Dataset, DatasetSpec, DistancePair, RealFeatureSet};
