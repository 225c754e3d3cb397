//! Genetic-algorithm pre-image attack.
//!
//! The attacker holds `n` protected templates of one identity from a
//! compromised system (Sys C) together with its key, searches the feature
//! space for `x̂` whose Sys C templates are close to all of them, and presents
//! `x̂` to a target system (Sys T) that may use another key or another scheme.

mod bounds;
mod campaign;
mod ga;

pub use bounds::{check_projection_bound, check_projection_bound_keys, linear_map, spectral_norm, BoundReport};
pub use campaign::{
    default_space, identity_config, reconstruct, run_campaign, score_reconstructions, AttackScenario, CampaignResult,
    IdentityOutcome, Reconstruction, ENROLLED_SAMPLE,
};
pub use ga::{ga_minimize, AttackResult, ChromosomeSpace, Crossover, GaConfig, Preimage, BOUNDS_MARGIN, SIGMA_FRACTION};

use crate::error::{Error, Result};
use crate::schemes::{FeatureRef, ProtectedTemplate, SchemeKey};

/// Mean native distance between the template of `x` and each stolen
/// template. With one template this is the single-template objective.
pub fn objective(x: FeatureRef<'_>, templates: &[ProtectedTemplate], key: &SchemeKey) -> Result<f64> {
    if templates.is_empty() {
        return Err(Error::param("templates", "need at least one template"));
    }
    let probe = key.transform(x)?;
    let mut total = 0.0;
    for t in templates {
        total += key.distance(&probe, t)?;
    }
    Ok(total / templates.len() as f64)
}
