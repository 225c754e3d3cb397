use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ga::{ga_minimize, AttackResult, ChromosomeSpace, GaConfig};
use super::objective;
use crate::error::{Error, Result};
use crate::rng;
use crate::schemes::{ProtectedTemplate, SchemeKey};
use crate::synthdata::Dataset;

/// Sample of each identity enrolled in Sys T. The attacker holds the Sys C
/// templates of samples `1..=n`, so the pre-image always has to bridge the
/// intra-class variation to the enrolled sample.
pub const ENROLLED_SAMPLE: usize = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackScenario {
    /// Compromised system: its key and templates are known to the attacker.
    pub sys_c: SchemeKey,
    /// Target system the pre-image is presented to.
    pub sys_t: SchemeKey,
    pub n_templates: usize,
    pub identities: Vec<usize>,
}

impl AttackScenario {
    pub fn validate(&self) -> Result<()> {
        if self.n_templates < 1 {
            return Err(Error::param("n_templates", "must be at least 1"));
        }
        let same_space = match (self.sys_c.real_input_dim(), self.sys_t.real_input_dim()) {
            (Some(a), Some(b)) => a == b,
            (None, None) => self.sys_c.binary_input_shape() == self.sys_t.binary_input_shape(),
            _ => false,
        };
        if !same_space {
            return Err(Error::param("scenario", "Sys C and Sys T must share the feature space"));
        }
        Ok(())
    }
}

/// Pre-image reconstructed for one identity from its Sys C templates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub identity: usize,
    pub n_templates: usize,
    pub result: AttackResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityOutcome {
    pub identity: usize,
    pub n_templates: usize,
    pub final_objective: f64,
    pub generations: usize,
    pub converged: bool,
    pub mated_imposter_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    /// Sorted by identity.
    pub outcomes: Vec<IdentityOutcome>,
    #[serde(skip)]
    pub traces: Vec<(usize, Vec<f64>)>,
}

impl CampaignResult {
    pub fn mated_imposter_scores(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.mated_imposter_score).collect()
    }

    pub fn mean_final_objective(&self) -> f64 {
        self.outcomes.iter().map(|o| o.final_objective).sum::<f64>() / self.outcomes.len().max(1) as f64
    }

    pub fn converged_fraction(&self) -> f64 {
        self.outcomes.iter().filter(|o| o.converged).count() as f64 / self.outcomes.len().max(1) as f64
    }
}

fn sample_index(dataset: &Dataset, identity: usize, k: usize) -> usize {
    identity * dataset.samples_per_class() + k
}

/// Chromosome space implied by the dataset: widened training ranges for real
/// features, the code shape for binary ones.
pub fn default_space(dataset: &Dataset) -> Result<ChromosomeSpace> {
    match dataset {
        Dataset::Real(d) => ChromosomeSpace::from_features(d),
        Dataset::Binary(d) => Ok(ChromosomeSpace::from_codes(d)),
    }
}

/// GA config for one identity: its own seed stream and, if unset, the
/// dataset's chromosome space.
pub fn identity_config(config: &GaConfig, identity: usize, space: &ChromosomeSpace) -> GaConfig {
    GaConfig {
        seed: rng::derive_seed(config.seed, &format!("attack/ga/{identity}")),
        space: Some(config.space.clone().unwrap_or_else(|| space.clone())),
        ..config.clone()
    }
}

/// Reconstructs a pre-image per identity from `n_templates` Sys C templates.
/// Identities run concurrently; output is sorted by identity.
pub fn reconstruct(
    sys_c: &SchemeKey,
    n_templates: usize,
    identities: &[usize],
    config: &GaConfig,
    dataset: &Dataset,
) -> Result<Vec<Reconstruction>> {
    config.validate()?;
    if n_templates < 1 {
        return Err(Error::param("n_templates", "must be at least 1"));
    }
    if dataset.samples_per_class() < n_templates + 1 {
        return Err(Error::param(
            "n_templates",
            format!("needs {} samples per class, dataset has {}", n_templates + 1, dataset.samples_per_class()),
        ));
    }
    if let Some(&bad) = identities.iter().find(|&&i| i >= dataset.n_classes()) {
        return Err(Error::param("identities", format!("identity {bad} not in dataset")));
    }
    let space = default_space(dataset)?;
    let mut out = identities
        .par_iter()
        .map(|&identity| {
            let templates: Vec<ProtectedTemplate> = (1..=n_templates)
                .map(|k| sys_c.transform(dataset.feature(sample_index(dataset, identity, k))))
                .collect::<Result<_>>()?;
            let cfg = identity_config(config, identity, &space);
            let result = ga_minimize(&cfg, |x| objective(x.feature(), &templates, sys_c))?;
            Ok(Reconstruction {
                identity,
                n_templates,
                result,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|r| r.identity);
    Ok(out)
}

/// Scores each pre-image under `sys_t` against the identity's enrolled sample.
pub fn score_reconstructions(sys_t: &SchemeKey, reconstructions: &[Reconstruction], dataset: &Dataset) -> Result<CampaignResult> {
    let outcomes = reconstructions
        .par_iter()
        .map(|r| {
            let enrolled = sys_t.transform(dataset.feature(sample_index(dataset, r.identity, ENROLLED_SAMPLE)))?;
            let probe = sys_t.transform(r.result.preimage.feature())?;
            Ok(IdentityOutcome {
                identity: r.identity,
                n_templates: r.n_templates,
                final_objective: r.result.final_objective(),
                generations: r.result.generations_used,
                converged: r.result.converged,
                mated_imposter_score: sys_t.similarity(&probe, &enrolled)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CampaignResult {
        outcomes,
        traces: reconstructions.iter().map(|r| (r.identity, r.result.objective_trace.clone())).collect(),
    })
}

/// Reconstruct from Sys C, then present to Sys T.
pub fn run_campaign(scenario: &AttackScenario, config: &GaConfig, dataset: &Dataset) -> Result<CampaignResult> {
    scenario.validate()?;
    let recon = reconstruct(&scenario.sys_c, scenario.n_templates, &scenario.identities, config, dataset)?;
    score_reconstructions(&scenario.sys_t, &recon, dataset)
}
