//! Subcommand implementations. Each writes its outputs into one directory
//! and returns the primary report.

use std::fs;
use std::path::Path;

use cbleak_core::attack::{reconstruct, score_reconstructions, AttackScenario, CampaignResult};
use cbleak_core::leakage::{blahut_arimoto_capped, estimate_transition_matrix, scheme_distance_pairs, LeakageResult, TransitionMatrix};
use cbleak_core::metrics::{generate_scores, EvalReport, ScoreSet};
use cbleak_core::{Dataset, SchemeKey};
use serde::Serialize;

use crate::config::{ExperimentConfig, SweepTarget};
use crate::error::CliError;

/// Dataset and keys drawn from a config.
pub struct Setup {
    pub config: ExperimentConfig,
    pub dataset: Dataset,
    pub sys_c: SchemeKey,
    pub sys_t: SchemeKey,
}

impl Setup {
    pub fn build(config: &ExperimentConfig) -> Result<Self, CliError> {
        let dataset = config.dataset.generate().map_err(CliError::from_setup)?;
        Self::with_dataset(config, dataset)
    }

    fn with_dataset(config: &ExperimentConfig, dataset: Dataset) -> Result<Self, CliError> {
        let key = |sys: &crate::config::SystemConfig, name: &str| {
            sys.transform
                .keygen(&dataset, sys.key_seed)
                .map_err(|e| CliError::config(format!("{name}: {e}")))
        };
        let sys_c = key(&config.sys_c, "sys_c")?;
        let sys_t = key(&config.sys_t, "sys_t")?;
        if let Some(attack) = &config.attack {
            AttackScenario {
                sys_c: sys_c.clone(),
                sys_t: sys_t.clone(),
                n_templates: attack.n_templates,
                identities: Vec::new(),
            }
            .validate()
            .map_err(CliError::from_setup)?;
            if dataset.samples_per_class() < attack.n_templates + 1 {
                return Err(CliError::config(format!(
                    "attack.n_templates = {} needs at least {} samples per class",
                    attack.n_templates,
                    attack.n_templates + 1
                )));
            }
            if let Some(&bad) = attack.identities.iter().flatten().find(|&&i| i >= dataset.n_classes()) {
                return Err(CliError::config(format!("attack.identities: {bad} is not a class of the dataset")));
            }
        }
        Ok(Self {
            config: config.clone(),
            dataset,
            sys_c,
            sys_t,
        })
    }
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(dir.join(name), text)?;
    Ok(())
}

pub fn write_config(dir: &Path, config: &ExperimentConfig) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    write_json(dir, "config.json", config)
}

pub fn cmd_gen(setup: &Setup, out: &Path) -> Result<(), CliError> {
    fs::write(out.join("dataset.txt"), setup.dataset.to_text())?;
    for (name, key) in [("sys_c.key", &setup.sys_c), ("sys_t.key", &setup.sys_t)] {
        let mut text = key.to_text()?;
        text.push('\n');
        fs::write(out.join(name), text)?;
    }
    #[derive(Serialize)]
    struct Summary {
        samples: usize,
        classes: usize,
        samples_per_class: usize,
    }
    write_json(
        out,
        "dataset_summary.json",
        &Summary {
            samples: setup.dataset.len(),
            classes: setup.dataset.n_classes(),
            samples_per_class: setup.dataset.samples_per_class(),
        },
    )
}

fn normal_scores(setup: &Setup) -> Result<ScoreSet, CliError> {
    let m = &setup.config.metrics;
    Ok(generate_scores(&setup.dataset, &setup.sys_t, m.max_non_mated, m.seed)?)
}

fn write_scores(out: &Path, scores: &ScoreSet) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(out.join("scores.csv"))?;
    w.write_record(["kind", "score"])?;
    let imposter = scores.mated_imposter.as_deref().unwrap_or(&[]);
    for (kind, list) in [("mated", &scores.mated[..]), ("non_mated", &scores.non_mated[..]), ("mated_imposter", imposter)] {
        for s in list {
            w.write_record([kind, &s.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Normal operation of Sys T: θ, EER and FMR@ET.
pub fn evaluate(setup: &Setup) -> Result<(EvalReport, ScoreSet), CliError> {
    let scores = normal_scores(setup)?;
    Ok((EvalReport::from_scores(&scores)?, scores))
}

pub fn cmd_eval(setup: &Setup, out: &Path) -> Result<EvalReport, CliError> {
    let (report, scores) = evaluate(setup)?;
    if setup.config.metrics.dump_scores {
        write_scores(out, &scores)?;
    }
    write_json(out, "eval_report.json", &report)?;
    Ok(report)
}

#[derive(Debug, Serialize)]
pub struct AttackSummary {
    pub sys_c: &'static str,
    pub sys_t: &'static str,
    pub n_templates: usize,
    pub identities: usize,
    pub mean_final_objective: f64,
    pub converged_fraction: f64,
    pub report: EvalReport,
}

pub fn attack(setup: &Setup) -> Result<(AttackSummary, ScoreSet, CampaignResult), CliError> {
    let (ga, attack) = setup.config.ga_config()?;
    let identities: Vec<usize> = match &attack.identities {
        Some(ids) => ids.clone(),
        None => (0..setup.dataset.n_classes()).collect(),
    };
    let recon = reconstruct(&setup.sys_c, attack.n_templates, &identities, &ga, &setup.dataset)?;
    let campaign = score_reconstructions(&setup.sys_t, &recon, &setup.dataset)?;
    let mut scores = normal_scores(setup)?;
    scores.mated_imposter = Some(campaign.mated_imposter_scores());
    let summary = AttackSummary {
        sys_c: setup.sys_c.kind().name(),
        sys_t: setup.sys_t.kind().name(),
        n_templates: attack.n_templates,
        identities: identities.len(),
        mean_final_objective: campaign.mean_final_objective(),
        converged_fraction: campaign.converged_fraction(),
        report: EvalReport::from_scores(&scores)?,
    };
    Ok((summary, scores, campaign))
}

pub fn cmd_attack(setup: &Setup, out: &Path) -> Result<AttackSummary, CliError> {
    let (summary, scores, campaign) = attack(setup)?;
    let mut w = csv::Writer::from_path(out.join("campaign.csv"))?;
    for o in &campaign.outcomes {
        w.serialize(o)?;
    }
    w.flush()?;
    if setup.config.attack.as_ref().is_some_and(|a| a.write_traces) {
        let mut w = csv::Writer::from_path(out.join("traces.csv"))?;
        w.write_record(["identity", "generation", "best_objective"])?;
        for (identity, trace) in &campaign.traces {
            for (g, v) in trace.iter().enumerate() {
                w.write_record([identity.to_string(), (g + 1).to_string(), v.to_string()])?;
            }
        }
        w.flush()?;
    }
    if setup.config.metrics.dump_scores {
        write_scores(out, &scores)?;
    }
    write_json(out, "attack_report.json", &summary)?;
    Ok(summary)
}

pub fn leakage(setup: &Setup) -> Result<(LeakageResult, TransitionMatrix), CliError> {
    let cfg = &setup.config.leakage;
    let pairs = scheme_distance_pairs(&setup.dataset, &setup.sys_t)?;
    let c = estimate_transition_matrix(&pairs, cfg.bin_width)?;
    let result = blahut_arimoto_capped(&c, cfg.delta, cfg.max_iterations)?;
    Ok((result, c))
}

pub fn cmd_leakage(setup: &Setup, out: &Path) -> Result<LeakageResult, CliError> {
    let (result, c) = leakage(setup)?;
    fs::write(out.join("transition_matrix.csv"), c.to_csv())?;
    write_json(out, "leakage.json", &result)?;
    Ok(result)
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    pub eer: f64,
    pub theta: f64,
    pub fmr_at_et: f64,
    pub sar: Option<f64>,
    pub delta_fmr: Option<f64>,
    pub mean_final_objective: Option<f64>,
    pub lambda_max: Option<f64>,
}

fn sweep_variant(config: &ExperimentConfig, parameter: &str, target: SweepTarget, value: f64) -> Result<ExperimentConfig, CliError> {
    let mut variant = config.clone();
    if parameter == "n_templates" {
        let attack = variant
            .attack
            .as_mut()
            .ok_or_else(|| CliError::config("sweeping n_templates needs an `attack` section"))?;
        if !(value >= 1.0 && value.fract() == 0.0) {
            return Err(CliError::config(format!("n_templates value {value} is not a positive integer")));
        }
        attack.n_templates = value as usize;
        return Ok(variant);
    }
    let apply = |sys: &mut crate::config::SystemConfig| -> Result<(), CliError> {
        sys.transform = sys.transform.with_param(parameter, value).map_err(|e| CliError::config(e.to_string()))?;
        Ok(())
    };
    if matches!(target, SweepTarget::Both | SweepTarget::SysC) {
        apply(&mut variant.sys_c)?;
    }
    if matches!(target, SweepTarget::Both | SweepTarget::SysT) {
        apply(&mut variant.sys_t)?;
    }
    Ok(variant)
}

pub fn cmd_sweep(config: &ExperimentConfig, dataset: Dataset, out: &Path) -> Result<Vec<SweepRow>, CliError> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("the sweep command needs a `sweep` section"))?;
    if sweep.values.is_empty() {
        return Err(CliError::config("sweep.values must not be empty"));
    }
    if sweep.attack && config.attack.is_none() {
        return Err(CliError::config("sweep.attack needs an `attack` section"));
    }
    // Validate every variant before spending time on any of them.
    let setups = sweep
        .values
        .iter()
        .map(|&v| {
            let variant = sweep_variant(config, &sweep.parameter, sweep.target, v)?;
            variant.check()?;
            Setup::with_dataset(&variant, dataset.clone())
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::new();
    for (setup, &value) in setups.iter().zip(&sweep.values) {
        let (mut report, mut objective) = (evaluate(setup)?.0, None);
        if sweep.attack {
            let (summary, _, _) = attack(setup)?;
            objective = Some(summary.mean_final_objective);
            report = summary.report;
        }
        let lambda_max = if sweep.leakage { Some(leakage(setup)?.0.lambda_max) } else { None };
        rows.push(SweepRow {
            parameter: sweep.parameter.clone(),
            value,
            eer: report.eer,
            theta: report.theta,
            fmr_at_et: report.fmr_at_et,
            sar: report.sar,
            delta_fmr: report.delta_fmr,
            mean_final_objective: objective,
            lambda_max,
        });
    }
    let mut w = csv::Writer::from_path(out.join("sweep.csv"))?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    write_json(out, "sweep.json", &rows)?;
    Ok(rows)
}
