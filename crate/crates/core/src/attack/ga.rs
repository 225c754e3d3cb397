use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BinaryCode;
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};
use crate::synthdata::{BinaryCodeSet, RealFeatureSet};

/// Widening applied to the training range of each real gene.
pub const BOUNDS_MARGIN: f64 = 0.1;
/// Default Gaussian mutation std as a fraction of each gene's range.
pub const SIGMA_FRACTION: f64 = 0.1;

/// Search space of a chromosome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChromosomeSpace {
    Real { lo: Vec<f64>, hi: Vec<f64> },
    Bits { height: usize, width: usize },
}

impl ChromosomeSpace {
    /// Per-dimension `[min, max]` of the training features, widened by 10% of
    /// the range on each side.
    pub fn from_features(training: &RealFeatureSet) -> Result<Self> {
        let dim = training.dim;
        if training.features.is_empty() {
            return Err(Error::param("training", "no features"));
        }
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for x in &training.features {
            for ((l, h), &v) in lo.iter_mut().zip(hi.iter_mut()).zip(x) {
                *l = l.min(v);
                *h = h.max(v);
            }
        }
        for (l, h) in lo.iter_mut().zip(hi.iter_mut()) {
            let pad = BOUNDS_MARGIN * (*h - *l).max(f64::EPSILON);
            *l -= pad;
            *h += pad;
        }
        Ok(ChromosomeSpace::Real { lo, hi })
    }

    pub fn from_codes(training: &BinaryCodeSet) -> Self {
        ChromosomeSpace::Bits {
            height: training.height,
            width: training.width,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ChromosomeSpace::Real { lo, .. } => lo.len(),
            ChromosomeSpace::Bits { height, width } => height * width,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        match self {
            ChromosomeSpace::Real { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(Error::param("bounds", "lo and hi must be non-empty and equally long"));
                }
                if lo.iter().zip(hi).any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite()) {
                    return Err(Error::param("bounds", "every gene needs finite lo < hi"));
                }
            }
            ChromosomeSpace::Bits { height, width } => {
                if height * width == 0 {
                    return Err(Error::param("bounds", "binary chromosome must have at least one bit"));
                }
            }
        }
        Ok(())
    }
}

/// How two parents are recombined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Crossover {
    /// Each gene from either parent with equal probability.
    Uniform,
    /// Prefix of one parent, suffix of the other.
    SinglePoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaConfig {
    pub population_size: usize,
    pub crossover_fraction: f64,
    pub crossover: Crossover,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Gaussian std for real genes; `None` means 10% of each gene's range.
    pub mutation_sigma: Option<f64>,
    /// The std decays linearly to `1 - mutation_shrink` of its initial value
    /// at `max_generations`; 0 keeps it fixed.
    pub mutation_shrink: f64,
    /// Generation cap ε.
    pub max_generations: usize,
    /// Stopping tolerance δ on the best objective.
    pub tolerance: f64,
    /// Window `W` of the stopping test: stop once the best objective improved
    /// by less than `tolerance` over the last `W` generations. `W = 1`
    /// compares successive generations.
    pub stall_generations: usize,
    pub seed: u64,
    /// Chromosome space; campaigns fill it from the dataset when absent.
    pub space: Option<ChromosomeSpace>,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 200,
            crossover_fraction: 0.9,
            crossover: Crossover::Uniform,
            mutation_rate: 0.01,
            mutation_sigma: None,
            mutation_shrink: 1.0,
            max_generations: 100,
            tolerance: 1e-6,
            stall_generations: 10,
            seed: 0,
            space: None,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 {
            return Err(Error::param("population_size", "must be at least 4"));
        }
        if !(0.0..=1.0).contains(&self.crossover_fraction) {
            return Err(Error::param("crossover_fraction", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::param("mutation_rate", "must lie in [0, 1]"));
        }
        if let Some(s) = self.mutation_sigma {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::param("mutation_sigma", "must be positive and finite"));
            }
        }
        if !(0.0..=1.0).contains(&self.mutation_shrink) {
            return Err(Error::param("mutation_shrink", "must lie in [0, 1]"));
        }
        if self.max_generations < 1 {
            return Err(Error::param("max_generations", "must be at least 1"));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::param("tolerance", "must be non-negative"));
        }
        if self.stall_generations < 1 {
            return Err(Error::param("stall_generations", "must be at least 1"));
        }
        if let Some(space) = &self.space {
            space.validate()?;
        }
        Ok(())
    }
}

/// A candidate pre-image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "lowercase")]
pub enum Preimage {
    Real(Vec<f64>),
    Bits(BinaryCode),
}

impl Preimage {
    pub fn feature(&self) -> crate::schemes::FeatureRef<'_> {
        match self {
            Preimage::Real(x) => crate::schemes::FeatureRef::Real(x),
            Preimage::Bits(c) => crate::schemes::FeatureRef::Binary(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackResult {
    pub preimage: Preimage,
    /// Best objective so far after each generation; entry 0 is the initial
    /// population, so the length equals `generations_used`.
    pub objective_trace: Vec<f64>,
    pub generations_used: usize,
    pub converged: bool,
}

impl AttackResult {
    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace is never empty")
    }
}

struct Individual<G> {
    genes: Vec<G>,
    fitness: f64,
}

/// Gene-level operators for one encoding.
trait Encoding: Sync {
    type Gene: Copy + Send + Sync;
    fn random(&self, rng: &mut StreamRng) -> Vec<Self::Gene>;
    fn mutate_gene(&self, i: usize, g: Self::Gene, scale: f64, rng: &mut StreamRng) -> Self::Gene;
}

struct RealEncoding<'a> {
    lo: &'a [f64],
    hi: &'a [f64],
    sigma: Vec<f64>,
}

impl Encoding for RealEncoding<'_> {
    type Gene = f64;

    fn random(&self, rng: &mut StreamRng) -> Vec<f64> {
        self.lo.iter().zip(self.hi).map(|(&l, &h)| rng.random_range(l..h)).collect()
    }

    fn mutate_gene(&self, i: usize, g: f64, scale: f64, rng: &mut StreamRng) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        (g + scale * self.sigma[i] * z).clamp(self.lo[i], self.hi[i])
    }
}

struct BitEncoding {
    len: usize,
}

impl Encoding for BitEncoding {
    type Gene = u8;

    fn random(&self, rng: &mut StreamRng) -> Vec<u8> {
        (0..self.len).map(|_| rng.random::<bool>() as u8).collect()
    }

    fn mutate_gene(&self, _: usize, g: u8, _: f64, _: &mut StreamRng) -> u8 {
        g ^ 1
    }
}

/// Minimises `objective` over `config.space`.
///
/// Each generation keeps the single best individual and replaces the rest
/// with children bred from the top-ranked half: a `crossover_fraction` share
/// by crossover of two parents followed by per-gene mutation,
/// the remainder by mutating one parent with at least one gene changed. Real genes mutate by adding
/// zero-mean Gaussian noise whose std shrinks over the run and are clamped to
/// the bounds; bit genes flip.
/// Only new children are evaluated, concurrently; ties keep insertion order.
pub fn ga_minimize<F>(config: &GaConfig, objective: F) -> Result<AttackResult>
where
    F: Fn(&Preimage) -> Result<f64> + Sync,
{
    config.validate()?;
    let space = config
        .space
        .as_ref()
        .ok_or_else(|| Error::param("space", "chromosome space is required"))?;
    let mut rng = rng::stream(config.seed, "attack/ga");
    match space {
        ChromosomeSpace::Real { lo, hi } => {
            let sigma = lo
                .iter()
                .zip(hi)
                .map(|(l, h)| config.mutation_sigma.unwrap_or(SIGMA_FRACTION * (h - l)))
                .collect();
            let enc = RealEncoding { lo, hi, sigma };
            evolve(config, &enc, &mut rng, |g: &[f64]| objective(&Preimage::Real(g.to_vec())), |g| Preimage::Real(g))
        }
        &ChromosomeSpace::Bits { height, width } => {
            let enc = BitEncoding { len: height * width };
            let wrap = move |g: Vec<u8>| Preimage::Bits(BinaryCode::new(height, width, g).expect("bits are 0/1"));
            evolve(config, &enc, &mut rng, |g: &[u8]| objective(&wrap(g.to_vec())), wrap)
        }
    }
}

fn evolve<E, F, W>(config: &GaConfig, enc: &E, rng: &mut StreamRng, fitness: F, wrap: W) -> Result<AttackResult>
where
    E: Encoding,
    F: Fn(&[E::Gene]) -> Result<f64> + Sync,
    W: Fn(Vec<E::Gene>) -> Preimage,
{
    let pop_size = config.population_size;
    let n_children = pop_size - 1;
    let n_cross = (config.crossover_fraction * n_children as f64).round() as usize;

    let initial: Vec<Vec<E::Gene>> = (0..pop_size).map(|_| enc.random(rng)).collect();
    let mut population = evaluate(initial, &fitness)?;
    rank(&mut population);

    // The initial population is generation 1; trace[g - 1] is the best
    // objective after generation g.
    let mut trace = vec![population[0].fitness];
    let mut converged = false;
    while trace.len() < config.max_generations {
        let scale = 1.0 - config.mutation_shrink * (trace.len() - 1) as f64 / config.max_generations as f64;
        let parents = &population[..pop_size / 2];
        let mut children = Vec::with_capacity(n_children);
        for c in 0..n_children {
            let a = &parents[rng.random_range(0..parents.len())].genes;
            let child = if c < n_cross {
                let b = &parents[rng.random_range(0..parents.len())].genes;
                let mut child = crossover(config.crossover, a, b, rng);
                mutate(enc, &mut child, config.mutation_rate, scale, false, rng);
                child
            } else {
                let mut child = a.clone();
                mutate(enc, &mut child, config.mutation_rate, scale, true, rng);
                child
            };
            children.push(child);
        }

        let elite = population.swap_remove(0);
        population = evaluate(children, &fitness)?;
        population.insert(0, elite);
        rank(&mut population);

        let best = population[0].fitness;
        trace.push(best);
        let w = config.stall_generations;
        if trace.len() > w && trace[trace.len() - 1 - w] - best < config.tolerance {
            converged = true;
            break;
        }
    }

    let best = population.swap_remove(0);
    Ok(AttackResult {
        preimage: wrap(best.genes),
        generations_used: trace.len(),
        objective_trace: trace,
        converged,
    })
}

fn evaluate<G, F>(genomes: Vec<Vec<G>>, fitness: &F) -> Result<Vec<Individual<G>>>
where
    G: Send + Sync,
    F: Fn(&[G]) -> Result<f64> + Sync,
{
    genomes
        .into_par_iter()
        .map(|genes| {
            let fitness = fitness(&genes)?;
            if fitness.is_nan() {
                return Err(Error::param("objective", "returned NaN"));
            }
            Ok(Individual { genes, fitness })
        })
        .collect()
}

/// Stable sort: equally fit individuals keep their insertion order.
fn rank<G>(population: &mut [Individual<G>]) {
    population.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
}

fn crossover<G: Copy>(kind: Crossover, a: &[G], b: &[G], rng: &mut StreamRng) -> Vec<G> {
    if a.len() < 2 {
        return a.to_vec();
    }
    match kind {
        Crossover::Uniform => a.iter().zip(b).map(|(x, y)| if rng.random::<bool>() { *x } else { *y }).collect(),
        Crossover::SinglePoint => {
            let cut = rng.random_range(1..a.len());
            a[..cut].iter().chain(&b[cut..]).copied().collect()
        }
    }
}

fn mutate<E: Encoding>(enc: &E, genes: &mut [E::Gene], rate: f64, scale: f64, at_least_one: bool, rng: &mut StreamRng) {
    let mut changed = false;
    for (i, g) in genes.iter_mut().enumerate() {
        if rng.random::<f64>() < rate {
            *g = enc.mutate_gene(i, *g, scale, rng);
            changed = true;
        }
    }
    if at_least_one && !changed {
        let i = rng.random_range(0..genes.len());
        genes[i] = enc.mutate_gene(i, genes[i], scale, rng);
    }
}
