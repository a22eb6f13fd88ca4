//! Genetic search for sequential (cut vector) and vertical (assignment
//! vector) plans.
//!
//! Every random draw comes from a ChaCha stream keyed by
//! `(seed, generation, slot)`, so offspring are identical whether fitness and
//! breeding run on one thread or many.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_feasible, SequentialPlan, VerticalPlan};
use crate::energy::{max_total, spread, CostTable, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::model::NetworkModel;
use crate::profile::DeviceProfile;

/// What the planners minimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Largest per-partition energy.
    #[default]
    Max,
    /// Difference between the largest and smallest partition energy.
    Spread,
}

impl Objective {
    pub(crate) fn score(self, parts: &[EnergyBreakdown]) -> f64 {
        match self {
            Objective::Max => max_total(parts),
            Objective::Spread => spread(parts),
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Objective::Max),
            "spread" => Ok(Objective::Spread),
            _ => Err(Error::Validation(format!("unknown objective '{s}' (expected max or spread)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub seed: u64,
    #[serde(default)]
    pub objective: Objective,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 64,
            generations: 200,
            mutation_rate: 0.05,
            tournament_size: 3,
            seed: 0,
            objective: Objective::Max,
        }
    }
}

impl GaConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 || self.generations == 0 {
            return Err(Error::Validation("population size and generations must be positive".into()));
        }
        if self.tournament_size < 2 || self.tournament_size > self.population_size {
            return Err(Error::Validation(format!(
                "tournament size {} must be in 2..={}",
                self.tournament_size, self.population_size
            )));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::Validation(format!("mutation rate {} is not a probability", self.mutation_rate)));
        }
        Ok(())
    }
}

trait Encoding: Sync {
    type Genome: Clone + Send + Sync;

    fn random(&self, rng: &mut ChaCha8Rng) -> Self::Genome;
    fn crossover(&self, a: &Self::Genome, b: &Self::Genome, rng: &mut ChaCha8Rng) -> Self::Genome;
    fn mutate(&self, g: &mut Self::Genome, rate: f64, rng: &mut ChaCha8Rng);
    fn fitness(&self, g: &Self::Genome) -> f64;
}

fn stream(seed: u64, generation: usize, slot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((generation as u64) << 32) | slot as u64);
    rng
}

fn tournament(fitness: &[f64], size: usize, rng: &mut ChaCha8Rng) -> usize {
    let mut best = rng.gen_range(0..fitness.len());
    for _ in 1..size {
        let k = rng.gen_range(0..fitness.len());
        if fitness[k] < fitness[best] || (fitness[k] == fitness[best] && k < best) {
            best = k;
        }
    }
    best
}

fn argmin(fitness: &[f64]) -> usize {
    let mut best = 0;
    for (k, &f) in fitness.iter().enumerate() {
        if f < fitness[best] {
            best = k;
        }
    }
    best
}

/// Generational GA with elitism of one. Returns the best genome ever evaluated.
fn evolve<E: Encoding>(enc: &E, cfg: &GaConfig) -> (E::Genome, f64) {
    let mut population: Vec<E::Genome> = (0..cfg.population_size)
        .into_par_iter()
        .map(|slot| enc.random(&mut stream(cfg.seed, 0, slot)))
        .collect();
    let mut fitness: Vec<f64> = population.par_iter().map(|g| enc.fitness(g)).collect();

    let mut lead = argmin(&fitness);
    let mut best = (population[lead].clone(), fitness[lead]);

    for generation in 1..=cfg.generations {
        let elite = population[lead].clone();
        let children: Vec<E::Genome> = (1..cfg.population_size)
            .into_par_iter()
            .map(|slot| {
                let mut rng = stream(cfg.seed, generation, slot);
                let a = tournament(&fitness, cfg.tournament_size, &mut rng);
                let b = tournament(&fitness, cfg.tournament_size, &mut rng);
                let mut child = enc.crossover(&population[a], &population[b], &mut rng);
                enc.mutate(&mut child, cfg.mutation_rate, &mut rng);
                child
            })
            .collect();

        population = std::iter::once(elite).chain(children).collect();
        fitness = population.par_iter().map(|g| enc.fitness(g)).collect();
        lead = argmin(&fitness);
        if fitness[lead] < best.1 {
            best = (population[lead].clone(), fitness[lead]);
        }
    }
    best
}

/// Cut-vector encoding: `M - 1` sorted, distinct cut positions in `1..L`,
/// a cut `c` ending a group after layer `c`.
struct CutEncoding<'a> {
    costs: &'a CostTable,
    cuts: usize,
    objective: Objective,
}

impl CutEncoding<'_> {
    fn positions(&self) -> usize {
        self.costs.layers() - 1
    }

    fn repair(&self, g: &mut Vec<usize>, rng: &mut ChaCha8Rng) {
        g.sort_unstable();
        g.dedup();
        while g.len() < self.cuts {
            let c = rng.gen_range(1..=self.positions());
            if let Err(at) = g.binary_search(&c) {
                g.insert(at, c);
            }
        }
    }

    fn groups(&self, g: &[usize]) -> Vec<EnergyBreakdown> {
        let mut out = Vec::with_capacity(g.len() + 1);
        let mut first = 0;
        for (k, &c) in g.iter().enumerate() {
            out.push(self.costs.group(k + 1, first, c - 1));
            first = c;
        }
        out.push(self.costs.group(g.len() + 1, first, self.costs.layers() - 1));
        out
    }
}

impl Encoding for CutEncoding<'_> {
    type Genome = Vec<usize>;

    fn random(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut g: Vec<usize> = sample(rng, self.positions(), self.cuts).into_iter().map(|c| c + 1).collect();
        g.sort_unstable();
        g
    }

    fn crossover(&self, a: &Vec<usize>, b: &Vec<usize>, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let point = rng.gen_range(0..=self.cuts);
        let mut child: Vec<usize> = a[..point].iter().chain(&b[point..]).copied().collect();
        self.repair(&mut child, rng);
        child
    }

    fn mutate(&self, g: &mut Vec<usize>, rate: f64, rng: &mut ChaCha8Rng) {
        for gene in g.iter_mut() {
            if rng.gen_bool(rate) {
                *gene = rng.gen_range(1..=self.positions());
            }
        }
        self.repair(g, rng);
    }

    fn fitness(&self, g: &Vec<usize>) -> f64 {
        self.objective.score(&self.groups(g))
    }
}

/// Assignment encoding: one 0-based partition per layer, every partition used.
struct AssignmentEncoding<'a> {
    costs: &'a CostTable,
    partitions: usize,
    objective: Objective,
}

impl AssignmentEncoding<'_> {
    /// Gives every empty partition a layer taken from a partition holding more than one.
    fn repair(&self, g: &mut [usize], rng: &mut ChaCha8Rng) {
        let mut counts = vec![0usize; self.partitions];
        for &p in g.iter() {
            counts[p] += 1;
        }
        for missing in 0..self.partitions {
            if counts[missing] > 0 {
                continue;
            }
            let donors: Vec<usize> = (0..g.len()).filter(|&k| counts[g[k]] > 1).collect();
            let k = donors[rng.gen_range(0..donors.len())];
            counts[g[k]] -= 1;
            g[k] = missing;
            counts[missing] = 1;
        }
    }
}

impl Encoding for AssignmentEncoding<'_> {
    type Genome = Vec<usize>;

    fn random(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut g: Vec<usize> = (0..self.costs.layers()).map(|_| rng.gen_range(0..self.partitions)).collect();
        self.repair(&mut g, rng);
        g
    }

    fn crossover(&self, a: &Vec<usize>, b: &Vec<usize>, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let point = rng.gen_range(0..=a.len());
        let mut child: Vec<usize> = a[..point].iter().chain(&b[point..]).copied().collect();
        self.repair(&mut child, rng);
        child
    }

    fn mutate(&self, g: &mut Vec<usize>, rate: f64, rng: &mut ChaCha8Rng) {
        for gene in g.iter_mut() {
            if rng.gen_bool(rate) {
                *gene = rng.gen_range(0..self.partitions);
            }
        }
        self.repair(g, rng);
    }

    fn fitness(&self, g: &Vec<usize>) -> f64 {
        self.objective.score(&self.costs.vertical(g, self.partitions))
    }
}

/// Contiguous grouping found by genetic search.
pub fn plan_sequential_ga(model: &NetworkModel, profile: &DeviceProfile, partitions: usize, config: &GaConfig) -> Result<SequentialPlan> {
    check_feasible(model, partitions)?;
    config.validate()?;
    let costs = CostTable::new(model, profile)?;
    let layers = model.len();
    if partitions == layers {
        return Ok(SequentialPlan::from_cuts(layers, &(1..layers).collect::<Vec<_>>()));
    }
    if partitions == 1 {
        return Ok(SequentialPlan::from_cuts(layers, &[]));
    }
    let enc = CutEncoding { costs: &costs, cuts: partitions - 1, objective: config.objective };
    let (cuts, _) = evolve(&enc, config);
    Ok(SequentialPlan::from_cuts(layers, &cuts))
}

/// Free assignment found by genetic search.
pub fn plan_vertical_ga(model: &NetworkModel, profile: &DeviceProfile, partitions: usize, config: &GaConfig) -> Result<VerticalPlan> {
    check_feasible(model, partitions)?;
    config.validate()?;
    let costs = CostTable::new(model, profile)?;
    if partitions == 1 {
        return Ok(VerticalPlan { partitions, assignment: vec![1; model.len()] });
    }
    let enc = AssignmentEncoding { costs: &costs, partitions, objective: config.objective };
    let (genome, _) = evolve(&enc, config);
    Ok(VerticalPlan { partitions, assignment: genome.into_iter().map(|p| p + 1).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        GaConfig::default().validate().unwrap();
        assert!(GaConfig { tournament_size: 1, ..GaConfig::default() }.validate().is_err());
        assert!(GaConfig { mutation_rate: 1.5, ..GaConfig::default() }.validate().is_err());
        assert!(GaConfig { population_size: 2, ..GaConfig::default() }.validate().is_err());
    }

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let a: u64 = stream(7, 3, 4).gen();
        let b: u64 = stream(7, 3, 4).gen();
        let c: u64 = stream(7, 3, 5).gen();
        let d: u64 = stream(7, 4, 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn assignment_repair_makes_surjective() {
        let costs = CostTable {
            comp: vec![1.0; 6],
            in_comm: vec![0.0; 6],
            ex_comm: vec![0.0; 6],
            send: vec![0.0; 6],
            recv: vec![0.0; 6],
        };
        let enc = AssignmentEncoding { costs: &costs, partitions: 4, objective: Objective::Max };
        let mut rng = stream(1, 0, 0);
        for _ in 0..100 {
            let mut g = vec![0; 6];
            enc.repair(&mut g, &mut rng);
            let mut seen = g.clone();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen, vec![0, 1, 2, 3]);
        }
    }
}
