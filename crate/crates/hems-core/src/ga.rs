//! Genetic algorithm over genomes: tournament selection, two-point
//! crossover, uniform mutation, elitism. Fully deterministic per seed.
//!
//! Stream discipline: all randomness comes from one seeded generator.
//! Initialization draws population_size - 1 random genomes in order.
//! Each generation then fills the non-elite slots pair by pair, drawing
//! in a fixed order: parent A tournament, parent B tournament, crossover,
//! mutation of child one, mutation of child two. A pair is always fully
//! generated even when only one slot remains.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baseline::{baseline_genome, baseline_metrics};
use crate::domain::genome::{GeneKind, Genome, GenomeLayout};
use crate::domain::problem::Problem;
use crate::error::{Error, Result};
use crate::objective::{evaluate_genome, fitness};
use crate::result::OptimizationResult;

#[derive(Debug, Clone, PartialEq)]
pub struct GAParams {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_prob: f64,
    /// Per-gene mutation probability; None means 1/L for genome length L.
    pub mutation_prob_per_gene: Option<f64>,
    pub elite_count: usize,
    pub seed: u64,
}

impl GAParams {
    pub fn new(seed: u64) -> Self {
        Self {
            population_size: 100,
            generations: 200,
            tournament_size: 2,
            crossover_prob: 0.9,
            mutation_prob_per_gene: None,
            elite_count: 1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::config("population_size must be at least 2"));
        }
        if self.generations < 1 {
            return Err(Error::config("generations must be at least 1"));
        }
        if self.tournament_size < 2 || self.tournament_size > self.population_size {
            return Err(Error::Config(format!(
                "tournament_size must be in 2..={}, got {}",
                self.population_size, self.tournament_size
            )));
        }
        if self.elite_count >= self.population_size {
            return Err(Error::Config(format!(
                "elite_count {} must be below population_size {}",
                self.elite_count, self.population_size
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return Err(Error::Config(format!(
                "crossover_prob must be in [0,1], got {}",
                self.crossover_prob
            )));
        }
        if let Some(p) = self.mutation_prob_per_gene {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!(
                    "mutation_prob_per_gene must be in [0,1], got {p}"
                )));
            }
        }
        Ok(())
    }

    fn mutation_prob(&self, genome_len: usize) -> f64 {
        self.mutation_prob_per_gene
            .unwrap_or(1.0 / genome_len.max(1) as f64)
    }
}

/// Seeded initial population: index 0 is the baseline genome, the rest are
/// uniform random.
pub fn init_population<R: Rng + ?Sized>(
    problem: &Problem,
    params: &GAParams,
    baseline: Genome,
    rng: &mut R,
) -> Vec<Genome> {
    let mut population = Vec::with_capacity(params.population_size);
    population.push(baseline);
    while population.len() < params.population_size {
        population.push(problem.layout().random_genome(rng));
    }
    population
}

/// Draws tournament_size distinct population indices uniformly and returns
/// the index with minimal fitness, ties to the lowest index.
pub fn tournament_select<R: Rng + ?Sized>(
    fitnesses: &[f64],
    tournament_size: usize,
    rng: &mut R,
) -> usize {
    rand::seq::index::sample(rng, fitnesses.len(), tournament_size)
        .iter()
        .min_by(|&a, &b| fitnesses[a].total_cmp(&fitnesses[b]).then(a.cmp(&b)))
        .expect("tournament_size is at least 1")
}

/// With probability crossover_prob, swaps the genes in [c1, c2) for cut
/// points 0 <= c1 < c2 <= L; otherwise returns plain copies. Start genes
/// swap as whole units because cuts land between genes.
pub fn two_point_crossover<R: Rng + ?Sized>(
    a: &Genome,
    b: &Genome,
    crossover_prob: f64,
    rng: &mut R,
) -> (Genome, Genome) {
    let l = a.len();
    if l == 0 || rng.random::<f64>() >= crossover_prob {
        return (a.clone(), b.clone());
    }
    let picks = rand::seq::index::sample(rng, l + 1, 2);
    let (c1, c2) = (
        picks.index(0).min(picks.index(1)),
        picks.index(0).max(picks.index(1)),
    );
    let mut child_a = a.clone();
    let mut child_b = b.clone();
    child_a[c1..c2].copy_from_slice(&b[c1..c2]);
    child_b[c1..c2].copy_from_slice(&a[c1..c2]);
    (child_a, child_b)
}

/// Independently per gene with the given probability: bits flip, start
/// genes redraw uniformly over their full range.
pub fn uniform_mutation<R: Rng + ?Sized>(
    genome: &Genome,
    layout: &GenomeLayout,
    mutation_prob: f64,
    rng: &mut R,
) -> Genome {
    genome
        .iter()
        .zip(layout.genes())
        .map(|(&value, kind)| {
            if rng.random::<f64>() < mutation_prob {
                match kind {
                    GeneKind::Bit => value ^ 1,
                    GeneKind::Start { max_start } => rng.random_range(0..=*max_start),
                }
            } else {
                value
            }
        })
        .collect()
}

/// Runs the full algorithm and returns the best individual ever seen, with
/// metrics recomputed from its schedule.
pub fn run_ga(problem: &Problem, params: &GAParams) -> Result<OptimizationResult> {
    params.validate()?;
    let layout = problem.layout();
    let base_metrics = baseline_metrics(problem)?;
    let base_genome = baseline_genome(problem)?;
    let mutation_prob = params.mutation_prob(layout.len());
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut evaluations: u64 = 0;

    let evaluate = |genome: &Genome, evaluations: &mut u64| -> Result<f64> {
        *evaluations += 1;
        Ok(evaluate_genome(problem, &base_metrics, genome)?.fitness)
    };

    let mut population = init_population(problem, params, base_genome, &mut rng);
    let mut fitnesses = Vec::with_capacity(params.population_size);
    for genome in &population {
        fitnesses.push(evaluate(genome, &mut evaluations)?);
    }

    let generation_best = |fits: &[f64]| -> usize {
        (0..fits.len())
            .min_by(|&a, &b| fits[a].total_cmp(&fits[b]).then(a.cmp(&b)))
            .expect("population is nonempty")
    };

    let mut best = generation_best(&fitnesses);
    let mut best_ever: (Genome, f64) = (population[best].clone(), fitnesses[best]);
    let mut history = Vec::with_capacity(params.generations + 1);
    history.push(fitnesses[best]);

    for _ in 0..params.generations {
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| fitnesses[a].total_cmp(&fitnesses[b]));

        let mut next_population = Vec::with_capacity(params.population_size);
        let mut next_fitnesses = Vec::with_capacity(params.population_size);
        for &idx in order.iter().take(params.elite_count) {
            next_population.push(population[idx].clone());
            next_fitnesses.push(fitnesses[idx]);
        }

        while next_population.len() < params.population_size {
            let pa = tournament_select(&fitnesses, params.tournament_size, &mut rng);
            let pb = tournament_select(&fitnesses, params.tournament_size, &mut rng);
            let (child_a, child_b) = two_point_crossover(
                &population[pa],
                &population[pb],
                params.crossover_prob,
                &mut rng,
            );
            let child_a = uniform_mutation(&child_a, layout, mutation_prob, &mut rng);
            let child_b = uniform_mutation(&child_b, layout, mutation_prob, &mut rng);
            for child in [child_a, child_b] {
                if next_population.len() < params.population_size {
                    next_fitnesses.push(evaluate(&child, &mut evaluations)?);
                    next_population.push(child);
                }
            }
        }

        population = next_population;
        fitnesses = next_fitnesses;
        best = generation_best(&fitnesses);
        history.push(fitnesses[best]);
        if fitnesses[best] < best_ever.1 {
            best_ever = (population[best].clone(), fitnesses[best]);
        }
    }

    let best_schedule = layout.decode(&best_ever.0)?;
    let metrics = fitness(&best_schedule, problem, &base_metrics)?;
    Ok(OptimizationResult {
        best_genome: best_ever.0,
        best_schedule,
        metrics,
        history,
        evaluations,
        seed: params.seed,
    })
}
