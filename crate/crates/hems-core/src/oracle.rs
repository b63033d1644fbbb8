//! Exhaustive search over every genome, the ground truth for heuristic
//! quality tests. No pruning on purpose: the oracle's value is that it is
//! trivially auditable.

use crate::baseline::baseline_metrics;
use crate::domain::genome::Genome;
use crate::domain::problem::Problem;
use crate::error::{Error, Result};
use crate::objective::{evaluate_genome, fitness};
use crate::result::OptimizationResult;

/// Largest search space the oracle will enumerate.
pub const SPACE_CAP: u128 = 1 << 24;

/// Exact number of distinct genomes for the problem's layout.
pub fn space_size(problem: &Problem) -> u128 {
    problem.layout().space_size()
}

/// Advances the genome one step in lexicographic order (last gene is the
/// fastest-moving digit). Returns false once every value has been visited.
fn next_genome(genome: &mut [u32], max_values: &[u32]) -> bool {
    for pos in (0..genome.len()).rev() {
        if genome[pos] < max_values[pos] {
            genome[pos] += 1;
            return true;
        }
        genome[pos] = 0;
    }
    false
}

/// Evaluates every in-range genome and returns the global fitness minimum.
/// Ties keep the first genome encountered, which lexicographic enumeration
/// makes the lexicographically smallest. Seedless and deterministic.
pub fn brute_force(problem: &Problem) -> Result<OptimizationResult> {
    let size = space_size(problem);
    if size > SPACE_CAP {
        return Err(Error::SpaceTooLarge {
            size,
            cap: SPACE_CAP,
        });
    }
    let layout = problem.layout();
    let base_metrics = baseline_metrics(problem)?;
    let max_values: Vec<u32> = layout.genes().iter().map(|k| k.max_value()).collect();

    let mut genome: Genome = vec![0; layout.len()];
    let mut best_genome = genome.clone();
    let mut best_fitness = f64::INFINITY;
    let mut evaluations: u64 = 0;
    loop {
        let fit = evaluate_genome(problem, &base_metrics, &genome)?.fitness;
        evaluations += 1;
        if fit < best_fitness {
            best_fitness = fit;
            best_genome = genome.clone();
        }
        if !next_genome(&mut genome, &max_values) {
            break;
        }
    }

    let best_schedule = layout.decode(&best_genome)?;
    let metrics = fitness(&best_schedule, problem, &base_metrics)?;
    Ok(OptimizationResult {
        best_genome,
        best_schedule,
        metrics,
        history: vec![best_fitness],
        evaluations,
        seed: 0,
    })
}
