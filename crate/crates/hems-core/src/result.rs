//! Common output type of the genetic algorithm, harmony search, and the
//! brute-force oracle.

use serde::{Deserialize, Serialize};

use crate::domain::genome::Genome;
use crate::domain::schedule::Schedule;
use crate::objective::Metrics;

/// Best schedule found by one optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_genome: Genome,
    pub best_schedule: Schedule,
    /// Recomputed from `best_schedule` after the run, not copied from the
    /// search loop.
    pub metrics: Metrics,
    /// Best fitness after initialization and after every iteration.
    /// Non-increasing whenever the algorithm preserves its best member.
    pub history: Vec<f64>,
    /// Number of fitness evaluations performed.
    pub evaluations: u64,
    /// Seed the run was started with; 0 for the seedless oracle.
    pub seed: u64,
}
