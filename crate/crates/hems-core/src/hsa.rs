//! Harmony search: a sorted memory of genomes improves one improvisation
//! at a time through memory consideration, pitch adjustment, and fresh
//! random draws. Deterministic per seed.
//!
//! Stream discipline: initialization draws hms - 1 random genomes in
//! order. Each improvisation then walks the genes in order, drawing per
//! gene: the consideration coin, then (memory branch) the donor index and
//! the pitch coin plus one direction draw for start-gene shifts, or
//! (random branch) one fresh value.

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
pub struct HSAParams {
    /// Harmony memory size.
    pub hms: usize,
    /// Memory consideration rate.
    pub hmcr: f64,
    /// Pitch adjustment rate.
    pub par_rate: f64,
    /// Bandwidth. Meaningless for bit and start genes; accepted for
    /// config compatibility and ignored with a logged notice.
    pub bw: Option<f64>,
    /// Total improvisations.
    pub ni: usize,
    pub seed: u64,
}

impl HSAParams {
    pub fn new(seed: u64) -> Self {
        Self {
            hms: 30,
            hmcr: 0.9,
            par_rate: 0.3,
            bw: None,
            ni: 20_000,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hms < 2 {
            return Err(Error::config("hms must be at least 2"));
        }
        if self.ni < 1 {
            return Err(Error::config("ni must be at least 1"));
        }
        for (label, value) in [("hmcr", self.hmcr), ("par", self.par_rate)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Config(format!(
                    "{label} must be in [0,1], got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Genomes with their fitness, kept sorted ascending (best first).
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonyMemory {
    members: Vec<(Genome, f64)>,
}

impl HarmonyMemory {
    pub fn new(mut members: Vec<(Genome, f64)>) -> Self {
        members.sort_by(|a, b| a.1.total_cmp(&b.1));
        Self { members }
    }

    pub fn members(&self) -> &[(Genome, f64)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> &(Genome, f64) {
        &self.members[0]
    }

    pub fn best_fitness(&self) -> f64 {
        self.members[0].1
    }

    pub fn worst_fitness(&self) -> f64 {
        self.members[self.members.len() - 1].1
    }

    /// Strictly better candidates evict the worst member and slot into
    /// sorted position. Ties leave the memory unchanged.
    pub fn replace_worst(&mut self, genome: Genome, fitness: f64) -> bool {
        if fitness >= self.worst_fitness() {
            return false;
        }
        self.members.pop();
        let at = self.members.partition_point(|m| m.1 <= fitness);
        self.members.insert(at, (genome, fitness));
        true
    }
}

/// Seeded memory: the baseline genome plus hms - 1 uniform random genomes,
/// evaluated and sorted.
pub fn init_harmony_memory<R: Rng + ?Sized>(
    problem: &Problem,
    params: &HSAParams,
    baseline: Genome,
    rng: &mut R,
) -> Result<HarmonyMemory> {
    let base_metrics = baseline_metrics(problem)?;
    let mut members = Vec::with_capacity(params.hms);
    let fit = evaluate_genome(problem, &base_metrics, &baseline)?.fitness;
    members.push((baseline, fit));
    while members.len() < params.hms {
        let genome = problem.layout().random_genome(rng);
        let fit = evaluate_genome(problem, &base_metrics, &genome)?.fitness;
        members.push((genome, fit));
    }
    Ok(HarmonyMemory::new(members))
}

/// Builds one candidate gene by gene: with probability hmcr copy the gene
/// from a uniformly chosen member (then pitch-adjust with probability
/// par_rate: bits flip, start genes shift one slot up or down, clamped);
/// otherwise draw the gene fresh from its full range.
pub fn improvise<R: Rng + ?Sized>(
    memory: &HarmonyMemory,
    layout: &GenomeLayout,
    params: &HSAParams,
    rng: &mut R,
) -> Genome {
    layout
        .genes()
        .iter()
        .enumerate()
        .map(|(j, kind)| {
            if rng.random::<f64>() < params.hmcr {
                let donor = rng.random_range(0..memory.len());
                let value = memory.members()[donor].0[j];
                if rng.random::<f64>() < params.par_rate {
                    match kind {
                        GeneKind::Bit => value ^ 1,
                        GeneKind::Start { max_start } => {
                            if rng.random_range(0..=1u32) == 1 {
                                (value + 1).min(*max_start)
                            } else {
                                value.saturating_sub(1)
                            }
                        }
                    }
                } else {
                    value
                }
            } else {
                rng.random_range(0..=kind.max_value())
            }
        })
        .collect()
}

/// Runs the full search and returns the best member, with metrics
/// recomputed from its schedule.
pub fn run_hsa(problem: &Problem, params: &HSAParams) -> Result<OptimizationResult> {
    params.validate()?;
    if let Some(bw) = params.bw {
        log::warn!("bandwidth {bw} has no effect on bit and start genes; ignoring");
    }
    let layout = problem.layout();
    let base_metrics = baseline_metrics(problem)?;
    let base_genome = baseline_genome(problem)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut memory = init_harmony_memory(problem, params, base_genome, &mut rng)?;
    let mut evaluations = params.hms as u64;
    let mut history = Vec::with_capacity(params.ni + 1);
    history.push(memory.best_fitness());

    for _ in 0..params.ni {
        let candidate = improvise(&memory, layout, params, &mut rng);
        let fit = evaluate_genome(problem, &base_metrics, &candidate)?.fitness;
        evaluations += 1;
        memory.replace_worst(candidate, fit);
        history.push(memory.best_fitness());
    }

    let (best_genome, _) = memory.best().clone();
    let best_schedule = layout.decode(&best_genome)?;
    let metrics = fitness(&best_schedule, problem, &base_metrics)?;
    Ok(OptimizationResult {
        best_genome,
        best_schedule,
        metrics,
        history,
        evaluations,
        seed: params.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::appliance::{Appliance, FlexClass};
    use crate::domain::grid::TimeGrid;
    use crate::domain::problem::{Penalties, Weights};
    use crate::tariff::{BandDoc, TariffProfile};

    fn toy_problem() -> Problem {
        let grid = TimeGrid::new(8, 60).unwrap();
        let tariff = TariffProfile::from_bands(&[
            BandDoc {
                start: "00:00".into(),
                end: "04:00".into(),
                price: 13.2,
                label: "peak".into(),
            },
            BandDoc {
                start: "04:00".into(),
                end: "00:00".into(),
                price: 6.5,
                label: "off_peak".into(),
            },
        ])
        .unwrap();
        let mk = |name: &str, class, oti, start| Appliance {
            name: name.into(),
            power_kw: 1.0,
            oti_hours: oti,
            flex_class: class,
            fixed_start_slot: None,
            baseline_start_slot: start,
            predecessor: None,
        };
        Problem::from_parts(
            grid,
            vec![
                mk("mover", FlexClass::NonInterruptible, 3, 0),
                mk("scatter", FlexClass::Interruptible, 2, 1),
            ],
            tariff,
            5.0,
            Weights::default(),
            Penalties::default(),
        )
        .unwrap()
    }

    fn bits_only_problem() -> Problem {
        let grid = TimeGrid::new(6, 60).unwrap();
        let tariff = TariffProfile::from_bands(&[BandDoc {
            start: "00:00".into(),
            end: "00:00".into(),
            price: 10.0,
            label: "flat".into(),
        }])
        .unwrap();
        Problem::from_parts(
            grid,
            vec![Appliance {
                name: "scatter".into(),
                power_kw: 1.0,
                oti_hours: 2,
                flex_class: FlexClass::Interruptible,
                fixed_start_slot: None,
                baseline_start_slot: 0,
                predecessor: None,
            }],
            tariff,
            5.0,
            Weights::default(),
            Penalties::default(),
        )
        .unwrap()
    }

    fn small_params(seed: u64) -> HSAParams {
        HSAParams {
            hms: 8,
            ni: 400,
            ..HSAParams::new(seed)
        }
    }

    #[test]
    fn init_is_sorted_and_contains_baseline() {
        let p = toy_problem();
        let params = small_params(42);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let base = baseline_genome(&p).unwrap();
        let memory = init_harmony_memory(&p, &params, base.clone(), &mut rng).unwrap();
        assert_eq!(memory.len(), 8);
        assert!(memory
            .members()
            .windows(2)
            .all(|w| w[0].1 <= w[1].1));
        assert!(memory.members().iter().any(|(g, _)| *g == base));

        let mut rng2 = ChaCha8Rng::seed_from_u64(42);
        let memory2 = init_harmony_memory(&p, &params, base, &mut rng2).unwrap();
        assert_eq!(memory, memory2);
    }

    #[test]
    fn pure_memory_consideration_is_closed_world() {
        let p = toy_problem();
        let params = HSAParams {
            hmcr: 1.0,
            par_rate: 0.0,
            ..small_params(3)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let base = baseline_genome(&p).unwrap();
        let memory = init_harmony_memory(&p, &params, base, &mut rng).unwrap();
        for _ in 0..200 {
            let g = improvise(&memory, p.layout(), &params, &mut rng);
            for (j, &v) in g.iter().enumerate() {
                assert!(memory.members().iter().any(|(m, _)| m[j] == v));
            }
        }
    }

    #[test]
    fn single_member_copy_and_forced_flip() {
        let p = bits_only_problem();
        let sole: Genome = vec![1, 0, 1, 0, 1, 0];
        let memory = HarmonyMemory::new(vec![(sole.clone(), 1.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let copy_params = HSAParams {
            hmcr: 1.0,
            par_rate: 0.0,
            ..HSAParams::new(0)
        };
        assert_eq!(improvise(&memory, p.layout(), &copy_params, &mut rng), sole);
        let flip_params = HSAParams {
            hmcr: 1.0,
            par_rate: 1.0,
            ..HSAParams::new(0)
        };
        let complement: Genome = sole.iter().map(|b| b ^ 1).collect();
        assert_eq!(
            improvise(&memory, p.layout(), &flip_params, &mut rng),
            complement
        );
    }

    #[test]
    fn zero_hmcr_ignores_memory() {
        let p = bits_only_problem();
        let memory = HarmonyMemory::new(vec![(vec![0; 6], 1.0), (vec![0; 6], 1.0)]);
        let params = HSAParams {
            hmcr: 0.0,
            ..HSAParams::new(0)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut saw_one = false;
        for _ in 0..50 {
            let g = improvise(&memory, p.layout(), &params, &mut rng);
            assert!(g.iter().all(|&v| v <= 1));
            saw_one |= g.contains(&1);
        }
        assert!(saw_one, "memory of zeros cannot explain a one");
    }

    #[test]
    fn replacement_rules() {
        let g = |v: u32| vec![v; 3];
        let mut memory = HarmonyMemory::new(vec![(g(0), 0.2), (g(1), 0.5), (g(2), 0.9)]);
        // Worse than worst: rejected.
        assert!(!memory.replace_worst(g(3), 1.2));
        // Tie with worst: rejected.
        assert!(!memory.replace_worst(g(4), 0.9));
        assert_eq!(memory.len(), 3);
        // Better than all: inserted at the front, worst evicted.
        assert!(memory.replace_worst(g(5), 0.1));
        assert_eq!(memory.best(), &(g(5), 0.1));
        assert_eq!(memory.worst_fitness(), 0.5);
        assert!(memory.members().windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn run_is_deterministic_and_monotone() {
        let p = toy_problem();
        let r1 = run_hsa(&p, &small_params(11)).unwrap();
        let r2 = run_hsa(&p, &small_params(11)).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.history.len(), 401);
        assert!(r1.history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r1.evaluations, 408);
        let r3 = run_hsa(&p, &small_params(12)).unwrap();
        assert_ne!(r1.history, r3.history);
    }

    #[test]
    fn best_never_worse_than_baseline() {
        let p = toy_problem();
        for seed in 0..10 {
            let r = run_hsa(&p, &small_params(seed)).unwrap();
            assert!(r.metrics.fitness <= 1.0 + 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn bandwidth_is_accepted() {
        let p = toy_problem();
        let params = HSAParams {
            bw: Some(0.5),
            ..small_params(6)
        };
        let with_bw = run_hsa(&p, &params).unwrap();
        let without = run_hsa(&p, &small_params(6)).unwrap();
        assert_eq!(with_bw, without);
    }

    #[test]
    fn invalid_params_rejected() {
        let p = toy_problem();
        for bad in [
            HSAParams {
                hms: 1,
                ..HSAParams::new(0)
            },
            HSAParams {
                hmcr: 1.1,
                ..HSAParams::new(0)
            },
            HSAParams {
                par_rate: -0.2,
                ..HSAParams::new(0)
            },
            HSAParams {
                ni: 0,
                ..HSAParams::new(0)
            },
        ] {
            assert!(run_hsa(&p, &bad).is_err());
        }
    }
}
