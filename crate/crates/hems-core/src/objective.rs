//! Objective arithmetic: per-slot energy profile, electricity cost,
//! peak-to-average ratio, soft-constraint penalties, and the scalar
//! fitness the optimizers minimize.

use serde::{Deserialize, Serialize};

use crate::domain::grid::TimeGrid;
use crate::domain::problem::Problem;
use crate::domain::schedule::Schedule;
use crate::error::{Error, Result};
use crate::tariff::TariffProfile;

/// Aggregated energy per slot, in kWh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnergyProfile(Vec<f64>);

impl EnergyProfile {
    pub fn new(energy_kwh: Vec<f64>) -> Self {
        Self(energy_kwh)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_kwh(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn peak_kwh(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// Slot-wise sum of two profiles.
    pub fn add(&self, other: &EnergyProfile) -> Result<EnergyProfile> {
        if self.len() != other.len() {
            return Err(Error::Shape(format!(
                "profiles of length {} and {} cannot be summed",
                self.len(),
                other.len()
            )));
        }
        Ok(EnergyProfile(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }
}

/// Everything measured about one schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub total_cost_cents: f64,
    pub par: f64,
    pub peak_kwh: f64,
    pub avg_kwh: f64,
    pub penalty: f64,
    pub fitness: f64,
}

/// Per-slot energy. Appliances are summed in problem order so equal inputs
/// give bit-identical floats.
pub fn energy_profile(schedule: &Schedule, problem: &Problem) -> Result<EnergyProfile> {
    let slot_count = problem.grid().slot_count();
    if schedule.slot_count() != slot_count || schedule.rows().len() != problem.appliances().len() {
        return Err(Error::Shape(format!(
            "schedule shape {}x{} does not match problem {}x{}",
            schedule.rows().len(),
            schedule.slot_count(),
            problem.appliances().len(),
            slot_count
        )));
    }
    let slot_energies: Vec<f64> = problem
        .appliances()
        .iter()
        .map(|a| a.slot_energy_kwh(problem.grid()))
        .collect();
    let mut energy = vec![0.0; slot_count];
    for (slot, e) in energy.iter_mut().enumerate() {
        for (i, energy_kwh) in slot_energies.iter().enumerate() {
            if schedule.is_on(i, slot) {
                *e += energy_kwh;
            }
        }
    }
    Ok(EnergyProfile(energy))
}

/// Total cost in cents given precomputed per-slot prices.
pub fn total_cost_with_prices(profile: &EnergyProfile, prices: &[f64]) -> Result<f64> {
    if profile.len() != prices.len() {
        return Err(Error::Shape(format!(
            "profile has {} slots, prices have {}",
            profile.len(),
            prices.len()
        )));
    }
    Ok(profile.0.iter().zip(prices).map(|(e, p)| e * p).sum())
}

/// Total cost in cents: sum over slots of energy times the slot price.
pub fn total_cost(profile: &EnergyProfile, tariff: &TariffProfile, grid: &TimeGrid) -> Result<f64> {
    total_cost_with_prices(profile, &tariff.slot_prices(grid)?)
}

/// Peak-to-average ratio: slot_count x max / total. 1.0 means flat.
pub fn par(profile: &EnergyProfile) -> Result<f64> {
    let total = profile.total_kwh();
    if profile.is_empty() || total <= 0.0 {
        return Err(Error::UndefinedPar);
    }
    Ok(profile.len() as f64 * profile.peak_kwh() / total)
}

/// Number of appliance pairs where the successor starts at or before its
/// predecessor's last ON slot.
pub fn precedence_violations(schedule: &Schedule, problem: &Problem) -> usize {
    problem
        .predecessor_indices()
        .iter()
        .enumerate()
        .filter(|(i, pred)| {
            pred.is_some_and(|p| {
                matches!(
                    (schedule.first_on(*i), schedule.last_on(p)),
                    (Some(first), Some(last)) if first <= last
                )
            })
        })
        .count()
}

/// Relative energy above the per-slot limit, summed over slots.
pub fn capacity_overage(profile: &EnergyProfile, capacity_kwh: f64) -> f64 {
    profile
        .0
        .iter()
        .map(|e| (e - capacity_kwh).max(0.0) / capacity_kwh)
        .sum()
}

/// Soft-constraint penalty in fitness units. Zero iff the schedule
/// respects precedence and never exceeds the per-slot capacity.
pub fn penalty(schedule: &Schedule, problem: &Problem) -> Result<f64> {
    let profile = energy_profile(schedule, problem)?;
    Ok(penalty_from_parts(schedule, problem, &profile))
}

fn penalty_from_parts(schedule: &Schedule, problem: &Problem, profile: &EnergyProfile) -> f64 {
    let p = problem.penalties();
    p.precedence * precedence_violations(schedule, problem) as f64
        + p.capacity * capacity_overage(profile, problem.capacity_kwh())
}

/// Full metrics against explicit normalization anchors. The anchors are the
/// unoptimized schedule's cost and PAR; the baseline itself anchors to its
/// own values so its fitness is exactly the weight sum plus penalty.
pub fn metrics_with_reference(
    problem: &Problem,
    schedule: &Schedule,
    ref_cost: f64,
    ref_par: f64,
) -> Result<Metrics> {
    let anchors_ok = ref_cost.is_finite() && ref_cost > 0.0 && ref_par.is_finite() && ref_par > 0.0;
    if !anchors_ok {
        return Err(Error::Config(format!(
            "normalization anchors must be positive (cost {ref_cost}, par {ref_par})"
        )));
    }
    let profile = energy_profile(schedule, problem)?;
    let total_cost_cents = total_cost_with_prices(&profile, problem.slot_prices())?;
    let par = par(&profile)?;
    let penalty = penalty_from_parts(schedule, problem, &profile);
    let w = problem.weights();
    let fitness = w.cost * (total_cost_cents / ref_cost) + w.par * (par / ref_par) + penalty;
    Ok(Metrics {
        total_cost_cents,
        par,
        peak_kwh: profile.peak_kwh(),
        avg_kwh: profile.total_kwh() / profile.len() as f64,
        penalty,
        fitness,
    })
}

/// Metrics of a schedule normalized by the baseline's cost and PAR.
pub fn fitness(schedule: &Schedule, problem: &Problem, baseline: &Metrics) -> Result<Metrics> {
    metrics_with_reference(problem, schedule, baseline.total_cost_cents, baseline.par)
}

/// Decode-and-measure in one step, the optimizers' inner loop.
pub fn evaluate_genome(problem: &Problem, baseline: &Metrics, genome: &[u32]) -> Result<Metrics> {
    let schedule = problem.layout().decode(genome)?;
    fitness(&schedule, problem, baseline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::appliance::{Appliance, FlexClass};
    use crate::domain::problem::{Penalties, Weights};
    use crate::tariff::BandDoc;

    fn flat_tariff(price: f64) -> TariffProfile {
        TariffProfile::from_bands(&[BandDoc {
            start: "00:00".into(),
            end: "00:00".into(),
            price,
            label: "flat".into(),
        }])
        .unwrap()
    }

    fn app(name: &str, power: f64, oti: u32, class: FlexClass, start: usize) -> Appliance {
        Appliance {
            name: name.into(),
            power_kw: power,
            oti_hours: oti,
            flex_class: class,
            fixed_start_slot: None,
            baseline_start_slot: start,
            predecessor: None,
        }
    }

    fn toy_problem() -> Problem {
        let grid = TimeGrid::new(24, 60).unwrap();
        Problem::from_parts(
            grid,
            vec![
                app("washer", 1.0, 4, FlexClass::NonInterruptible, 2),
                Appliance {
                    predecessor: Some("washer".into()),
                    ..app("iron", 1.0, 2, FlexClass::NonInterruptible, 8)
                },
            ],
            flat_tariff(10.0),
            1.5,
            Weights::default(),
            Penalties::default(),
        )
        .unwrap()
    }

    fn contiguous(problem: &Problem, starts: &[usize]) -> Schedule {
        let genome = problem.layout().encode_contiguous(starts).unwrap();
        problem.layout().decode(&genome).unwrap()
    }

    #[test]
    fn all_off_profile_is_zero() {
        let p = toy_problem();
        let rows = vec![vec![false; 24]; 2];
        let s = Schedule::new(rows, 24).unwrap();
        let profile = energy_profile(&s, &p).unwrap();
        assert!(profile.values().iter().all(|&e| e == 0.0));
        assert_eq!(
            total_cost(&profile, p.tariff(), p.grid()).unwrap(),
            0.0
        );
    }

    #[test]
    fn single_appliance_profile() {
        let grid = TimeGrid::new(24, 60).unwrap();
        let p = Problem::from_parts(
            grid,
            vec![app("ceiling_fan", 0.075, 14, FlexClass::Fixed, 8)],
            flat_tariff(10.0),
            5.0,
            Weights::default(),
            Penalties::default(),
        )
        .unwrap();
        let s = contiguous(&p, &[8]);
        let profile = energy_profile(&s, &p).unwrap();
        assert_eq!(profile.values()[8], 0.075);
        assert_eq!(profile.values()[21], 0.075);
        assert_eq!(profile.values()[7], 0.0);
        assert!((profile.total_kwh() - 1.05).abs() < 1e-12);
    }

    #[test]
    fn cost_of_one_kw_for_one_peak_hour() {
        let profile = EnergyProfile::new(vec![0.0, 1.0, 0.0]);
        assert_eq!(
            total_cost_with_prices(&profile, &[6.5, 13.2, 6.5]).unwrap(),
            13.2
        );
        // Half-hour slot carries half the energy.
        let half = EnergyProfile::new(vec![0.0, 0.5, 0.0]);
        assert_eq!(
            total_cost_with_prices(&half, &[6.5, 13.2, 6.5]).unwrap(),
            6.6
        );
    }

    #[test]
    fn par_examples() {
        assert_eq!(par(&EnergyProfile::new(vec![2.0; 8])).unwrap(), 1.0);
        assert_eq!(par(&EnergyProfile::new(vec![4.0, 0.0, 0.0, 0.0])).unwrap(), 4.0);
        assert_eq!(par(&EnergyProfile::new(vec![2.0, 1.0, 1.0, 0.0])).unwrap(), 2.0);
        assert!(matches!(
            par(&EnergyProfile::new(vec![0.0; 4])),
            Err(Error::UndefinedPar)
        ));
    }

    #[test]
    fn penalty_zero_when_feasible() {
        let p = toy_problem();
        let s = contiguous(&p, &[2, 8]);
        assert_eq!(penalty(&s, &p).unwrap(), 0.0);
    }

    #[test]
    fn penalty_counts_precedence() {
        let p = toy_problem();
        // Iron runs entirely before the washer: no overlap, so the
        // precedence term is the only nonzero one.
        let s = contiguous(&p, &[2, 0]);
        assert_eq!(precedence_violations(&s, &p), 1);
        assert_eq!(penalty(&s, &p).unwrap(), 10.0);
    }

    #[test]
    fn penalty_scales_with_capacity_overage() {
        let p = toy_problem();
        // Both appliances overlap on slots 8..10: 2.0 kWh > 1.5 kWh limit.
        let s = contiguous(&p, &[6, 8]);
        let profile = energy_profile(&s, &p).unwrap();
        let over = capacity_overage(&profile, p.capacity_kwh());
        assert!((over - 2.0 * (0.5 / 1.5)).abs() < 1e-12);
    }

    #[test]
    fn capacity_overage_ten_percent() {
        let profile = EnergyProfile::new(vec![1.1, 0.5]);
        assert!((capacity_overage(&profile, 1.0) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn baseline_fitness_is_weight_sum() {
        let p = toy_problem();
        let s = contiguous(&p, &[2, 8]);
        let profile = energy_profile(&s, &p).unwrap();
        let cost = total_cost_with_prices(&profile, p.slot_prices()).unwrap();
        let base_par = par(&profile).unwrap();
        let m = metrics_with_reference(&p, &s, cost, base_par).unwrap();
        assert!((m.fitness - 1.0).abs() < 1e-12);
        assert_eq!(m.penalty, 0.0);
        assert!((m.par - m.peak_kwh / m.avg_kwh).abs() < 1e-12);
    }

    #[test]
    fn fitness_formula_half_cost() {
        let p = toy_problem();
        let s = contiguous(&p, &[2, 8]);
        let profile = energy_profile(&s, &p).unwrap();
        let cost = total_cost_with_prices(&profile, p.slot_prices()).unwrap();
        let base_par = par(&profile).unwrap();
        // Pretend the baseline cost twice as much at the same PAR.
        let m = metrics_with_reference(&p, &s, cost * 2.0, base_par).unwrap();
        assert!((m.fitness - 0.75).abs() < 1e-12);
    }

    #[test]
    fn zero_reference_rejected() {
        let p = toy_problem();
        let s = contiguous(&p, &[2, 8]);
        assert!(metrics_with_reference(&p, &s, 0.0, 1.0).is_err());
        assert!(metrics_with_reference(&p, &s, 1.0, 0.0).is_err());
    }
}
