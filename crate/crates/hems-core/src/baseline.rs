//! The unoptimized reference schedule: every appliance runs contiguously
//! at its configured start. All cost and PAR reductions are measured
//! against it, and both optimizers seed their search with it.

use crate::domain::appliance::FlexClass;
use crate::domain::genome::Genome;
use crate::domain::problem::Problem;
use crate::domain::schedule::Schedule;
use crate::error::{Error, Result};
use crate::objective::{
    energy_profile, metrics_with_reference, par, total_cost_with_prices, Metrics,
};

/// Schedule with every appliance in one contiguous run at its baseline
/// start. Fixed appliances run in their fixed window, which is the same
/// slot unless the config moved it; their row is identical with and
/// without optimization.
pub fn baseline_schedule(problem: &Problem) -> Result<Schedule> {
    let slot_count = problem.grid().slot_count();
    let mut rows = Vec::with_capacity(problem.appliances().len());
    for app in problem.appliances() {
        let required = app.required_slots(problem.grid())?;
        let start = match app.flex_class {
            FlexClass::Fixed => app.fixed_window_start(),
            _ => app.baseline_start_slot,
        };
        if start + required > slot_count {
            return Err(Error::Config(format!(
                "appliance '{}': baseline run {start}..{} overflows the {slot_count}-slot horizon",
                app.name,
                start + required
            )));
        }
        let mut row = vec![false; slot_count];
        row[start..start + required].fill(true);
        rows.push(row);
    }
    Schedule::new(rows, slot_count)
}

/// Genome whose decoded schedule is exactly the baseline schedule.
pub fn baseline_genome(problem: &Problem) -> Result<Genome> {
    let starts: Vec<usize> = problem
        .appliances()
        .iter()
        .map(|a| a.baseline_start_slot)
        .collect();
    problem.layout().encode_contiguous(&starts)
}

/// Metrics of the baseline schedule, normalized against itself: its
/// fitness is the weight sum plus any penalty of its own.
pub fn baseline_metrics(problem: &Problem) -> Result<Metrics> {
    let schedule = baseline_schedule(problem)?;
    let profile = energy_profile(&schedule, problem)?;
    let cost = total_cost_with_prices(&profile, problem.slot_prices())?;
    let base_par = par(&profile)?;
    metrics_with_reference(problem, &schedule, cost, base_par)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::appliance::Appliance;
    use crate::domain::grid::TimeGrid;
    use crate::domain::problem::{Penalties, Weights};
    use crate::domain::schedule::validate_schedule;
    use crate::tariff::{BandDoc, TariffProfile};

    fn band(start: &str, end: &str, price: f64, label: &str) -> BandDoc {
        BandDoc {
            start: start.into(),
            end: end.into(),
            price,
            label: label.into(),
        }
    }

    fn app(
        name: &str,
        power: f64,
        oti: u32,
        class: FlexClass,
        start: usize,
        predecessor: Option<&str>,
    ) -> Appliance {
        Appliance {
            name: name.into(),
            power_kw: power,
            oti_hours: oti,
            flex_class: class,
            fixed_start_slot: None,
            baseline_start_slot: start,
            predecessor: predecessor.map(Into::into),
        }
    }

    /// The shipped eight-appliance household, rebuilt by hand so tests do
    /// not depend on the config file.
    fn household() -> Problem {
        use FlexClass::*;
        let grid = TimeGrid::new(24, 60).unwrap();
        let tariff = TariffProfile::from_bands(&[
            band("19:00", "07:00", 6.5, "off_peak"),
            band("07:00", "11:00", 13.2, "peak"),
            band("11:00", "17:00", 9.4, "mid_peak"),
            band("17:00", "19:00", 13.2, "peak"),
        ])
        .unwrap();
        Problem::from_parts(
            grid,
            vec![
                app("ceiling_fan", 0.075, 14, Fixed, 8, None),
                app("lamp", 0.1, 13, Fixed, 9, None),
                app("television", 0.48, 7, Fixed, 15, None),
                app("oven", 2.3, 6, Fixed, 7, None),
                app("washing_machine", 0.7, 8, NonInterruptible, 0, None),
                app("iron", 1.8, 7, NonInterruptible, 8, Some("washing_machine")),
                app("air_conditioner", 1.44, 10, Interruptible, 9, None),
                app("water_heater", 4.45, 8, Interruptible, 16, None),
            ],
            tariff,
            10.0,
            Weights::default(),
            Penalties::default(),
        )
        .unwrap()
    }

    #[test]
    fn contiguous_run_at_start() {
        let p = household();
        let s = baseline_schedule(&p).unwrap();
        let washer = p.appliance_index("washing_machine").unwrap();
        let expected: Vec<bool> = (0..24).map(|t| (0..8).contains(&t)).collect();
        assert_eq!(s.rows()[washer], expected);
    }

    #[test]
    fn household_energy_totals() {
        let p = household();
        let s = baseline_schedule(&p).unwrap();
        let profile = energy_profile(&s, &p).unwrap();
        // Sum of power x hours over all eight appliances.
        assert!((profile.total_kwh() - 87.71).abs() < 1e-9);
        // Evening overlap of heater, AC, television, lamp, and fan.
        assert!((profile.peak_kwh() - 6.545).abs() < 1e-9);
        assert!((profile.values()[16] - 6.545).abs() < 1e-9);
        assert!((profile.values()[0] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn household_baseline_metrics() {
        let p = household();
        let m = baseline_metrics(&p).unwrap();
        assert!((m.total_cost_cents - 860.4815).abs() < 1e-9);
        assert!(m.par > 1.5);
        assert!((m.par - 24.0 * 6.545 / 87.71).abs() < 1e-9);
        assert_eq!(m.penalty, 0.0);
        assert!((m.fitness - 1.0).abs() < 1e-12);
    }

    #[test]
    fn baseline_is_valid_and_feasible() {
        let p = household();
        let s = baseline_schedule(&p).unwrap();
        let violations = validate_schedule(&p, &s).unwrap();
        assert!(violations.is_empty(), "{violations:?}");
    }

    #[test]
    fn genome_round_trips_to_same_schedule() {
        let p = household();
        let g = baseline_genome(&p).unwrap();
        let decoded = p.layout().decode(&g).unwrap();
        assert_eq!(decoded, baseline_schedule(&p).unwrap());
    }

    #[test]
    fn overlapping_starts_add_up() {
        let grid = TimeGrid::new(6, 60).unwrap();
        let tariff = TariffProfile::from_bands(&[band("00:00", "00:00", 1.0, "flat")]).unwrap();
        let p = Problem::from_parts(
            grid,
            vec![
                app("a", 1.0, 2, FlexClass::NonInterruptible, 1, None),
                app("b", 0.5, 3, FlexClass::NonInterruptible, 1, None),
            ],
            tariff,
            5.0,
            Weights::default(),
            Penalties::default(),
        )
        .unwrap();
        let s = baseline_schedule(&p).unwrap();
        let profile = energy_profile(&s, &p).unwrap();
        assert_eq!(profile.values(), &[0.0, 1.5, 1.5, 0.5, 0.0, 0.0]);
    }
}
