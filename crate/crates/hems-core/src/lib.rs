//! Deterministic appliance scheduling under a time-of-use tariff.
//!
//! A household's flexible appliances are placed into time slots to
//! jointly minimize electricity cost and the peak-to-average ratio of the
//! load profile, relative to an unoptimized baseline. Two seeded
//! metaheuristics (a genetic algorithm and harmony search) search a
//! compact genome encoding; a brute-force oracle provides exact optima on
//! tiny instances, and a scenario runner scales the comparison to many
//! users and finer slot resolutions.

pub mod baseline;
pub mod domain;
pub mod error;
pub mod ga;
pub mod hsa;
pub mod objective;
pub mod oracle;
pub mod result;
pub mod scenario;
pub mod tariff;

pub use baseline::{baseline_genome, baseline_metrics, baseline_schedule};
pub use domain::{
    repair_row, validate_schedule, Appliance, FlexClass, GeneKind, Genome, GenomeLayout,
    Penalties, Problem, ProblemDoc, Schedule, TimeGrid, Violation, Weights,
};
pub use error::{Error, Result};
pub use ga::{run_ga, GAParams};
pub use hsa::{run_hsa, HSAParams};
pub use objective::{
    capacity_overage, energy_profile, evaluate_genome, fitness, metrics_with_reference, par,
    penalty, precedence_violations, total_cost, total_cost_with_prices, EnergyProfile, Metrics,
};
pub use oracle::{brute_force, space_size, SPACE_CAP};
pub use result::OptimizationResult;
pub use scenario::{
    apply_guarantee, parse_report, render_report, run_scenario, Algorithm, ReportFormat,
    Scenario, ScenarioReport,
};
pub use tariff::{BandDoc, TariffProfile};
