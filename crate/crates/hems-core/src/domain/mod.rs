//! Domain model: time grid, appliances, schedules, problems, and the
//! genome encoding the optimizers search over.

pub mod appliance;
pub mod genome;
pub mod grid;
pub mod problem;
pub mod schedule;

pub use appliance::{Appliance, FlexClass};
pub use genome::{repair_row, GeneKind, Genome, GenomeLayout};
pub use grid::TimeGrid;
pub use problem::{Penalties, Problem, ProblemDoc, Weights};
pub use schedule::{validate_schedule, Schedule, Violation};
