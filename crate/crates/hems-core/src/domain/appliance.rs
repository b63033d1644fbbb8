//! Appliance model: power rating, required operating time, and how much
//! freedom the scheduler has to move the load.

use serde::{Deserialize, Serialize};

use crate::domain::grid::TimeGrid;
use crate::error::{Error, Result};

/// How the scheduler may place an appliance's operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlexClass {
    /// Immovable load; runs in its fixed window with or without optimization.
    Fixed,
    /// Movable load that must run as one contiguous block.
    NonInterruptible,
    /// Movable load whose ON slots may be scattered.
    Interruptible,
}

/// One household appliance.
#[derive(Debug, Clone, PartialEq)]
pub struct Appliance {
    pub name: String,
    /// Power draw when ON, in kW. Energy per occupied slot is
    /// `power_kw * slot_duration_h`.
    pub power_kw: f64,
    /// Total hours the appliance must run within the horizon.
    pub oti_hours: u32,
    pub flex_class: FlexClass,
    /// Fixed-class only: first slot of the immovable window. Defaults to
    /// `baseline_start_slot` when absent.
    pub fixed_start_slot: Option<usize>,
    /// Where the unoptimized baseline places this appliance's contiguous run.
    pub baseline_start_slot: usize,
    /// Name of an appliance that must finish before this one starts.
    pub predecessor: Option<String>,
}

impl Appliance {
    /// Number of ON slots needed to complete the required operating time.
    pub fn required_slots(&self, grid: &TimeGrid) -> Result<usize> {
        let minutes = self.oti_hours * 60;
        if !minutes.is_multiple_of(grid.resolution_minutes()) {
            return Err(Error::Config(format!(
                "appliance '{}': {} h of operation is not a whole number of {}-minute slots",
                self.name,
                self.oti_hours,
                grid.resolution_minutes()
            )));
        }
        Ok((minutes / grid.resolution_minutes()) as usize)
    }

    /// First slot of the immovable window (fixed class).
    pub fn fixed_window_start(&self) -> usize {
        self.fixed_start_slot.unwrap_or(self.baseline_start_slot)
    }

    /// Energy consumed in one occupied slot, in kWh.
    pub fn slot_energy_kwh(&self, grid: &TimeGrid) -> f64 {
        self.power_kw * grid.slot_duration_h()
    }
}
