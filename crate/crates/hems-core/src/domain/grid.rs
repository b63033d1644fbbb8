//! Discretization of the scheduling day into equal time slots.

use crate::error::{Error, Result};

/// Daily time grid. Slot 0 begins at 00:00; slot `t` covers the half-open
/// interval `[t * resolution, (t + 1) * resolution)` minutes of the day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeGrid {
    horizon_hours: u32,
    resolution_minutes: u32,
    slot_count: usize,
}

impl TimeGrid {
    /// Builds a grid of `horizon_hours * 60 / resolution_minutes` slots.
    /// The resolution must divide 60 so that slot boundaries stay aligned
    /// with whole hours.
    pub fn new(horizon_hours: u32, resolution_minutes: u32) -> Result<Self> {
        if horizon_hours == 0 {
            return Err(Error::config("horizon_hours must be at least 1"));
        }
        if resolution_minutes == 0 || 60 % resolution_minutes != 0 {
            return Err(Error::Config(format!(
                "resolution_minutes must divide 60, got {resolution_minutes}"
            )));
        }
        let total_minutes = horizon_hours * 60;
        if !total_minutes.is_multiple_of(resolution_minutes) {
            return Err(Error::Config(format!(
                "horizon of {horizon_hours} h is not a whole number of {resolution_minutes}-minute slots"
            )));
        }
        Ok(TimeGrid {
            horizon_hours,
            resolution_minutes,
            slot_count: (total_minutes / resolution_minutes) as usize,
        })
    }

    pub fn horizon_hours(&self) -> u32 {
        self.horizon_hours
    }

    pub fn resolution_minutes(&self) -> u32 {
        self.resolution_minutes
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    /// Duration of one slot in hours.
    pub fn slot_duration_h(&self) -> f64 {
        f64::from(self.resolution_minutes) / 60.0
    }

    /// Minute of day (mod 24 h) at which a slot begins.
    pub fn slot_start_minute(&self, slot: usize) -> Result<u32> {
        if slot >= self.slot_count {
            return Err(Error::SlotOutOfRange {
                slot,
                slot_count: self.slot_count,
            });
        }
        Ok((slot as u32 * self.resolution_minutes) % (24 * 60))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hourly_grid() {
        let g = TimeGrid::new(24, 60).unwrap();
        assert_eq!(g.slot_count(), 24);
        assert_eq!(g.slot_duration_h(), 1.0);
    }

    #[test]
    fn half_hour_grid() {
        let g = TimeGrid::new(24, 30).unwrap();
        assert_eq!(g.slot_count(), 48);
        assert_eq!(g.slot_duration_h(), 0.5);
    }

    #[test]
    fn quarter_hour_grid() {
        let g = TimeGrid::new(24, 15).unwrap();
        assert_eq!(g.slot_count(), 96);
    }

    #[test]
    fn rejects_resolution_not_dividing_60() {
        let err = TimeGrid::new(24, 7).unwrap_err();
        assert!(err.to_string().contains('7'), "message names the value: {err}");
    }

    #[test]
    fn slot_start_minutes() {
        let g = TimeGrid::new(24, 30).unwrap();
        assert_eq!(g.slot_start_minute(0).unwrap(), 0);
        assert_eq!(g.slot_start_minute(15).unwrap(), 450);
        assert!(g.slot_start_minute(48).is_err());
    }
}
