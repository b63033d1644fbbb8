//! Time-of-use tariff: named price bands over the day, queried per slot.
//!
//! Bands are half-open `[start, end)` intervals in wall-clock minutes and
//! must tile the full day with no gap or overlap. A band may wrap midnight
//! (e.g. 19:00 to 07:00), in which case it is treated as two arcs.

use serde::{Deserialize, Serialize};

use crate::domain::grid::TimeGrid;
use crate::error::{Error, Result};

const MINUTES_PER_DAY: u32 = 1440;

/// One tariff band as written in a config document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandDoc {
    /// Inclusive start, "HH:MM".
    pub start: String,
    /// Exclusive end, "HH:MM". Equal to start means the band covers the
    /// whole day.
    pub end: String,
    /// Price in cents per kWh.
    pub price: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
struct Band {
    start_min: u32,
    end_min: u32,
    price: f64,
    label: String,
}

/// Validated tariff with a resolved price for every minute of the day.
#[derive(Debug, Clone, PartialEq)]
pub struct TariffProfile {
    bands: Vec<Band>,
    /// Price per minute-of-day, resolved once at construction.
    minute_price: Vec<f64>,
}

fn parse_hhmm(s: &str) -> Result<u32> {
    let (h, m) = s
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("tariff time '{s}' is not HH:MM")))?;
    let h: u32 = h
        .parse()
        .map_err(|_| Error::Config(format!("tariff time '{s}' is not HH:MM")))?;
    let m: u32 = m
        .parse()
        .map_err(|_| Error::Config(format!("tariff time '{s}' is not HH:MM")))?;
    if h > 23 || m > 59 {
        return Err(Error::Config(format!("tariff time '{s}' is out of range")));
    }
    Ok(h * 60 + m)
}

impl TariffProfile {
    /// Builds a profile from config bands, checking full-day coverage.
    pub fn from_bands(bands: &[BandDoc]) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::config("tariff has no bands"));
        }
        let mut resolved = Vec::with_capacity(bands.len());
        for doc in bands {
            if !doc.price.is_finite() || doc.price < 0.0 {
                return Err(Error::Config(format!(
                    "tariff band '{}' has invalid price {}",
                    doc.label, doc.price
                )));
            }
            resolved.push(Band {
                start_min: parse_hhmm(&doc.start)?,
                end_min: parse_hhmm(&doc.end)?,
                price: doc.price,
                label: doc.label.clone(),
            });
        }

        let mut minute_price = vec![f64::NAN; MINUTES_PER_DAY as usize];
        let mut covered = vec![false; MINUTES_PER_DAY as usize];
        for band in &resolved {
            let minutes: Vec<u32> = if band.start_min == band.end_min {
                (0..MINUTES_PER_DAY).collect()
            } else if band.start_min < band.end_min {
                (band.start_min..band.end_min).collect()
            } else {
                // Wraps midnight: tail of the day plus head of the next.
                (band.start_min..MINUTES_PER_DAY)
                    .chain(0..band.end_min)
                    .collect()
            };
            for m in minutes {
                let i = m as usize;
                if covered[i] {
                    return Err(Error::Config(format!(
                        "tariff bands overlap at minute {m} ({}:{:02})",
                        m / 60,
                        m % 60
                    )));
                }
                covered[i] = true;
                minute_price[i] = band.price;
            }
        }
        if let Some(m) = covered.iter().position(|&c| !c) {
            return Err(Error::Config(format!(
                "tariff leaves minute {m} ({}:{:02}) uncovered",
                m / 60,
                m % 60
            )));
        }

        Ok(Self {
            bands: resolved,
            minute_price,
        })
    }

    /// Price in cents per kWh at a given minute of the day.
    pub fn price_at_minute(&self, minute_of_day: u32) -> f64 {
        self.minute_price[(minute_of_day % MINUTES_PER_DAY) as usize]
    }

    /// Checks that no band boundary falls inside a slot. A boundary mid-slot
    /// would make the slot's price ambiguous.
    pub fn check_alignment(&self, grid: &TimeGrid) -> Result<()> {
        let res = grid.resolution_minutes();
        for band in &self.bands {
            for boundary in [band.start_min, band.end_min] {
                if boundary % res != 0 {
                    return Err(Error::Config(format!(
                        "tariff boundary {}:{:02} does not align to the {}-minute grid",
                        boundary / 60,
                        boundary % 60,
                        res
                    )));
                }
            }
        }
        Ok(())
    }

    /// Price of each slot in the horizon. Slots repeat the daily pattern when
    /// the horizon is longer than one day.
    pub fn slot_prices(&self, grid: &TimeGrid) -> Result<Vec<f64>> {
        self.check_alignment(grid)?;
        (0..grid.slot_count())
            .map(|s| Ok(self.price_at_minute(grid.slot_start_minute(s)?)))
            .collect()
    }
}
