//! Problem instance: grid, appliances, tariff, capacity, and objective
//! weights, validated once and immutable afterwards.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::domain::appliance::{Appliance, FlexClass};
use crate::domain::genome::GenomeLayout;
use crate::domain::grid::TimeGrid;
use crate::error::{Error, Result};
use crate::tariff::{BandDoc, TariffProfile};

/// Objective weights for the two normalized terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub cost: f64,
    pub par: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Self {
            cost: 0.5,
            par: 0.5,
        }
    }
}

/// Penalty weights, in normalized fitness units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Penalties {
    pub precedence: f64,
    pub capacity: f64,
}

impl Default for Penalties {
    fn default() -> Self {
        Self {
            precedence: 10.0,
            capacity: 10.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub horizon_hours: u32,
    pub resolution_minutes: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApplianceDoc {
    pub name: String,
    pub power_kw: f64,
    pub oti_hours: u32,
    pub class: FlexClass,
    pub baseline_start: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predecessor: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TariffDoc {
    pub bands: Vec<BandDoc>,
}

/// On-disk problem document. Field names are part of the config format.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    pub grid: GridDoc,
    pub appliances: Vec<ApplianceDoc>,
    pub tariff: TariffDoc,
    pub capacity_kwh: f64,
    #[serde(default)]
    pub weights: Weights,
    #[serde(default)]
    pub penalties: Penalties,
}

/// Validated scheduling problem.
#[derive(Debug, Clone)]
pub struct Problem {
    grid: TimeGrid,
    appliances: Vec<Appliance>,
    tariff: TariffProfile,
    capacity_kwh: f64,
    weights: Weights,
    penalties: Penalties,
    slot_prices: Vec<f64>,
    layout: GenomeLayout,
    index_by_name: HashMap<String, usize>,
    /// Resolved predecessor index per appliance, in appliance order.
    predecessor_indices: Vec<Option<usize>>,
}

impl Problem {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ProblemDoc = serde_json::from_str(text)?;
        Self::from_doc(&doc)
    }

    pub fn from_doc(doc: &ProblemDoc) -> Result<Self> {
        let grid = TimeGrid::new(doc.grid.horizon_hours, doc.grid.resolution_minutes)?;
        let appliances: Vec<Appliance> = doc
            .appliances
            .iter()
            .map(|a| Appliance {
                name: a.name.clone(),
                power_kw: a.power_kw,
                oti_hours: a.oti_hours,
                flex_class: a.class,
                fixed_start_slot: a.fixed_start,
                baseline_start_slot: a.baseline_start,
                predecessor: a.predecessor.clone(),
            })
            .collect();
        let tariff = TariffProfile::from_bands(&doc.tariff.bands)?;
        Self::from_parts(
            grid,
            appliances,
            tariff,
            doc.capacity_kwh,
            doc.weights,
            doc.penalties,
        )
    }

    /// Builds and validates a problem from already-typed parts.
    pub fn from_parts(
        grid: TimeGrid,
        appliances: Vec<Appliance>,
        tariff: TariffProfile,
        capacity_kwh: f64,
        weights: Weights,
        penalties: Penalties,
    ) -> Result<Self> {
        if appliances.is_empty() {
            return Err(Error::config("problem has no appliances"));
        }
        if !capacity_kwh.is_finite() || capacity_kwh <= 0.0 {
            return Err(Error::Config(format!(
                "capacity_kwh must be positive, got {capacity_kwh}"
            )));
        }
        for (label, value) in [("cost", weights.cost), ("par", weights.par)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Config(format!(
                    "weight '{label}' must be nonnegative, got {value}"
                )));
            }
        }
        if weights.cost + weights.par <= 0.0 {
            return Err(Error::config("at least one objective weight must be positive"));
        }
        for (label, value) in [
            ("precedence", penalties.precedence),
            ("capacity", penalties.capacity),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Config(format!(
                    "penalty '{label}' must be nonnegative, got {value}"
                )));
            }
        }

        let mut index_by_name = HashMap::new();
        for (i, app) in appliances.iter().enumerate() {
            if app.name.is_empty() {
                return Err(Error::Config(format!("appliance {i} has an empty name")));
            }
            if index_by_name.insert(app.name.clone(), i).is_some() {
                return Err(Error::Config(format!(
                    "duplicate appliance name '{}'",
                    app.name
                )));
            }
            if !app.power_kw.is_finite() || app.power_kw <= 0.0 {
                return Err(Error::Config(format!(
                    "appliance '{}': power_kw must be positive, got {}",
                    app.name, app.power_kw
                )));
            }
            if app.oti_hours == 0 {
                return Err(Error::Config(format!(
                    "appliance '{}': oti_hours must be at least 1",
                    app.name
                )));
            }
            if app.fixed_start_slot.is_some() && app.flex_class != FlexClass::Fixed {
                return Err(Error::Config(format!(
                    "appliance '{}': fixed_start is only valid for the fixed class",
                    app.name
                )));
            }
            let required = app.required_slots(&grid)?;
            if app.baseline_start_slot + required > grid.slot_count() {
                return Err(Error::Config(format!(
                    "appliance '{}': baseline run {}..{} overflows the {}-slot horizon",
                    app.name,
                    app.baseline_start_slot,
                    app.baseline_start_slot + required,
                    grid.slot_count()
                )));
            }
        }

        let mut predecessor_indices = Vec::with_capacity(appliances.len());
        for app in &appliances {
            match &app.predecessor {
                None => predecessor_indices.push(None),
                Some(name) => {
                    let idx = *index_by_name.get(name).ok_or_else(|| {
                        Error::Config(format!(
                            "appliance '{}': predecessor '{name}' does not exist",
                            app.name
                        ))
                    })?;
                    if appliances[idx].name == app.name {
                        return Err(Error::Config(format!(
                            "appliance '{}' cannot precede itself",
                            app.name
                        )));
                    }
                    predecessor_indices.push(Some(idx));
                }
            }
        }
        for start in 0..appliances.len() {
            let mut cursor = predecessor_indices[start];
            let mut steps = 0;
            while let Some(idx) = cursor {
                steps += 1;
                if idx == start || steps > appliances.len() {
                    return Err(Error::Config(format!(
                        "precedence cycle involving appliance '{}'",
                        appliances[start].name
                    )));
                }
                cursor = predecessor_indices[idx];
            }
        }

        let slot_prices = tariff.slot_prices(&grid)?;
        let layout = GenomeLayout::new(&appliances, &grid, &slot_prices)?;

        Ok(Self {
            grid,
            appliances,
            tariff,
            capacity_kwh,
            weights,
            penalties,
            slot_prices,
            layout,
            index_by_name,
            predecessor_indices,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn appliances(&self) -> &[Appliance] {
        &self.appliances
    }

    pub fn tariff(&self) -> &TariffProfile {
        &self.tariff
    }

    pub fn capacity_kwh(&self) -> f64 {
        self.capacity_kwh
    }

    pub fn weights(&self) -> Weights {
        self.weights
    }

    pub fn penalties(&self) -> Penalties {
        self.penalties
    }

    /// Price of each slot, precomputed at construction.
    pub fn slot_prices(&self) -> &[f64] {
        &self.slot_prices
    }

    pub fn layout(&self) -> &GenomeLayout {
        &self.layout
    }

    pub fn appliance_index(&self, name: &str) -> Result<usize> {
        self.index_by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::Config(format!("no appliance named '{name}'")))
    }

    pub fn predecessor_indices(&self) -> &[Option<usize>] {
        &self.predecessor_indices
    }

    /// Same problem with every appliance's baseline start replaced.
    pub fn with_baseline_starts(&self, starts: &[usize]) -> Result<Self> {
        if starts.len() != self.appliances.len() {
            return Err(Error::Shape(format!(
                "{} starts for {} appliances",
                starts.len(),
                self.appliances.len()
            )));
        }
        let appliances = self
            .appliances
            .iter()
            .zip(starts)
            .map(|(app, &start)| Appliance {
                baseline_start_slot: start,
                ..app.clone()
            })
            .collect();
        Self::from_parts(
            self.grid,
            appliances,
            self.tariff.clone(),
            self.capacity_kwh,
            self.weights,
            self.penalties,
        )
    }

    /// Same problem on a different slot resolution. Slot-indexed fields are
    /// rescaled: starts map to the slot covering the same wall-clock minute,
    /// and the per-slot capacity scales with slot duration.
    pub fn regrid(&self, resolution_minutes: u32) -> Result<Self> {
        let old_res = self.grid.resolution_minutes();
        if resolution_minutes == old_res {
            return Ok(self.clone());
        }
        let grid = TimeGrid::new(self.grid.horizon_hours(), resolution_minutes)?;
        let rescale = |name: &str, slot: usize| -> Result<usize> {
            let minute = slot as u32 * old_res;
            if !minute.is_multiple_of(resolution_minutes) {
                return Err(Error::Config(format!(
                    "appliance '{name}': start at minute {minute} does not align to the {resolution_minutes}-minute grid"
                )));
            }
            Ok((minute / resolution_minutes) as usize)
        };
        let mut appliances = Vec::with_capacity(self.appliances.len());
        for app in &self.appliances {
            appliances.push(Appliance {
                baseline_start_slot: rescale(&app.name, app.baseline_start_slot)?,
                fixed_start_slot: app
                    .fixed_start_slot
                    .map(|s| rescale(&app.name, s))
                    .transpose()?,
                ..app.clone()
            });
        }
        let capacity = self.capacity_kwh * resolution_minutes as f64 / old_res as f64;
        Self::from_parts(
            grid,
            appliances,
            self.tariff.clone(),
            capacity,
            self.weights,
            self.penalties,
        )
    }
}
