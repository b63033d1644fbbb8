//! Schedule matrix: one ON/OFF row per appliance across the horizon slots.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::domain::problem::Problem;
use crate::error::{Error, Result};

/// Appliance-by-slot ON/OFF matrix. Row order matches the problem's
/// appliance order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    rows: Vec<Vec<bool>>,
    slot_count: usize,
}

impl Schedule {
    pub fn new(rows: Vec<Vec<bool>>, slot_count: usize) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != slot_count {
                return Err(Error::Shape(format!(
                    "schedule row {i} has {} slots, expected {slot_count}",
                    row.len()
                )));
            }
        }
        Ok(Self { rows, slot_count })
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    pub fn is_on(&self, appliance: usize, slot: usize) -> bool {
        self.rows[appliance][slot]
    }

    /// Number of ON slots in one appliance's row.
    pub fn on_count(&self, appliance: usize) -> usize {
        self.rows[appliance].iter().filter(|&&b| b).count()
    }

    /// Last ON slot of a row, if any.
    pub fn last_on(&self, appliance: usize) -> Option<usize> {
        self.rows[appliance].iter().rposition(|&b| b)
    }

    /// First ON slot of a row, if any.
    pub fn first_on(&self, appliance: usize) -> Option<usize> {
        self.rows[appliance].iter().position(|&b| b)
    }

    /// True when all ON slots of a row form one contiguous block.
    pub fn is_contiguous(&self, appliance: usize) -> bool {
        match (self.first_on(appliance), self.last_on(appliance)) {
            (Some(first), Some(last)) => last - first + 1 == self.on_count(appliance),
            _ => true,
        }
    }
}

// Rows serialize as bit-strings ("0110...") to keep reports compact and
// byte-stable.
impl Serialize for Schedule {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&b| if b { '1' } else { '0' }).collect())
            .collect();
        strings.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Schedule {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(deserializer)?;
        let slot_count = strings.first().map_or(0, |s| s.len());
        let mut rows = Vec::with_capacity(strings.len());
        for s in &strings {
            if s.len() != slot_count {
                return Err(D::Error::custom("schedule rows have unequal lengths"));
            }
            let row: std::result::Result<Vec<bool>, D::Error> = s
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(D::Error::custom(format!(
                        "schedule bit must be 0 or 1, got '{other}'"
                    ))),
                })
                .collect();
            rows.push(row?);
        }
        Ok(Self { rows, slot_count })
    }
}

/// One broken scheduling rule, reported by `validate_schedule`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Row has the wrong number of ON slots.
    OnCount {
        appliance: String,
        expected: usize,
        actual: usize,
    },
    /// Fixed or non-interruptible row is split into multiple blocks.
    NotContiguous { appliance: String },
    /// Fixed row moved away from its fixed window.
    FixedWindow {
        appliance: String,
        expected_start: usize,
        actual_start: usize,
    },
    /// Appliance starts before its predecessor finishes.
    Precedence {
        appliance: String,
        predecessor: String,
    },
    /// Slot draws more energy than the household limit.
    Capacity {
        slot: usize,
        load_kwh: f64,
        limit_kwh: f64,
    },
}

/// Checks every scheduling rule and returns all violations found.
///
/// The optimizers only ever produce schedules whose per-row rules hold by
/// construction; precedence and capacity are the soft rules they trade off
/// through penalties.
pub fn validate_schedule(problem: &Problem, schedule: &Schedule) -> Result<Vec<Violation>> {
    if schedule.rows().len() != problem.appliances().len() {
        return Err(Error::Shape(format!(
            "schedule has {} rows, problem has {} appliances",
            schedule.rows().len(),
            problem.appliances().len()
        )));
    }
    if schedule.slot_count() != problem.grid().slot_count() {
        return Err(Error::Shape(format!(
            "schedule has {} slots, grid has {}",
            schedule.slot_count(),
            problem.grid().slot_count()
        )));
    }

    let mut violations = Vec::new();
    for (i, app) in problem.appliances().iter().enumerate() {
        let required = app.required_slots(problem.grid())?;
        let actual = schedule.on_count(i);
        if actual != required {
            violations.push(Violation::OnCount {
                appliance: app.name.clone(),
                expected: required,
                actual,
            });
        }
        match app.flex_class {
            crate::domain::appliance::FlexClass::Fixed => {
                if !schedule.is_contiguous(i) {
                    violations.push(Violation::NotContiguous {
                        appliance: app.name.clone(),
                    });
                }
                let expected_start = app.fixed_window_start();
                if let Some(actual_start) = schedule.first_on(i) {
                    if actual_start != expected_start {
                        violations.push(Violation::FixedWindow {
                            appliance: app.name.clone(),
                            expected_start,
                            actual_start,
                        });
                    }
                }
            }
            crate::domain::appliance::FlexClass::NonInterruptible => {
                if !schedule.is_contiguous(i) {
                    violations.push(Violation::NotContiguous {
                        appliance: app.name.clone(),
                    });
                }
            }
            crate::domain::appliance::FlexClass::Interruptible => {}
        }
        if let Some(pred_name) = &app.predecessor {
            let pred_idx = problem.appliance_index(pred_name)?;
            if let (Some(pred_last), Some(own_first)) =
                (schedule.last_on(pred_idx), schedule.first_on(i))
            {
                if own_first <= pred_last {
                    violations.push(Violation::Precedence {
                        appliance: app.name.clone(),
                        predecessor: pred_name.clone(),
                    });
                }
            }
        }
    }

    let limit = problem.capacity_kwh();
    for slot in 0..schedule.slot_count() {
        let load: f64 = problem
            .appliances()
            .iter()
            .enumerate()
            .filter(|(i, _)| schedule.is_on(*i, slot))
            .map(|(_, a)| a.slot_energy_kwh(problem.grid()))
            .sum();
        if load > limit + 1e-9 {
            violations.push(Violation::Capacity {
                slot,
                load_kwh: load,
                limit_kwh: limit,
            });
        }
    }

    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_rows() {
        let rows = vec![vec![true, false], vec![true]];
        assert!(Schedule::new(rows, 2).is_err());
    }

    #[test]
    fn contiguity_and_counts() {
        let s = Schedule::new(
            vec![
                vec![false, true, true, false],
                vec![true, false, true, false],
                vec![false, false, false, false],
            ],
            4,
        )
        .unwrap();
        assert!(s.is_contiguous(0));
        assert!(!s.is_contiguous(1));
        assert!(s.is_contiguous(2));
        assert_eq!(s.on_count(0), 2);
        assert_eq!(s.first_on(1), Some(0));
        assert_eq!(s.last_on(1), Some(2));
        assert_eq!(s.first_on(2), None);
    }

    #[test]
    fn bitstring_round_trip() {
        let s = Schedule::new(vec![vec![true, false, true], vec![false, false, true]], 3).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"["101","001"]"#);
        let back: Schedule = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn deserialize_rejects_bad_bit() {
        let err = serde_json::from_str::<Schedule>(r#"["102"]"#);
        assert!(err.is_err());
    }
}
