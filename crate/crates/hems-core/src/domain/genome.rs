//! Optimizer-side encoding: one start-slot gene per contiguous flexible
//! load, one raw bit per (interruptible appliance, slot) pair.
//!
//! Decoding any in-range genome yields a schedule whose ON-counts and
//! contiguity rules hold by construction; interruptible rows get their
//! ON-count enforced by `repair_row`. Precedence and capacity stay soft
//! and are priced into fitness instead.

use rand::Rng;

use crate::domain::appliance::{Appliance, FlexClass};
use crate::domain::grid::TimeGrid;
use crate::domain::schedule::Schedule;
use crate::error::{Error, Result};

/// Flat gene vector. Start genes hold a slot index, bit genes hold 0 or 1.
pub type Genome = Vec<u32>;

/// Domain of one gene position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneKind {
    /// Start slot of a contiguous run, valid values 0..=max_start.
    Start { max_start: u32 },
    /// ON/OFF bit for one interruptible slot.
    Bit,
}

impl GeneKind {
    /// Number of distinct values this gene can take.
    pub fn domain_size(&self) -> u32 {
        match self {
            GeneKind::Start { max_start } => max_start + 1,
            GeneKind::Bit => 2,
        }
    }

    pub fn max_value(&self) -> u32 {
        self.domain_size() - 1
    }
}

/// How one appliance's schedule row is produced from the genome.
#[derive(Debug, Clone, PartialEq, Eq)]
enum RowPlan {
    /// Immovable window, no genes.
    Fixed { start: usize, len: usize },
    /// Contiguous run whose start is one gene.
    Contiguous { gene: usize, len: usize },
    /// One bit per slot, ON-count repaired to `required`.
    Scattered { first_gene: usize, required: usize },
}

/// Gene layout for a problem: a pure function of its appliances and grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GenomeLayout {
    genes: Vec<GeneKind>,
    rows: Vec<RowPlan>,
    slot_count: usize,
    /// Slot indices sorted cheapest first, ties by lower index.
    cheap_order: Vec<usize>,
    /// Slot indices sorted most expensive first, ties by lower index.
    expensive_order: Vec<usize>,
}

impl GenomeLayout {
    pub fn new(appliances: &[Appliance], grid: &TimeGrid, slot_prices: &[f64]) -> Result<Self> {
        let slot_count = grid.slot_count();
        if slot_prices.len() != slot_count {
            return Err(Error::Shape(format!(
                "{} slot prices for a {slot_count}-slot grid",
                slot_prices.len()
            )));
        }

        let mut genes = Vec::new();
        let mut rows = Vec::with_capacity(appliances.len());
        for app in appliances {
            let required = app.required_slots(grid)?;
            match app.flex_class {
                FlexClass::Fixed => {
                    let start = app.fixed_window_start();
                    if start + required > slot_count {
                        return Err(Error::Config(format!(
                            "appliance '{}': fixed window {start}..{} overflows the {slot_count}-slot horizon",
                            app.name,
                            start + required
                        )));
                    }
                    rows.push(RowPlan::Fixed {
                        start,
                        len: required,
                    });
                }
                FlexClass::NonInterruptible => {
                    if required > slot_count {
                        return Err(Error::Config(format!(
                            "appliance '{}': {required} required slots exceed the {slot_count}-slot horizon",
                            app.name
                        )));
                    }
                    rows.push(RowPlan::Contiguous {
                        gene: genes.len(),
                        len: required,
                    });
                    genes.push(GeneKind::Start {
                        max_start: (slot_count - required) as u32,
                    });
                }
                FlexClass::Interruptible => {
                    if required > slot_count {
                        return Err(Error::Config(format!(
                            "appliance '{}': {required} required slots exceed the {slot_count}-slot horizon",
                            app.name
                        )));
                    }
                    rows.push(RowPlan::Scattered {
                        first_gene: genes.len(),
                        required,
                    });
                    genes.extend(std::iter::repeat_n(GeneKind::Bit, slot_count));
                }
            }
        }

        let mut cheap_order: Vec<usize> = (0..slot_count).collect();
        cheap_order.sort_by(|&a, &b| slot_prices[a].total_cmp(&slot_prices[b]).then(a.cmp(&b)));
        let mut expensive_order: Vec<usize> = (0..slot_count).collect();
        expensive_order
            .sort_by(|&a, &b| slot_prices[b].total_cmp(&slot_prices[a]).then(a.cmp(&b)));

        Ok(Self {
            genes,
            rows,
            slot_count,
            cheap_order,
            expensive_order,
        })
    }

    /// Genome length L.
    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn genes(&self) -> &[GeneKind] {
        &self.genes
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    /// Exact number of distinct genomes, saturating at u128::MAX.
    pub fn space_size(&self) -> u128 {
        self.genes
            .iter()
            .fold(1u128, |acc, g| acc.saturating_mul(g.domain_size() as u128))
    }

    fn check_genome(&self, genome: &[u32]) -> Result<()> {
        if genome.len() != self.genes.len() {
            return Err(Error::Encoding(format!(
                "genome has {} genes, layout expects {}",
                genome.len(),
                self.genes.len()
            )));
        }
        for (i, (&value, kind)) in genome.iter().zip(&self.genes).enumerate() {
            if value > kind.max_value() {
                return Err(Error::Encoding(format!(
                    "gene {i} value {value} exceeds maximum {}",
                    kind.max_value()
                )));
            }
        }
        Ok(())
    }

    /// Expands a genome into a full schedule. Deterministic: equal inputs
    /// give bit-identical output.
    pub fn decode(&self, genome: &[u32]) -> Result<Schedule> {
        self.check_genome(genome)?;
        let mut rows = Vec::with_capacity(self.rows.len());
        for plan in &self.rows {
            let mut row = vec![false; self.slot_count];
            match plan {
                RowPlan::Fixed { start, len } => row[*start..start + len].fill(true),
                RowPlan::Contiguous { gene, len } => {
                    let start = genome[*gene] as usize;
                    row[start..start + len].fill(true);
                }
                RowPlan::Scattered {
                    first_gene,
                    required,
                } => {
                    for (slot, bit) in row.iter_mut().enumerate() {
                        *bit = genome[first_gene + slot] != 0;
                    }
                    repair_row(
                        &mut row,
                        *required,
                        &self.cheap_order,
                        &self.expensive_order,
                    );
                }
            }
            rows.push(row);
        }
        Schedule::new(rows, self.slot_count)
    }

    /// Genome placing every flexible appliance in a contiguous run at the
    /// given per-appliance start slot. Fixed appliances take no genes.
    pub fn encode_contiguous(&self, starts: &[usize]) -> Result<Genome> {
        if starts.len() != self.rows.len() {
            return Err(Error::Shape(format!(
                "{} starts for {} appliances",
                starts.len(),
                self.rows.len()
            )));
        }
        let mut genome = vec![0u32; self.genes.len()];
        for (plan, &start) in self.rows.iter().zip(starts) {
            match plan {
                RowPlan::Fixed { .. } => {}
                RowPlan::Contiguous { gene, len } => {
                    if start + len > self.slot_count {
                        return Err(Error::Config(format!(
                            "contiguous run {start}..{} overflows the {}-slot horizon",
                            start + len,
                            self.slot_count
                        )));
                    }
                    genome[*gene] = start as u32;
                }
                RowPlan::Scattered {
                    first_gene,
                    required,
                } => {
                    if start + required > self.slot_count {
                        return Err(Error::Config(format!(
                            "contiguous run {start}..{} overflows the {}-slot horizon",
                            start + required,
                            self.slot_count
                        )));
                    }
                    for slot in start..start + required {
                        genome[first_gene + slot] = 1;
                    }
                }
            }
        }
        Ok(genome)
    }

    /// Uniform random genome. Draws one value per gene in gene order.
    pub fn random_genome<R: Rng + ?Sized>(&self, rng: &mut R) -> Genome {
        self.genes
            .iter()
            .map(|kind| rng.random_range(0..=kind.max_value()))
            .collect()
    }
}

/// Forces the ON-count of an interruptible row to `required` with the
/// fewest possible flips: excess ON bits are cleared most expensive slot
/// first, missing ON bits are set cheapest slot first. Both orders break
/// price ties by lower slot index. A row already at the count is unchanged.
pub fn repair_row(
    row: &mut [bool],
    required: usize,
    cheap_order: &[usize],
    expensive_order: &[usize],
) {
    let mut count = row.iter().filter(|&&b| b).count();
    if count > required {
        for &slot in expensive_order {
            if count == required {
                break;
            }
            if row[slot] {
                row[slot] = false;
                count -= 1;
            }
        }
    } else if count < required {
        for &slot in cheap_order {
            if count == required {
                break;
            }
            if !row[slot] {
                row[slot] = true;
                count += 1;
            }
        }
    }
}
