//! Multi-user experiment runner: builds one household per user, optimizes
//! each independently, and aggregates the results into a comparative
//! report (unoptimized vs GA vs HSA).

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{baseline_metrics, baseline_schedule};
use crate::domain::problem::Problem;
use crate::domain::schedule::Schedule;
use crate::error::{Error, Result};
use crate::ga::{run_ga, GAParams};
use crate::hsa::{run_hsa, HSAParams};
use crate::objective::{energy_profile, par, total_cost_with_prices, EnergyProfile, Metrics};
use crate::result::OptimizationResult;

/// Which optimizer(s) a scenario runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    None,
    Ga,
    Hsa,
    Both,
}

impl Algorithm {
    pub fn runs_ga(&self) -> bool {
        matches!(self, Algorithm::Ga | Algorithm::Both)
    }

    pub fn runs_hsa(&self) -> bool {
        matches!(self, Algorithm::Hsa | Algorithm::Both)
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Algorithm::None),
            "ga" => Ok(Algorithm::Ga),
            "hsa" => Ok(Algorithm::Hsa),
            "both" => Ok(Algorithm::Both),
            other => Err(Error::Config(format!(
                "unknown algorithm '{other}', expected none, ga, hsa, or both"
            ))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Algorithm::None => "none",
            Algorithm::Ga => "ga",
            Algorithm::Hsa => "hsa",
            Algorithm::Both => "both",
        };
        f.write_str(s)
    }
}

/// One multi-user experiment. The seed fields inside `ga_params` and
/// `hsa_params` are ignored; every user gets a seed derived from
/// `master_seed`.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub n_users: usize,
    pub resolution_minutes: u32,
    pub algorithm: Algorithm,
    pub base_problem: Problem,
    pub master_seed: u64,
    /// Largest per-appliance baseline start shift, in slots. User 0 is
    /// never jittered so single-user runs and aggregates stay anchored to
    /// the configured baseline.
    pub jitter_slots: usize,
    pub ga_params: GAParams,
    pub hsa_params: HSAParams,
}

/// Aggregate load metrics of one variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantAggregate {
    /// Peak slot energy of the summed profile, kWh.
    pub max_e_h_kwh: f64,
    pub total_cost_cents: f64,
    pub par: f64,
}

/// Percent improvements relative to the unoptimized variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reductions {
    pub peak_pct: f64,
    pub cost_pct: f64,
    pub par_pct: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizedVariant {
    pub aggregate: VariantAggregate,
    pub reductions: Reductions,
}

/// One optimizer's outcome for one user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserAlgoReport {
    pub seed: u64,
    pub result: OptimizationResult,
    /// True when the optimizer's best regressed on cost or PAR and the
    /// baseline schedule was used instead.
    pub used_fallback: bool,
    /// Metrics of the schedule that entered the aggregate.
    pub applied: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserReport {
    pub user: usize,
    pub baseline: Metrics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ga: Option<UserAlgoReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hsa: Option<UserAlgoReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub n_users: usize,
    pub resolution_minutes: u32,
    pub algorithm: Algorithm,
    pub master_seed: u64,
    pub jitter_slots: usize,
    pub without: VariantAggregate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ga: Option<OptimizedVariant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hsa: Option<OptimizedVariant>,
    pub users: Vec<UserReport>,
    /// Measured, not part of the report's identity: serialization skips
    /// it so equal scenarios produce byte-identical reports.
    #[serde(skip)]
    pub wall_clock_seconds: f64,
}

impl PartialEq for ScenarioReport {
    fn eq(&self, other: &Self) -> bool {
        self.n_users == other.n_users
            && self.resolution_minutes == other.resolution_minutes
            && self.algorithm == other.algorithm
            && self.master_seed == other.master_seed
            && self.jitter_slots == other.jitter_slots
            && self.without == other.without
            && self.ga == other.ga
            && self.hsa == other.hsa
            && self.users == other.users
    }
}

/// Output format of `render_report`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!(
                "unknown report format '{other}', expected table, csv, or json"
            ))),
        }
    }
}

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// One round of the splitmix64 finalizer.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(SEED_STRIDE);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Documented per-user stream derivation: user u uses salts 3u+1 (jitter),
/// 3u+2 (GA), 3u+3 (HSA) mixed into the master seed.
fn derive_seed(master_seed: u64, salt: u64) -> u64 {
    splitmix64(master_seed ^ salt.wrapping_mul(SEED_STRIDE))
}

fn jitter_seed(master_seed: u64, user: usize) -> u64 {
    derive_seed(master_seed, 3 * user as u64 + 1)
}

fn ga_seed(master_seed: u64, user: usize) -> u64 {
    derive_seed(master_seed, 3 * user as u64 + 2)
}

fn hsa_seed(master_seed: u64, user: usize) -> u64 {
    derive_seed(master_seed, 3 * user as u64 + 3)
}

/// Shifts every baseline start by a bounded uniform offset, redrawing until
/// the jittered baseline is feasible (zero penalty). Falls back to the
/// shared baseline after 100 infeasible draws.
fn jittered_problem(base: &Problem, master_seed: u64, user: usize, jitter: usize) -> Result<Problem> {
    use rand::Rng;
    use rand::SeedableRng;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(jitter_seed(master_seed, user));
    let slot_count = base.grid().slot_count();
    let required: Vec<usize> = base
        .appliances()
        .iter()
        .map(|a| a.required_slots(base.grid()))
        .collect::<Result<_>>()?;
    let bound = jitter as i64;
    for _ in 0..100 {
        let starts: Vec<usize> = base
            .appliances()
            .iter()
            .zip(&required)
            .map(|(app, &req)| {
                let max_start = (slot_count - req) as i64;
                let offset = rng.random_range(-bound..=bound);
                (app.baseline_start_slot as i64 + offset).clamp(0, max_start) as usize
            })
            .collect();
        let candidate = base.with_baseline_starts(&starts)?;
        if baseline_metrics(&candidate)?.penalty == 0.0 {
            return Ok(candidate);
        }
    }
    log::warn!("user {user}: no feasible jittered baseline in 100 draws, keeping the shared one");
    Ok(base.clone())
}

/// Applies the per-user guarantee: a result that regressed on cost or PAR
/// relative to the user's baseline is replaced by that baseline. Returns
/// the schedule to aggregate, its metrics, and whether the fallback fired.
pub fn apply_guarantee(
    problem: &Problem,
    baseline: &Metrics,
    result: &OptimizationResult,
) -> Result<(Schedule, Metrics, bool)> {
    if result.metrics.total_cost_cents > baseline.total_cost_cents
        || result.metrics.par > baseline.par
    {
        Ok((baseline_schedule(problem)?, *baseline, true))
    } else {
        Ok((result.best_schedule.clone(), result.metrics, false))
    }
}

struct UserRun {
    report: UserReport,
    baseline_profile: EnergyProfile,
    ga_profile: Option<EnergyProfile>,
    hsa_profile: Option<EnergyProfile>,
}

fn run_user(scenario: &Scenario, problem: &Problem, user: usize) -> Result<UserRun> {
    let user_problem = if user == 0 || scenario.jitter_slots == 0 {
        problem.clone()
    } else {
        jittered_problem(problem, scenario.master_seed, user, scenario.jitter_slots)?
    };
    let base_schedule = baseline_schedule(&user_problem)?;
    let base_metrics = baseline_metrics(&user_problem)?;
    let baseline_profile = energy_profile(&base_schedule, &user_problem)?;

    let run_algo = |result: OptimizationResult, seed: u64| -> Result<(UserAlgoReport, EnergyProfile)> {
        let (applied_schedule, applied, used_fallback) =
            apply_guarantee(&user_problem, &base_metrics, &result)?;
        let profile = energy_profile(&applied_schedule, &user_problem)?;
        Ok((
            UserAlgoReport {
                seed,
                result,
                used_fallback,
                applied,
            },
            profile,
        ))
    };

    let (mut ga, mut ga_profile) = (None, None);
    if scenario.algorithm.runs_ga() {
        let seed = ga_seed(scenario.master_seed, user);
        let params = GAParams {
            seed,
            ..scenario.ga_params.clone()
        };
        let (report, profile) = run_algo(run_ga(&user_problem, &params)?, seed)?;
        ga = Some(report);
        ga_profile = Some(profile);
    }
    let (mut hsa, mut hsa_profile) = (None, None);
    if scenario.algorithm.runs_hsa() {
        let seed = hsa_seed(scenario.master_seed, user);
        let params = HSAParams {
            seed,
            ..scenario.hsa_params.clone()
        };
        let (report, profile) = run_algo(run_hsa(&user_problem, &params)?, seed)?;
        hsa = Some(report);
        hsa_profile = Some(profile);
    }

    Ok(UserRun {
        report: UserReport {
            user,
            baseline: base_metrics,
            ga,
            hsa,
        },
        baseline_profile,
        ga_profile,
        hsa_profile,
    })
}

fn aggregate(profiles: Vec<&EnergyProfile>, prices: &[f64]) -> Result<VariantAggregate> {
    let mut iter = profiles.into_iter();
    let first = iter.next().ok_or_else(|| Error::shape("no profiles to aggregate"))?;
    let mut sum = first.clone();
    for p in iter {
        sum = sum.add(p)?;
    }
    Ok(VariantAggregate {
        max_e_h_kwh: sum.peak_kwh(),
        total_cost_cents: total_cost_with_prices(&sum, prices)?,
        par: par(&sum)?,
    })
}

fn reductions(without: &VariantAggregate, with: &VariantAggregate) -> Reductions {
    let pct = |from: f64, to: f64| 100.0 * (from - to) / from;
    Reductions {
        peak_pct: pct(without.max_e_h_kwh, with.max_e_h_kwh),
        cost_pct: pct(without.total_cost_cents, with.total_cost_cents),
        par_pct: pct(without.par, with.par),
    }
}

/// Runs every user (in parallel when a thread pool is configured) and
/// aggregates slot-wise in user order.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioReport> {
    if scenario.n_users == 0 {
        return Err(Error::config("a scenario needs at least one user"));
    }
    let started = Instant::now();
    let problem = scenario.base_problem.regrid(scenario.resolution_minutes)?;
    let runs: Vec<UserRun> = (0..scenario.n_users)
        .into_par_iter()
        .map(|u| {
            run_user(scenario, &problem, u)
                .map_err(|e| Error::Config(format!("user {u}: {e}")))
        })
        .collect::<Result<_>>()?;

    let prices = problem.slot_prices();
    let without = aggregate(runs.iter().map(|r| &r.baseline_profile).collect(), prices)?;
    let mut ga = None;
    if scenario.algorithm.runs_ga() {
        let agg = aggregate(
            runs.iter()
                .map(|r| r.ga_profile.as_ref().expect("ga ran for every user"))
                .collect(),
            prices,
        )?;
        ga = Some(OptimizedVariant {
            aggregate: agg,
            reductions: reductions(&without, &agg),
        });
    }
    let mut hsa = None;
    if scenario.algorithm.runs_hsa() {
        let agg = aggregate(
            runs.iter()
                .map(|r| r.hsa_profile.as_ref().expect("hsa ran for every user"))
                .collect(),
            prices,
        )?;
        hsa = Some(OptimizedVariant {
            aggregate: agg,
            reductions: reductions(&without, &agg),
        });
    }

    Ok(ScenarioReport {
        n_users: scenario.n_users,
        resolution_minutes: scenario.resolution_minutes,
        algorithm: scenario.algorithm,
        master_seed: scenario.master_seed,
        jitter_slots: scenario.jitter_slots,
        without,
        ga,
        hsa,
        users: runs.into_iter().map(|r| r.report).collect(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

fn render_table(report: &ScenarioReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "Scenario: {} user(s), {}-min slots, algorithm {}, seed {}\n\n",
        report.n_users, report.resolution_minutes, report.algorithm, report.master_seed
    ));
    out.push_str(&format!(
        "{:<14} {:>14} {:>14} {:>8}\n",
        "Variant", "Max E_H (kWh)", "Cost (cents)", "PAR"
    ));
    let variant_row = |name: &str, a: &VariantAggregate| {
        format!(
            "{:<14} {:>14.4} {:>14.4} {:>8.4}\n",
            name, a.max_e_h_kwh, a.total_cost_cents, a.par
        )
    };
    out.push_str(&variant_row("Without HEMS", &report.without));
    if let Some(v) = &report.ga {
        out.push_str(&variant_row("GA-HEMS", &v.aggregate));
    }
    if let Some(v) = &report.hsa {
        out.push_str(&variant_row("HSA-HEMS", &v.aggregate));
    }
    if report.ga.is_some() || report.hsa.is_some() {
        out.push_str(&format!(
            "\nReductions vs Without HEMS (%)\n{:<14} {:>8} {:>8} {:>8}\n",
            "Variant", "Peak", "Cost", "PAR"
        ));
        let reduction_row = |name: &str, r: &Reductions| {
            format!(
                "{:<14} {:>8.2} {:>8.2} {:>8.2}\n",
                name, r.peak_pct, r.cost_pct, r.par_pct
            )
        };
        if let Some(v) = &report.ga {
            out.push_str(&reduction_row("GA-HEMS", &v.reductions));
        }
        if let Some(v) = &report.hsa {
            out.push_str(&reduction_row("HSA-HEMS", &v.reductions));
        }
    }
    out
}

fn render_csv(report: &ScenarioReport) -> String {
    let mut out = String::from("variant,user,peak_kwh,total_cost_cents,par\n");
    let mut row = |variant: &str, user: &str, peak: f64, cost: f64, par: f64| {
        out.push_str(&format!("{variant},{user},{peak:.6},{cost:.6},{par:.6}\n"));
    };
    for user in &report.users {
        let id = user.user.to_string();
        row(
            "without",
            &id,
            user.baseline.peak_kwh,
            user.baseline.total_cost_cents,
            user.baseline.par,
        );
        if let Some(a) = &user.ga {
            row("ga", &id, a.applied.peak_kwh, a.applied.total_cost_cents, a.applied.par);
        }
        if let Some(a) = &user.hsa {
            row("hsa", &id, a.applied.peak_kwh, a.applied.total_cost_cents, a.applied.par);
        }
    }
    let w = &report.without;
    row("without", "aggregate", w.max_e_h_kwh, w.total_cost_cents, w.par);
    if let Some(v) = &report.ga {
        let a = &v.aggregate;
        row("ga", "aggregate", a.max_e_h_kwh, a.total_cost_cents, a.par);
    }
    if let Some(v) = &report.hsa {
        let a = &v.aggregate;
        row("hsa", "aggregate", a.max_e_h_kwh, a.total_cost_cents, a.par);
    }
    out
}

/// Renders a report. Table and CSV are for reading and spreadsheets; JSON
/// round-trips through `parse_report` without loss.
pub fn render_report(report: &ScenarioReport, format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Table => render_table(report),
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(report)?;
            text.push('\n');
            text
        }
    })
}

pub fn parse_report(text: &str) -> Result<ScenarioReport> {
    Ok(serde_json::from_str(text)?)
}
