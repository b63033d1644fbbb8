//! Command-line front end: loads problem files, runs scenarios, the
//! exhaustive oracle, config validation, and plot-ready data export.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 runtime
//! failure. Nothing is written to disk unless --out is given; without it
//! output goes to stdout.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use hems_core::{
    apply_guarantee, baseline_metrics, baseline_schedule, brute_force, energy_profile,
    render_report, run_ga, run_hsa, run_scenario, Algorithm, Error, GAParams, HSAParams, Problem,
    ReportFormat, Result, Scenario,
};

#[derive(Parser)]
#[command(name = "hems", version, about = "Appliance scheduling under a time-of-use tariff")]
struct Cli {
    /// Worker threads for per-user runs. Results are identical at any value.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a multi-user scenario and report aggregate cost, peak, and PAR.
    Run(RunArgs),
    /// Enumerate every schedule of a small problem and print the optimum.
    Oracle(OracleArgs),
    /// Check a problem file and report its shape.
    Validate(ValidateArgs),
    /// Emit per-slot price and load series as CSV.
    Plotdata(PlotdataArgs),
}

#[derive(Args)]
struct GaFlags {
    /// GA population size.
    #[arg(long)]
    pop: Option<usize>,
    /// GA generation count.
    #[arg(long)]
    gens: Option<usize>,
    /// GA tournament size.
    #[arg(long)]
    tournament: Option<usize>,
    /// GA crossover probability.
    #[arg(long)]
    cx_prob: Option<f64>,
    /// GA per-gene mutation probability (default 1/genome length).
    #[arg(long)]
    mut_prob: Option<f64>,
    /// GA elite count.
    #[arg(long)]
    elite: Option<usize>,
}

impl GaFlags {
    fn params(&self, seed: u64) -> GAParams {
        let mut p = GAParams::new(seed);
        if let Some(v) = self.pop {
            p.population_size = v;
        }
        if let Some(v) = self.gens {
            p.generations = v;
        }
        if let Some(v) = self.tournament {
            p.tournament_size = v;
        }
        if let Some(v) = self.cx_prob {
            p.crossover_prob = v;
        }
        if let Some(v) = self.mut_prob {
            p.mutation_prob_per_gene = Some(v);
        }
        if let Some(v) = self.elite {
            p.elite_count = v;
        }
        p
    }
}

#[derive(Args)]
struct HsaFlags {
    /// Harmony memory size.
    #[arg(long)]
    hms: Option<usize>,
    /// Harmony memory consideration rate.
    #[arg(long)]
    hmcr: Option<f64>,
    /// Pitch adjustment rate.
    #[arg(long)]
    par: Option<f64>,
    /// Bandwidth; accepted for config compatibility, ignored for
    /// bit and start genes.
    #[arg(long)]
    bw: Option<f64>,
    /// Improvisation count.
    #[arg(long)]
    ni: Option<usize>,
}

impl HsaFlags {
    fn params(&self, seed: u64) -> HSAParams {
        let mut p = HSAParams::new(seed);
        if let Some(v) = self.hms {
            p.hms = v;
        }
        if let Some(v) = self.hmcr {
            p.hmcr = v;
        }
        if let Some(v) = self.par {
            p.par_rate = v;
        }
        p.bw = self.bw;
        if let Some(v) = self.ni {
            p.ni = v;
        }
        p
    }
}

#[derive(Args)]
struct RunArgs {
    /// Problem definition file (JSON).
    #[arg(long)]
    problem: PathBuf,
    /// Number of households.
    #[arg(long, default_value_t = 1)]
    users: usize,
    /// Slot resolution in minutes; 30 and 60 unless --allow-any-resolution.
    #[arg(long)]
    resolution: Option<u32>,
    /// Optimizer selection: none, ga, hsa, or both.
    #[arg(long, default_value = "both")]
    algo: String,
    /// Master seed; per-user seeds are derived from it.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Largest per-appliance baseline start shift, in slots. User 0 is
    /// never jittered.
    #[arg(long, default_value_t = 2)]
    jitter: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: table, csv, or json. Defaults to the --out
    /// extension, or table on stdout.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    allow_any_resolution: bool,
    #[command(flatten)]
    ga: GaFlags,
    #[command(flatten)]
    hsa: HsaFlags,
}

#[derive(Args)]
struct OracleArgs {
    /// Problem definition file (JSON).
    #[arg(long)]
    problem: PathBuf,
    /// Slot resolution in minutes; 30 and 60 unless --allow-any-resolution.
    #[arg(long)]
    resolution: Option<u32>,
    /// Output file; stdout when absent. Always JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    allow_any_resolution: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Problem definition file (JSON).
    #[arg(long)]
    problem: PathBuf,
    /// Also check the problem at this resolution.
    #[arg(long)]
    resolution: Option<u32>,
    #[arg(long)]
    allow_any_resolution: bool,
}

#[derive(Args)]
struct PlotdataArgs {
    /// Problem definition file (JSON).
    #[arg(long)]
    problem: PathBuf,
    /// Optimizer producing the optimized series: ga or hsa.
    #[arg(long)]
    algo: String,
    /// Seed for the single optimizer run.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Slot resolution in minutes; 30 and 60 unless --allow-any-resolution.
    #[arg(long)]
    resolution: Option<u32>,
    /// Output file; stdout when absent. Always CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    allow_any_resolution: bool,
    #[command(flatten)]
    ga: GaFlags,
    #[command(flatten)]
    hsa: HsaFlags,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    if cli.jobs == 0 {
        return Err(Error::config("--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot configure {} worker threads: {e}", cli.jobs)))?;
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Plotdata(args) => cmd_plotdata(args),
    }
}

/// 30 and 60 minutes are the supported grids; anything else needs the
/// explicit escape hatch.
fn check_resolution(resolution: Option<u32>, allow_any: bool) -> Result<()> {
    match resolution {
        Some(r) if !allow_any && r != 30 && r != 60 => Err(Error::Config(format!(
            "resolution {r} is not supported; use 30 or 60, or pass --allow-any-resolution"
        ))),
        _ => Ok(()),
    }
}

fn load_problem(path: &Path, resolution: Option<u32>) -> Result<Problem> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let problem = Problem::from_json(&text)?;
    match resolution {
        Some(r) => problem.regrid(r),
        None => Ok(problem),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(Error::Io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Explicit --format wins; otherwise the --out extension decides, and
/// stdout defaults to the human-readable table.
fn pick_format(format: Option<&str>, out: Option<&Path>) -> Result<ReportFormat> {
    if let Some(name) = format {
        return ReportFormat::from_str(name);
    }
    Ok(match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("json") => ReportFormat::Json,
        Some("csv") => ReportFormat::Csv,
        _ => ReportFormat::Table,
    })
}

fn cmd_run(args: RunArgs) -> Result<()> {
    check_resolution(args.resolution, args.allow_any_resolution)?;
    let format = pick_format(args.format.as_deref(), args.out.as_deref())?;
    let base_problem = load_problem(&args.problem, None)?;
    let resolution_minutes = args
        .resolution
        .unwrap_or_else(|| base_problem.grid().resolution_minutes());
    let scenario = Scenario {
        n_users: args.users,
        resolution_minutes,
        algorithm: Algorithm::from_str(&args.algo)?,
        base_problem,
        master_seed: args.seed,
        jitter_slots: args.jitter,
        ga_params: args.ga.params(args.seed),
        hsa_params: args.hsa.params(args.seed),
    };
    let report = run_scenario(&scenario)?;
    log::info!(
        "scenario with {} user(s) finished in {:.3}s",
        report.n_users,
        report.wall_clock_seconds
    );
    emit(&render_report(&report, format)?, args.out.as_deref())
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    check_resolution(args.resolution, args.allow_any_resolution)?;
    let problem = load_problem(&args.problem, args.resolution)?;
    let result = brute_force(&problem)?;
    let mut text = serde_json::to_string_pretty(&result)?;
    text.push('\n');
    emit(&text, args.out.as_deref())
}

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    check_resolution(args.resolution, args.allow_any_resolution)?;
    let problem = load_problem(&args.problem, args.resolution)?;
    println!(
        "ok: {} appliances, {} slots of {} min, search space {}",
        problem.appliances().len(),
        problem.grid().slot_count(),
        problem.grid().resolution_minutes(),
        hems_core::space_size(&problem)
    );
    Ok(())
}

fn cmd_plotdata(args: PlotdataArgs) -> Result<()> {
    check_resolution(args.resolution, args.allow_any_resolution)?;
    let algorithm = Algorithm::from_str(&args.algo)?;
    let problem = load_problem(&args.problem, args.resolution)?;
    let baseline = baseline_metrics(&problem)?;
    let result = match algorithm {
        Algorithm::Ga => run_ga(&problem, &args.ga.params(args.seed))?,
        Algorithm::Hsa => run_hsa(&problem, &args.hsa.params(args.seed))?,
        Algorithm::None | Algorithm::Both => {
            return Err(Error::config("plotdata needs a single optimizer: ga or hsa"))
        }
    };
    let (schedule, _, used_fallback) = apply_guarantee(&problem, &baseline, &result)?;
    if used_fallback {
        log::warn!("optimizer run regressed the baseline; plotting the baseline schedule");
    }
    let baseline_load = energy_profile(&baseline_schedule(&problem)?, &problem)?;
    let optimized_load = energy_profile(&schedule, &problem)?;

    let mut text = String::from("slot,price,baseline_kwh,optimized_kwh\n");
    let rows = problem
        .slot_prices()
        .iter()
        .zip(baseline_load.values())
        .zip(optimized_load.values());
    for (slot, ((price, base), opt)) in rows.enumerate() {
        text.push_str(&format!("{slot},{price:.6},{base:.6},{opt:.6}\n"));
    }
    emit(&text, args.out.as_deref())
}
