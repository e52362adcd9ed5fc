//! Command-line front end: robust solves, budget sweeps, property
//! verification, and artifact export.

mod artifacts;
mod verify;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use robuc_core::{
    load_case, run_approximation, run_ccg, run_copperplate_exact, Backend, CcgConfig, GridCase,
    ModelVariant, RobustSolution, SetVariant, UncertaintySpec,
};

use artifacts::SweepRow;

#[derive(Parser)]
#[command(
    name = "robuc",
    version,
    about = "Two-stage robust unit commitment under temperature and demand uncertainty"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one robust instance and write the solution artifacts.
    Solve(SolveArgs),
    /// Run the bound-based approximation over a grid of budget pairs.
    Sweep(SweepArgs),
    /// Run the built-in property suite (and validate a case, when given).
    Verify(VerifyArgs),
    /// Re-derive CSV artifacts from a saved solution.
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Network,
    NetworkShed,
    Copperplate,
    CopperplateShed,
}

impl From<VariantArg> for ModelVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Network => ModelVariant::Network,
            VariantArg::NetworkShed => ModelVariant::NetworkShed,
            VariantArg::Copperplate => ModelVariant::Copperplate,
            VariantArg::CopperplateShed => ModelVariant::CopperplateShed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SetArg {
    BinaryLinked,
    RelaxedBinary,
}

impl From<SetArg> for SetVariant {
    fn from(v: SetArg) -> Self {
        match v {
            SetArg::BinaryLinked => SetVariant::BinaryLinked,
            SetArg::RelaxedBinary => SetVariant::RelaxedBinary,
        }
    }
}

#[derive(Args)]
struct CommonRun {
    /// Case file (JSON).
    #[arg(long)]
    case: PathBuf,
    /// Recourse model variant.
    #[arg(long, value_enum, default_value = "network")]
    variant: VariantArg,
    /// Demand-after-temperature lag, in periods.
    #[arg(long, default_value_t = 2)]
    lag: usize,
    /// Relative gap at which a run counts as converged.
    #[arg(long, default_value_t = 0.005)]
    epsilon: f64,
    /// Wall-clock budget per run, seconds.
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    /// Random seed handed to the solver (threads stay at 1 for
    /// reproducibility).
    #[arg(long, default_value_t = 0)]
    seed: i32,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonRun,
    /// Uncertainty set used by the worst-case subproblems.
    #[arg(long, value_enum, default_value = "binary-linked")]
    set: SetArg,
    /// Temperature deviation budget.
    #[arg(long, default_value_t = 0)]
    gamma_a: u32,
    /// Demand deviation budget.
    #[arg(long, default_value_t = 0)]
    gamma_d: u32,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonRun,
    /// Comma-separated temperature budgets.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    gamma_a: Vec<u32>,
    /// Comma-separated demand budgets.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    gamma_d: Vec<u32>,
    /// Keep only pairs with gamma_a <= gamma_d, the usual table layout.
    #[arg(long, default_value_t = true)]
    paired: bool,
    /// Budget pairs solved concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Optional case file to validate before the stock suite runs.
    #[arg(long)]
    case: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    /// Saved solution bundle (solution.json from a solve run).
    #[arg(long)]
    solution: PathBuf,
    /// Case the solution belongs to.
    #[arg(long)]
    case: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    // Resolve the backend early so a bad ROBUC_BACKEND fails fast.
    let _ = Backend::from_env()?;
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Export(args) => cmd_export(args),
    }
}

fn load_and_prepare(common: &CommonRun) -> Result<GridCase> {
    let case = load_case(&common.case)
        .with_context(|| format!("loading case {}", common.case.display()))?;
    std::fs::create_dir_all(&common.out)
        .with_context(|| format!("creating {}", common.out.display()))?;
    Ok(case)
}

fn ccg_config(common: &CommonRun, variant: ModelVariant, set: SetVariant) -> CcgConfig {
    let mut config = CcgConfig::new(variant, set);
    config.epsilon = common.epsilon;
    config.time_limit_seconds = common.time_limit;
    config.solve.seed = common.seed;
    config
}

fn cmd_solve(args: SolveArgs) -> Result<i32> {
    let case = load_and_prepare(&args.common)?;
    let variant: ModelVariant = args.common.variant.into();
    let spec = UncertaintySpec::new(&case, args.gamma_a, args.gamma_d, args.common.lag)?;
    let config = ccg_config(&args.common, variant, args.set.into());
    let (solution, state) = if variant.has_network() {
        run_ccg(&case, &spec, &config, &case.load_shed_prices)?
    } else {
        run_copperplate_exact(&case, &spec, &config, &case.load_shed_prices)?
    };
    let out = &args.common.out;
    artifacts::write_solution_json(out, &solution)?;
    artifacts::write_iteration_csv(out, &state)?;
    artifacts::write_commitment_csv(out, &case, &solution.commitment)?;
    artifacts::write_capacity_profile_csv(out, &case, &solution.commitment)?;
    artifacts::write_scenario_json(out, &solution)?;
    print_solution_summary(&solution);
    Ok(0)
}

fn print_solution_summary(solution: &RobustSolution) {
    println!(
        "status {:?}  objective {}  bounds [{}, {}]",
        solution.status,
        artifacts::sig6(solution.objective),
        artifacts::sig6(solution.bound_certificates.lb),
        artifacts::sig6(solution.bound_certificates.ub),
    );
    for note in &solution.notes {
        println!("note: {note}");
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<i32> {
    let case = load_and_prepare(&args.common)?;
    let variant: ModelVariant = args.common.variant.into();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for &a in &args.gamma_a {
        for &d in &args.gamma_d {
            if !args.paired || a <= d || (a == 0 && d == 0) {
                pairs.push((a, d));
            }
        }
    }
    if pairs.is_empty() {
        bail!("budget sweep is empty");
    }

    let jobs = args.jobs.max(1);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let row_slots: Vec<std::sync::Mutex<Option<SweepRow>>> =
        pairs.iter().map(|_| std::sync::Mutex::new(None)).collect();
    let worker = |_worker_id: usize| -> Result<()> {
        loop {
            let index = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
            if index >= pairs.len() {
                return Ok(());
            }
            let (a, d) = pairs[index];
            let spec = UncertaintySpec::new(&case, a, d, args.common.lag)?;
            let config = ccg_config(&args.common, variant, SetVariant::BinaryLinked);
            let started = Instant::now();
            let outcome = run_approximation(&case, &spec, &config, &case.load_shed_prices)?;
            let row = SweepRow {
                gamma_a: a,
                gamma_d: d,
                lower_bound: outcome.lower_bound,
                upper_bound: outcome.upper_bound,
                gap: outcome.gap,
                seconds: started.elapsed().as_secs_f64(),
                value_relaxed_binary: outcome.upper_bound,
            };
            *row_slots[index].lock().unwrap() = Some(row);
        }
    };
    if jobs == 1 {
        worker(0)?;
    } else {
        std::thread::scope(|scope| -> Result<()> {
            let handles: Vec<_> = (0..jobs).map(|id| scope.spawn(move || worker(id))).collect();
            for handle in handles {
                handle.join().expect("sweep worker panicked")?;
            }
            Ok(())
        })?;
    }
    let rows: Vec<SweepRow> = row_slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("row computed"))
        .collect();
    artifacts::write_sweep_csv(&args.common.out, &rows)?;
    for r in &rows {
        println!(
            "gamma_a {} gamma_d {}: LB {} UB {} gap {}",
            r.gamma_a,
            r.gamma_d,
            artifacts::sig6(r.lower_bound),
            artifacts::sig6(r.upper_bound),
            artifacts::sig6(r.gap)
        );
    }
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let outcomes = verify::run_all(args.case.as_deref())?;
    let mut failed = false;
    for outcome in &outcomes {
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{}: {verdict} ({})", outcome.name, outcome.detail);
        failed |= !outcome.passed;
    }
    Ok(if failed { 1 } else { 0 })
}

fn cmd_export(args: ExportArgs) -> Result<i32> {
    let case = load_case(&args.case)?;
    let text = std::fs::read_to_string(&args.solution)
        .with_context(|| format!("reading {}", args.solution.display()))?;
    let solution: RobustSolution = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.solution.display()))?;
    std::fs::create_dir_all(&args.out)?;
    export_artifacts(&args.out, &case, &solution)?;
    println!("exported commitment and capacity profile to {}", args.out.display());
    Ok(0)
}

fn export_artifacts(out: &Path, case: &GridCase, solution: &RobustSolution) -> Result<()> {
    artifacts::write_commitment_csv(out, case, &solution.commitment)?;
    artifacts::write_capacity_profile_csv(out, case, &solution.commitment)?;
    artifacts::write_scenario_json(out, solution)?;
    Ok(())
}
