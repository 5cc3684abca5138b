//! `neuroclear` command line.
//!
//! Subcommands cover the full workflow: `collect` labels a dataset with
//! the exact clearance oracle, `train` fits the regressor, `eval-model`
//! scores the thresholded classifier, `plan` answers one query,
//! `bench` compares planners over a seeded query stream, and
//! `tradeoff` prints the amortization report.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a
//! planning query is infeasible or the planner fails within budget.

use clap::{Args, Parser, Subcommand};
use neuroclear::bench::{run_bench, save_path_file, BenchConfig, PathFile, PlannerKind};
use neuroclear::classifier::{confusion, ConfusionReport};
use neuroclear::clearancenet::{load_model, save_model, train, TrainConfig};
use neuroclear::cspace::{catalog, load_environment, Environment, Rng};
use neuroclear::planner::{cnrrt_plan, Clock, PlanQuery, RepairConfig};
use neuroclear::{dataset, tradeoff};
use std::path::PathBuf;
use std::process;

#[derive(Parser)]
#[command(name = "neuroclear", version, about = "learned-clearance motion planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the extended space and label it with the exact oracle
    Collect(CollectArgs),
    /// Fit the clearance regressor on a collected dataset
    Train(TrainArgs),
    /// Score the thresholded classifier on a dataset's eval split
    EvalModel(EvalModelArgs),
    /// Answer a single planning query with the learned planner
    Plan(PlanArgs),
    /// Run the planner comparison over a seeded query stream
    Bench(BenchArgs),
    /// Print the query counts at which training amortizes
    Tradeoff(TradeoffArgs),
}

#[derive(Args)]
struct CollectArgs {
    /// Catalog environment name or environment JSON path
    #[arg(long)]
    env: String,
    #[arg(long)]
    n_train: usize,
    #[arg(long)]
    n_eval: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dataset file to write
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    env: String,
    /// Dataset file from `collect`
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = TrainConfig::default().hidden)]
    hidden: usize,
    #[arg(long, default_value_t = TrainConfig::default().epochs)]
    epochs: usize,
    #[arg(long, default_value_t = TrainConfig::default().lr)]
    lr: f64,
    #[arg(long, default_value_t = TrainConfig::default().batch)]
    batch: usize,
    #[arg(long, default_value_t = TrainConfig::default().dropout)]
    dropout: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Model checkpoint to write
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalModelArgs {
    #[arg(long)]
    env: String,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Clearance threshold the classifier tests against
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    d_star: f64,
}

#[derive(Args)]
struct ClockArgs {
    /// Timing source: wall or iteration
    #[arg(long, default_value = "wall")]
    clock: String,
    /// Seconds charged per tick under the iteration clock
    #[arg(long, default_value_t = 1e-5)]
    tick: f64,
}

impl ClockArgs {
    fn to_clock(&self) -> Result<Clock, String> {
        match self.clock.as_str() {
            "wall" => Ok(Clock::Wall),
            "iteration" => Ok(Clock::Iteration {
                seconds_per_tick: self.tick,
            }),
            other => Err(format!(
                "unknown clock {other:?} (expected wall or iteration)"
            )),
        }
    }
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    env: String,
    #[arg(long)]
    model: PathBuf,
    /// Start robot pose, comma-separated radians
    #[arg(long, allow_hyphen_values = true)]
    start: String,
    /// Goal robot pose, comma-separated radians
    #[arg(long, allow_hyphen_values = true)]
    goal: String,
    /// Workspace coordinates of movable obstacles, comma-separated
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    w: String,
    #[arg(long, default_value_t = neuroclear::planner::DEFAULT_T_MAX)]
    t_max: f64,
    #[arg(long, default_value_t = neuroclear::planner::DEFAULT_N_EXT)]
    n_ext: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Path file to write on success
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    clock: ClockArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    env: String,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 100)]
    queries: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated subset of cnrrt, cnrrt-ng, gjk-rrt
    #[arg(long, default_value = "cnrrt,cnrrt-ng,gjk-rrt")]
    planners: String,
    #[arg(long, default_value_t = neuroclear::planner::DEFAULT_T_MAX)]
    t_max: f64,
    /// Row CSV to write; path files land in a sibling directory
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    clock: ClockArgs,
}

#[derive(Args)]
struct TradeoffArgs {
    /// Scenario CSV; the bundled reference workloads when omitted
    #[arg(long)]
    scenarios: Option<PathBuf>,
    /// Report CSV to write in addition to stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(1);
        }
    }
}

/// Resolve `--env`: an existing file path is loaded, anything else is
/// looked up in the built-in catalog.
fn resolve_env(spec: &str) -> Result<Environment, neuroclear::Error> {
    let path = std::path::Path::new(spec);
    if path.is_file() {
        return load_environment(path);
    }
    catalog::by_name(spec).ok_or_else(|| {
        neuroclear::Error::InvalidConstruction(format!(
            "no environment file or catalog entry {spec:?} (catalog: {})",
            catalog::names().join(", ")
        ))
    })
}

fn parse_floats(what: &str, s: &str) -> Result<Vec<f64>, neuroclear::Error> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|_| {
                neuroclear::Error::InvalidConstruction(format!(
                    "{what}: {tok:?} is not a number"
                ))
            })
        })
        .collect()
}

fn run(cli: Cli) -> Result<i32, neuroclear::Error> {
    match cli.command {
        Command::Collect(args) => {
            let env = resolve_env(&args.env)?;
            let mut rng = Rng::from_seed(args.seed);
            let ds = dataset::collect(&env, args.n_train, args.n_eval, &mut rng)?;
            dataset::save(&ds, &args.out)?;
            let collisions = ds.samples().iter().filter(|s| s.d <= 0.0).count();
            println!(
                "collected {} samples ({} train, {} eval) in {}; collision fraction {:.3}; wrote {}",
                ds.len(),
                args.n_train,
                args.n_eval,
                env.name(),
                collisions as f64 / ds.len() as f64,
                args.out.display()
            );
            Ok(0)
        }
        Command::Train(args) => {
            let env = resolve_env(&args.env)?;
            let ds = dataset::load(&args.data)?;
            let cfg = TrainConfig {
                hidden: args.hidden,
                epochs: args.epochs,
                lr: args.lr,
                batch: args.batch,
                dropout: args.dropout,
                seed: args.seed,
                ..TrainConfig::default()
            };
            let (model, history) = train(&env, &ds, &cfg)?;
            save_model(&args.out, &model)?;
            for (epoch, (tr, ev)) in history
                .train_mse
                .iter()
                .zip(&history.eval_mse)
                .enumerate()
            {
                println!("epoch {} train_mse {tr} eval_mse {ev}", epoch + 1);
            }
            println!("wrote {}", args.out.display());
            Ok(0)
        }
        Command::EvalModel(args) => {
            let env = resolve_env(&args.env)?;
            let ds = dataset::load(&args.data)?;
            let model = load_model(&args.model)?;
            let report = confusion(&model, &env, ds.eval_split(), args.d_star)?;
            println!("{}", ConfusionReport::csv_header());
            println!("{}", report.csv_row());
            Ok(0)
        }
        Command::Plan(args) => {
            let env = resolve_env(&args.env)?;
            let model = load_model(&args.model)?;
            let clock = args
                .clock
                .to_clock()
                .map_err(neuroclear::Error::InvalidConstruction)?;
            let mut query = PlanQuery::new(
                parse_floats("--start", &args.start)?,
                parse_floats("--goal", &args.goal)?,
                parse_floats("--w", &args.w)?,
            );
            query.t_max = args.t_max;
            query.n_ext = args.n_ext;
            query.clock = clock;
            query.check(&env)?;
            // Colliding endpoints are an infeasible query, not a usage
            // error; report them through exit code 2.
            for (what, cfg) in [("start", query.start_config()), ("goal", query.goal_config())] {
                if !env.is_valid(&cfg)? {
                    eprintln!("infeasible: {what} configuration is in collision");
                    return Ok(2);
                }
            }
            let schedule = env.schedule_spec().materialize(args.t_max)?;
            let mut rng = Rng::from_seed(args.seed);
            let result = cnrrt_plan(
                &env,
                &model,
                &query,
                schedule,
                &RepairConfig::default(),
                &mut rng,
            )?;
            let t = &result.telemetry;
            println!(
                "success={} path_steps={} compute_s={} iterations={} geometric_checks={} \
                 heuristic_checks={} shifts_applied={} build_s={} shift_s={} validate_s={} repair_s={}",
                result.success,
                t.path_steps,
                t.compute_s,
                t.iterations,
                t.geometric_checks,
                t.heuristic_checks,
                t.shifts_applied,
                t.build_s,
                t.shift_s,
                t.validate_s,
                t.repair_s
            );
            if !result.success {
                eprintln!("planning failed within t_max={}", args.t_max);
                return Ok(2);
            }
            save_path_file(&args.out, &PathFile::from_path(&result.path))?;
            println!("wrote {}", args.out.display());
            Ok(0)
        }
        Command::Bench(args) => {
            let env = resolve_env(&args.env)?;
            let model = load_model(&args.model)?;
            let clock = args
                .clock
                .to_clock()
                .map_err(neuroclear::Error::InvalidConstruction)?;
            let planners = args
                .planners
                .split(',')
                .map(|tok| tok.trim().parse::<PlannerKind>())
                .collect::<Result<Vec<_>, _>>()?;
            let mut cfg = BenchConfig::new(args.queries, args.seed);
            cfg.t_max = args.t_max;
            cfg.planners = planners;
            cfg.clock = clock;
            let out = run_bench(&env, &model, &cfg)?;
            let text = neuroclear::bench::write_bench_outputs(&args.out, &out)?;
            for line in text.lines().filter(|l| l.starts_with('#')) {
                println!("{line}");
            }
            println!("wrote {}", args.out.display());
            Ok(0)
        }
        Command::Tradeoff(args) => {
            let rows = match &args.scenarios {
                Some(path) => tradeoff::load_scenarios(path)?,
                None => tradeoff::reference_scenarios(),
            };
            let report = tradeoff::reproduce_table(&rows)?;
            print!("{}", tradeoff::format_report(&report));
            if let Some(out) = &args.out {
                tradeoff::write_report(out, &report)?;
            }
            Ok(0)
        }
    }
}
