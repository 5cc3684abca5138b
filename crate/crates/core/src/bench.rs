//! Benchmark harness: the same seeded query stream run through each
//! selected planner, with per-run telemetry rows, per-planner summary
//! statistics, and certified path files for every success.
//!
//! Query generation, per-run seeds, and (in iteration-clock mode) the
//! planners themselves are all deterministic functions of the bench
//! seed, so two runs with equal configuration produce byte-identical
//! CSV output.

use crate::classifier::ThresholdSchedule;
use crate::clearancenet::ClearanceModel;
use crate::cspace::{config_distance, derive_seed, Environment, ExtendedConfig, Rng};
use crate::error::{Error, Result};
use crate::planner::{
    cnrrt_ng_plan, cnrrt_plan, gjk_rrt_plan, validate_path, Clock, PlanQuery, PlanResult,
    RepairConfig,
};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Rejection-sampling budget for one query's endpoint draws.
const DRAW_BUDGET: u64 = 100_000;

/// Minimum start-goal separation as a fraction of the joint-space
/// diameter, so benchmark queries are nontrivial.
const MIN_SEPARATION_FRACTION: f64 = 0.25;

/// The planners a bench run can compare. Declaration order is the
/// canonical row order in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlannerKind {
    Cnrrt,
    CnrrtNg,
    GjkRrt,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 3] = [PlannerKind::Cnrrt, PlannerKind::CnrrtNg, PlannerKind::GjkRrt];

    /// Stable identifier used in per-run seed derivation; independent of
    /// which planner subset a bench run selects.
    fn id(self) -> u64 {
        match self {
            PlannerKind::Cnrrt => 0,
            PlannerKind::CnrrtNg => 1,
            PlannerKind::GjkRrt => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Cnrrt => "cnrrt",
            PlannerKind::CnrrtNg => "cnrrt-ng",
            PlannerKind::GjkRrt => "gjk-rrt",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cnrrt" => Ok(PlannerKind::Cnrrt),
            "cnrrt-ng" => Ok(PlannerKind::CnrrtNg),
            "gjk-rrt" => Ok(PlannerKind::GjkRrt),
            other => Err(Error::InvalidConstruction(format!(
                "unknown planner {other:?} (expected cnrrt, cnrrt-ng, or gjk-rrt)"
            ))),
        }
    }
}

/// Knobs of one bench run; search parameters not listed here use the
/// planner defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub n_queries: usize,
    pub seed: u64,
    pub t_max: f64,
    pub planners: Vec<PlannerKind>,
    pub clock: Clock,
}

impl BenchConfig {
    pub fn new(n_queries: usize, seed: u64) -> Self {
        BenchConfig {
            n_queries,
            seed,
            t_max: crate::planner::DEFAULT_T_MAX,
            planners: PlannerKind::ALL.to_vec(),
            clock: Clock::Wall,
        }
    }

    fn check(&self) -> Result<()> {
        if self.n_queries == 0 {
            return Err(Error::InvalidConstruction(
                "bench needs at least one query".into(),
            ));
        }
        if self.planners.is_empty() {
            return Err(Error::InvalidConstruction(
                "bench needs at least one planner".into(),
            ));
        }
        Ok(())
    }
}

/// One generated planning problem: endpoints plus the workspace vector
/// they were validated under.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchQuery {
    pub start: Vec<f64>,
    pub goal: Vec<f64>,
    pub w: Vec<f64>,
}

/// One (planner, query) cell of the run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub env: String,
    pub planner: PlannerKind,
    pub query: usize,
    pub seed: u64,
    pub result: PlanResult,
}

/// Mean and population standard deviation of one telemetry column, with
/// the percent change of the mean against the baseline planner when it
/// ran in the same bench.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSummary {
    pub name: &'static str,
    pub mean: f64,
    pub std: f64,
    pub pct_vs_baseline: Option<f64>,
}

/// Aggregates over one planner's rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerSummary {
    pub planner: PlannerKind,
    pub n: usize,
    pub success_rate: f64,
    pub columns: Vec<ColumnSummary>,
}

/// Everything a bench run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutput {
    pub env: String,
    pub queries: Vec<BenchQuery>,
    pub rows: Vec<BenchRow>,
    pub summaries: Vec<PlannerSummary>,
}

/// On-disk form of a certified path: the workspace vector and the robot
/// pose per waypoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathFile {
    pub workspace: Vec<f64>,
    pub waypoints: Vec<Vec<f64>>,
}

impl PathFile {
    pub fn from_path(path: &[ExtendedConfig]) -> Self {
        PathFile {
            workspace: path
                .first()
                .map(|p| p.workspace().to_vec())
                .unwrap_or_default(),
            waypoints: path.iter().map(|p| p.robot().to_vec()).collect(),
        }
    }

    pub fn to_configs(&self) -> Vec<ExtendedConfig> {
        self.waypoints
            .iter()
            .map(|r| ExtendedConfig::new(r.clone(), self.workspace.clone()))
            .collect()
    }
}

pub fn save_path_file(path: impl AsRef<Path>, file: &PathFile) -> Result<()> {
    let mut text = serde_json::to_string_pretty(file)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_path_file(path: impl AsRef<Path>) -> Result<PathFile> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Rejection-sample `n` valid, well-separated (start, goal) pairs. Each
/// query also draws a workspace vector, fixed for both endpoints. The
/// per-query draw budget guards against unsatisfiable environments.
pub fn generate_queries(env: &Environment, n: usize, rng: &mut Rng) -> Result<Vec<BenchQuery>> {
    let space = env.space();
    let min_dist = MIN_SEPARATION_FRACTION * space.robot_diameter();
    let mut queries = Vec::with_capacity(n);
    for qi in 0..n {
        let w: Vec<f64> = space
            .workspace_bounds()
            .iter()
            .map(|&(lo, hi)| rng.uniform(lo, hi))
            .collect();
        let mut draws: u64 = 0;
        let budget = |draws: &mut u64| -> Result<()> {
            *draws += 1;
            if *draws > DRAW_BUDGET {
                return Err(Error::SamplingExhausted(format!(
                    "no valid start/goal pair for query {qi} in {DRAW_BUDGET} draws"
                )));
            }
            Ok(())
        };
        let start = loop {
            budget(&mut draws)?;
            let cand = space.sample_fixed_w(rng, &w)?;
            if env.is_valid(&cand)? {
                break cand;
            }
        };
        let goal = loop {
            budget(&mut draws)?;
            let cand = space.sample_fixed_w(rng, &w)?;
            if env.is_valid(&cand)? && config_distance(&start, &cand)? >= min_dist {
                break cand;
            }
        };
        queries.push(BenchQuery {
            start: start.robot().to_vec(),
            goal: goal.robot().to_vec(),
            w,
        });
    }
    Ok(queries)
}

/// Run every selected planner over the same seeded query stream.
pub fn run_bench(
    env: &Environment,
    model: &ClearanceModel,
    cfg: &BenchConfig,
) -> Result<BenchOutput> {
    cfg.check()?;
    let mut kinds = cfg.planners.clone();
    kinds.sort();
    kinds.dedup();

    let mut query_rng = Rng::from_seed(derive_seed(cfg.seed, &[0]));
    let queries = generate_queries(env, cfg.n_queries, &mut query_rng)?;

    let mut rows = Vec::with_capacity(kinds.len() * queries.len());
    for &kind in &kinds {
        for (qi, q) in queries.iter().enumerate() {
            let mut query = PlanQuery::new(q.start.clone(), q.goal.clone(), q.w.clone());
            query.t_max = cfg.t_max;
            query.clock = cfg.clock;
            let seed = derive_seed(cfg.seed, &[1 + kind.id(), qi as u64]);
            let mut rng = Rng::from_seed(seed);
            let result = match kind {
                PlannerKind::Cnrrt | PlannerKind::CnrrtNg => {
                    let schedule = schedule_for(env, cfg.t_max)?;
                    let repair_cfg = RepairConfig::default();
                    if kind == PlannerKind::Cnrrt {
                        cnrrt_plan(env, model, &query, schedule, &repair_cfg, &mut rng)?
                    } else {
                        cnrrt_ng_plan(env, model, &query, schedule, &repair_cfg, &mut rng)?
                    }
                }
                PlannerKind::GjkRrt => gjk_rrt_plan(env, &query, &mut rng)?,
            };
            rows.push(BenchRow {
                env: env.name().to_string(),
                planner: kind,
                query: qi,
                seed,
                result,
            });
        }
    }

    let summaries = summarize(&kinds, &rows);
    Ok(BenchOutput {
        env: env.name().to_string(),
        queries,
        rows,
        summaries,
    })
}

fn schedule_for(env: &Environment, t_max: f64) -> Result<ThresholdSchedule> {
    env.schedule_spec().materialize(t_max)
}

/// Telemetry columns reported per row and aggregated in the summary, in
/// CSV order.
const COLUMNS: [&str; 8] = [
    "compute_s",
    "path_steps",
    "geometric_checks",
    "heuristic_checks",
    "build_s",
    "shift_s",
    "validate_s",
    "repair_s",
];

fn column_value(row: &BenchRow, name: &str) -> f64 {
    let t = &row.result.telemetry;
    match name {
        "compute_s" => t.compute_s,
        "path_steps" => t.path_steps as f64,
        "geometric_checks" => t.geometric_checks as f64,
        "heuristic_checks" => t.heuristic_checks as f64,
        "build_s" => t.build_s,
        "shift_s" => t.shift_s,
        "validate_s" => t.validate_s,
        "repair_s" => t.repair_s,
        other => unreachable!("unknown column {other}"),
    }
}

fn summarize(kinds: &[PlannerKind], rows: &[BenchRow]) -> Vec<PlannerSummary> {
    let stats = |kind: PlannerKind, name: &str| -> (f64, f64) {
        let values: Vec<f64> = rows
            .iter()
            .filter(|r| r.planner == kind)
            .map(|r| column_value(r, name))
            .collect();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        (mean, var.sqrt())
    };
    let baseline_ran = kinds.contains(&PlannerKind::GjkRrt);
    kinds
        .iter()
        .map(|&kind| {
            let mine: Vec<&BenchRow> = rows.iter().filter(|r| r.planner == kind).collect();
            let n = mine.len();
            let successes = mine.iter().filter(|r| r.result.success).count();
            let columns = COLUMNS
                .iter()
                .map(|&name| {
                    let (mean, std) = stats(kind, name);
                    let pct_vs_baseline = if baseline_ran && kind != PlannerKind::GjkRrt {
                        let (base_mean, _) = stats(PlannerKind::GjkRrt, name);
                        (base_mean != 0.0).then(|| 100.0 * (mean - base_mean) / base_mean)
                    } else {
                        None
                    };
                    ColumnSummary {
                        name,
                        mean,
                        std,
                        pct_vs_baseline,
                    }
                })
                .collect();
            PlannerSummary {
                planner: kind,
                n,
                success_rate: successes as f64 / n as f64,
                columns,
            }
        })
        .collect()
}

/// Name of the sibling directory holding the certified path files for a
/// bench CSV at `csv_path`.
fn paths_dir_name(csv_path: &Path) -> String {
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "bench".to_string());
    format!("{stem}.paths")
}

/// Write the row CSV (with a trailing summary block) and one certified
/// path file per success row. Returns the CSV text that was written.
pub fn write_bench_outputs(csv_path: impl AsRef<Path>, out: &BenchOutput) -> Result<String> {
    let csv_path = csv_path.as_ref();
    let dir_name = paths_dir_name(csv_path);
    let parent = csv_path.parent().map(PathBuf::from).unwrap_or_default();
    let paths_dir = parent.join(&dir_name);
    if out.rows.iter().any(|r| r.result.success) {
        std::fs::create_dir_all(&paths_dir)?;
    }

    let mut text = String::new();
    text.push_str("env,planner,query,seed,success,");
    text.push_str(&COLUMNS.join(","));
    text.push_str(",path_file\n");
    for row in &out.rows {
        let path_file = if row.result.success {
            let file_name = format!("{}-q{}.json", row.planner, row.query);
            save_path_file(
                paths_dir.join(&file_name),
                &PathFile::from_path(&row.result.path),
            )?;
            format!("{dir_name}/{file_name}")
        } else {
            String::new()
        };
        text.push_str(&format!(
            "{},{},{},{},{}",
            row.env, row.planner, row.query, row.seed, row.result.success
        ));
        for name in COLUMNS {
            text.push_str(&format!(",{}", column_value(row, name)));
        }
        text.push_str(&format!(",{path_file}\n"));
    }
    for s in &out.summaries {
        text.push_str(&format!(
            "# summary,planner={},n={},success_rate={}\n",
            s.planner, s.n, s.success_rate
        ));
        for c in &s.columns {
            let pct = c
                .pct_vs_baseline
                .map(|p| format!("{p}"))
                .unwrap_or_else(|| "-".to_string());
            text.push_str(&format!(
                "# summary,planner={},column={},mean={},std={},pct_vs_gjk-rrt={}\n",
                s.planner, c.name, c.mean, c.std, pct
            ));
        }
    }
    std::fs::write(csv_path, &text)?;
    Ok(text)
}

/// Re-validate every success row's path file against the exact oracle,
/// as loaded from disk. Returns the number of paths checked.
pub fn revalidate_paths(
    env: &Environment,
    csv_path: impl AsRef<Path>,
    out: &BenchOutput,
    step: f64,
) -> Result<usize> {
    let csv_path = csv_path.as_ref();
    let parent = csv_path.parent().map(PathBuf::from).unwrap_or_default();
    let dir = parent.join(paths_dir_name(csv_path));
    let mut checked = 0;
    for row in &out.rows {
        if !row.result.success {
            continue;
        }
        let file = dir.join(format!("{}-q{}.json", row.planner, row.query));
        let loaded = load_path_file(&file)?;
        let configs = loaded.to_configs();
        let (valid, first_bad) = validate_path(env, &configs, step)?;
        if !valid {
            return Err(Error::InvalidQuery(format!(
                "stored path {} fails oracle validation at densified index {:?}",
                file.display(),
                first_bad
            )));
        }
        checked += 1;
    }
    Ok(checked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cspace::{by_name, ExtendedConfigSpace};
    use crate::geometry::{ConvexObstacle, KinematicChain, Vec2};
    use crate::planner::test_models::constant_model;

    fn iteration_cfg(n_queries: usize, seed: u64, t_max: f64) -> BenchConfig {
        let mut cfg = BenchConfig::new(n_queries, seed);
        cfg.t_max = t_max;
        cfg.clock = Clock::Iteration {
            seconds_per_tick: 1e-5,
        };
        cfg
    }

    #[test]
    fn planner_kind_parses_its_own_names() {
        for kind in PlannerKind::ALL {
            assert_eq!(kind.name().parse::<PlannerKind>().unwrap(), kind);
        }
        assert!("rrt*".parse::<PlannerKind>().is_err());
    }

    #[test]
    fn generated_queries_are_valid_separated_and_seeded() {
        let env = by_name("narrow-gap").unwrap();
        let min_dist = 0.25 * env.space().robot_diameter();
        let mut rng = Rng::from_seed(41);
        let queries = generate_queries(&env, 20, &mut rng).unwrap();
        assert_eq!(queries.len(), 20);
        for q in &queries {
            let start = ExtendedConfig::new(q.start.clone(), q.w.clone());
            let goal = ExtendedConfig::new(q.goal.clone(), q.w.clone());
            assert!(env.is_valid(&start).unwrap());
            assert!(env.is_valid(&goal).unwrap());
            assert!(config_distance(&start, &goal).unwrap() >= min_dist);
        }

        let mut rng_again = Rng::from_seed(41);
        assert_eq!(generate_queries(&env, 20, &mut rng_again).unwrap(), queries);
        let mut rng_other = Rng::from_seed(42);
        assert_ne!(generate_queries(&env, 20, &mut rng_other).unwrap(), queries);
    }

    #[test]
    fn fully_blocked_environment_exhausts_the_draw_budget() {
        let chain =
            KinematicChain::new(Vec2::new(0.0, 0.0), vec![1.0], 0.05, vec![(-3.0, 3.0)], 8)
                .unwrap();
        let space = ExtendedConfigSpace::new(chain.joint_limits().to_vec(), vec![]).unwrap();
        let wall = ConvexObstacle::rect(Vec2::new(-2.0, -2.0), Vec2::new(2.0, 2.0)).unwrap();
        let env =
            Environment::new("blocked", chain, vec![wall], vec![], space, 0.5, None).unwrap();
        let mut rng = Rng::from_seed(43);
        assert!(matches!(
            generate_queries(&env, 1, &mut rng),
            Err(Error::SamplingExhausted(_))
        ));
    }

    #[test]
    fn one_dof_open_world_rows_agree_across_planners() {
        let chain =
            KinematicChain::new(Vec2::new(0.0, 0.0), vec![1.0], 0.05, vec![(-3.0, 3.0)], 8)
                .unwrap();
        let space = ExtendedConfigSpace::new(chain.joint_limits().to_vec(), vec![]).unwrap();
        let env = Environment::new("open", chain, vec![], vec![], space, 0.5, None).unwrap();
        let model = constant_model("open", 1, 0.4);
        let cfg = iteration_cfg(1, 44, 5.0);
        let out = run_bench(&env, &model, &cfg).unwrap();
        assert_eq!(out.rows.len(), 3);
        assert!(out.rows.iter().all(|r| r.result.success));
        let steps: Vec<usize> = out
            .rows
            .iter()
            .map(|r| r.result.telemetry.path_steps)
            .collect();
        for w in steps.windows(2) {
            assert!(
                w[0].abs_diff(w[1]) <= 1,
                "path steps diverge: {steps:?}"
            );
        }
        for s in &out.summaries {
            assert_eq!(s.n, 1);
            assert_eq!(s.success_rate, 1.0);
        }
    }

    #[test]
    fn rows_are_ordered_planner_major_and_seeds_ignore_the_subset() {
        let env = by_name("narrow-gap").unwrap();
        let model = constant_model("narrow-gap", 3, 0.4);
        let mut cfg = iteration_cfg(3, 45, 0.5);
        cfg.planners = vec![PlannerKind::GjkRrt, PlannerKind::Cnrrt, PlannerKind::GjkRrt];
        let out = run_bench(&env, &model, &cfg).unwrap();
        let order: Vec<(PlannerKind, usize)> =
            out.rows.iter().map(|r| (r.planner, r.query)).collect();
        let mut sorted = order.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(order, sorted);
        assert_eq!(out.rows.len(), 6);

        // The cnrrt rows must be what a cnrrt-only bench produces.
        let mut solo = cfg.clone();
        solo.planners = vec![PlannerKind::Cnrrt];
        let solo_out = run_bench(&env, &model, &solo).unwrap();
        let joint_cnrrt: Vec<&BenchRow> = out
            .rows
            .iter()
            .filter(|r| r.planner == PlannerKind::Cnrrt)
            .collect();
        for (a, b) in joint_cnrrt.iter().zip(&solo_out.rows) {
            assert_eq!(**a, *b);
        }
    }

    #[test]
    fn csv_is_bit_identical_for_equal_seeds_and_paths_revalidate() {
        let env = by_name("narrow-gap").unwrap();
        let model = constant_model("narrow-gap", 3, 0.4);
        let cfg = iteration_cfg(4, 46, 1.0);
        // Same file name in two directories: path_file columns must match
        // byte for byte because they are relative to the CSV.
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();

        let out_a = run_bench(&env, &model, &cfg).unwrap();
        let csv_a = write_bench_outputs(dir_a.path().join("rows.csv"), &out_a).unwrap();
        let out_b = run_bench(&env, &model, &cfg).unwrap();
        let csv_b = write_bench_outputs(dir_b.path().join("rows.csv"), &out_b).unwrap();
        assert_eq!(csv_a, csv_b);
        assert_eq!(
            std::fs::read(dir_a.path().join("rows.csv")).unwrap(),
            std::fs::read(dir_b.path().join("rows.csv")).unwrap()
        );

        let successes = out_a.rows.iter().filter(|r| r.result.success).count();
        let checked =
            revalidate_paths(&env, dir_a.path().join("rows.csv"), &out_a, 0.05).unwrap();
        assert_eq!(checked, successes);
        assert!(checked > 0);

        // Summary success rate is exactly the row-level mean.
        for s in &out_a.summaries {
            let mine: Vec<&BenchRow> = out_a
                .rows
                .iter()
                .filter(|r| r.planner == s.planner)
                .collect();
            let successes = mine.iter().filter(|r| r.result.success).count();
            assert_eq!(s.success_rate, successes as f64 / mine.len() as f64);
        }
    }

    #[test]
    fn summary_reports_percent_deltas_against_the_baseline() {
        let env = by_name("narrow-gap").unwrap();
        let model = constant_model("narrow-gap", 3, 0.4);
        let cfg = iteration_cfg(2, 47, 0.5);
        let out = run_bench(&env, &model, &cfg).unwrap();
        for s in &out.summaries {
            for c in &s.columns {
                if s.planner == PlannerKind::GjkRrt {
                    assert!(c.pct_vs_baseline.is_none());
                } else if c.mean != 0.0 {
                    // A nonzero column of a non-baseline planner carries a
                    // delta whenever the baseline column is nonzero too.
                    let base = out
                        .summaries
                        .iter()
                        .find(|x| x.planner == PlannerKind::GjkRrt)
                        .unwrap()
                        .columns
                        .iter()
                        .find(|x| x.name == c.name)
                        .unwrap();
                    assert_eq!(c.pct_vs_baseline.is_some(), base.mean != 0.0);
                }
            }
        }
    }
}
