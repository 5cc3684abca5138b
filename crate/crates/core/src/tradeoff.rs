//! Amortization analysis: how many planning queries justify the one-time
//! cost of collecting a clearance dataset and training the model.
//!
//! Two views of the same question. The factor form prices a query in
//! units of exact collision checks and expresses the learned planner's
//! overheads as dimensionless factors (misclassification penalties,
//! batching speedup, path-length ratio). The measured form starts from
//! benchmarked quantities: dataset size, per-check cost, training time,
//! and the per-query times of the baseline and learned planners. Three
//! deployment stories split the overhead between robot downtime and
//! offline compute: collect online and train offline, do both online, or
//! do both offline.

use crate::error::{Error, Result};
use std::path::Path;

/// Dimensionless description of one deployment, in units of the exact
/// check time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffFactors {
    /// Online (robot-blocking) investment, seconds.
    pub t_invest: f64,
    /// Offline (concurrent) investment, seconds.
    pub t_offline: f64,
    /// Cost of a single exact collision check, seconds.
    pub t_check: f64,
    /// Expected exact checks per baseline query.
    pub n_checks: u64,
    /// Check inflation from false positives (predicted collision on free
    /// points); at least 1.
    pub f_fp: f64,
    /// Check inflation from false negatives (missed collisions that
    /// trigger repair); at least 1.
    pub f_fn: f64,
    /// Expected path length as a fraction of total checks, in (0, 1).
    pub f_pathlen: f64,
    /// Batched model check cost relative to an exact check, in (0, 1).
    pub f_batch: f64,
    /// Training time as a multiple of the exact check time; above 1.
    pub f_train: f64,
}

impl TradeoffFactors {
    /// Deployment that collects data on the robot but trains offline:
    /// downtime is the collection time, training runs concurrently.
    #[allow(clippy::too_many_arguments)]
    pub fn online_collect_offline_train(
        dataset_size: u64,
        f_train: f64,
        t_check: f64,
        n_checks: u64,
        f_fp: f64,
        f_fn: f64,
        f_pathlen: f64,
        f_batch: f64,
    ) -> Self {
        TradeoffFactors {
            t_invest: dataset_size as f64 * t_check,
            t_offline: f_train * t_check,
            t_check,
            n_checks,
            f_fp,
            f_fn,
            f_pathlen,
            f_batch,
            f_train,
        }
    }

    /// Deployment that blocks the robot for both collection and training.
    #[allow(clippy::too_many_arguments)]
    pub fn fully_online(
        dataset_size: u64,
        f_train: f64,
        t_check: f64,
        n_checks: u64,
        f_fp: f64,
        f_fn: f64,
        f_pathlen: f64,
        f_batch: f64,
    ) -> Self {
        TradeoffFactors {
            t_invest: (dataset_size as f64 + f_train) * t_check,
            t_offline: 0.0,
            t_check,
            n_checks,
            f_fp,
            f_fn,
            f_pathlen,
            f_batch,
            f_train,
        }
    }

    fn check(&self) -> Result<()> {
        let nonneg = [
            ("t_invest", self.t_invest),
            ("t_offline", self.t_offline),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidConstruction(format!(
                    "{name} = {v} must be finite and nonnegative"
                )));
            }
        }
        if !(self.t_check > 0.0 && self.t_check.is_finite()) {
            return Err(Error::InvalidConstruction(format!(
                "t_check = {} must be finite and positive",
                self.t_check
            )));
        }
        if self.n_checks == 0 {
            return Err(Error::InvalidConstruction(
                "n_checks must be at least 1".into(),
            ));
        }
        for (name, v) in [("f_fp", self.f_fp), ("f_fn", self.f_fn)] {
            if !(v >= 1.0 && v.is_finite()) {
                return Err(Error::InvalidConstruction(format!(
                    "{name} = {v} must be finite and at least 1"
                )));
            }
        }
        for (name, v) in [("f_pathlen", self.f_pathlen), ("f_batch", self.f_batch)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidConstruction(format!(
                    "{name} = {v} must lie strictly inside (0, 1)"
                )));
            }
        }
        if !(self.f_train > 1.0 && self.f_train.is_finite()) {
            return Err(Error::InvalidConstruction(format!(
                "f_train = {} must be finite and above 1",
                self.f_train
            )));
        }
        Ok(())
    }
}

/// Queries needed to amortize the investment, in factor form. The
/// denominator margin `1 - f_fp*f_batch - f_fn*f_pathlen` is the
/// per-query fraction of baseline check time the learned planner
/// actually saves; when it is not positive the overhead can never be
/// recovered and the margin is reported in the error.
pub fn queries_needed_factors(f: &TradeoffFactors) -> Result<f64> {
    f.check()?;
    let margin = 1.0 - f.f_fp * f.f_batch - f.f_fn * f.f_pathlen;
    if margin <= 0.0 {
        return Err(Error::NeverAmortizes(margin));
    }
    let n = f.n_checks as f64;
    Ok((f.t_invest / f.t_check) / (n * margin) + (f.t_offline / f.t_check) / n)
}

/// Benchmarked quantities for one environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffMeasured {
    /// Wall time spent training, seconds.
    pub t_training: f64,
    /// Number of labeled samples collected.
    pub dataset_size: u64,
    /// Cost of a single exact collision check, seconds.
    pub t_check: f64,
    /// Expected baseline query time, seconds.
    pub t_rrt: f64,
    /// Expected learned-planner query time, seconds.
    pub t_cnrrt: f64,
}

impl TradeoffMeasured {
    /// Per-query saving; negative when the learned planner is slower.
    pub fn delta_t(&self) -> f64 {
        self.t_rrt - self.t_cnrrt
    }

    fn check(&self) -> Result<()> {
        if !(self.t_training >= 0.0 && self.t_training.is_finite()) {
            return Err(Error::InvalidConstruction(format!(
                "t_training = {} must be finite and nonnegative",
                self.t_training
            )));
        }
        for (name, v) in [
            ("t_check", self.t_check),
            ("t_rrt", self.t_rrt),
            ("t_cnrrt", self.t_cnrrt),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConstruction(format!(
                    "{name} = {v} must be finite and positive"
                )));
            }
        }
        Ok(())
    }

    fn checked_delta(&self) -> Result<f64> {
        let dt = self.delta_t();
        if dt == 0.0 {
            return Err(Error::NoTimeSaving(dt));
        }
        Ok(dt)
    }
}

/// Collection blocks the robot, training runs offline: the downtime is
/// amortized against the per-query saving, the training against the
/// baseline query time.
pub fn queries_online_collect_offline_train(m: &TradeoffMeasured) -> Result<f64> {
    m.check()?;
    let dt = m.checked_delta()?;
    Ok(m.dataset_size as f64 * m.t_check / dt + m.t_training / m.t_rrt)
}

/// Both collection and training block the robot; everything is amortized
/// against the per-query saving.
pub fn queries_all_online(m: &TradeoffMeasured) -> Result<f64> {
    m.check()?;
    let dt = m.checked_delta()?;
    Ok((m.dataset_size as f64 * m.t_check + m.t_training) / dt)
}

/// Both collection and training run offline; the overhead only has to
/// beat the baseline query time it displaces.
pub fn queries_all_offline(m: &TradeoffMeasured) -> Result<f64> {
    m.check()?;
    Ok((m.dataset_size as f64 * m.t_check + m.t_training) / m.t_rrt)
}

/// One named workload in a scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRow {
    pub env: String,
    pub measured: TradeoffMeasured,
}

/// Query counts for one workload under the three deployment stories.
/// Raw values are kept unrounded; `no_savings` marks workloads where the
/// learned planner is slower per query, making the first two counts
/// negative and meaningless as break-even points.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub env: String,
    pub n_collect_online: f64,
    pub n_all_online: f64,
    pub n_all_offline: f64,
    pub no_savings: bool,
}

impl ReportRow {
    /// The three counts rounded half away from zero, in deployment
    /// order: collect-online, all-online, all-offline.
    pub fn rounded(&self) -> [i64; 3] {
        [
            self.n_collect_online.round() as i64,
            self.n_all_online.round() as i64,
            self.n_all_offline.round() as i64,
        ]
    }
}

/// Evaluate the three deployment stories for every workload.
pub fn reproduce_table(rows: &[ScenarioRow]) -> Result<Vec<ReportRow>> {
    rows.iter()
        .map(|row| {
            Ok(ReportRow {
                env: row.env.clone(),
                n_collect_online: queries_online_collect_offline_train(&row.measured)?,
                n_all_online: queries_all_online(&row.measured)?,
                n_all_offline: queries_all_offline(&row.measured)?,
                no_savings: row.measured.delta_t() < 0.0,
            })
        })
        .collect()
}

const SCENARIO_HEADER: &str = "env,t_training,dataset_size,t_check,t_rrt,t_cnrrt";
const REPORT_HEADER: &str = "env,n_collect_online,n_all_online,n_all_offline,no_savings";

/// Parse a scenario CSV (header `env,t_training,dataset_size,t_check,\
/// t_rrt,t_cnrrt`).
pub fn load_scenarios(path: impl AsRef<Path>) -> Result<Vec<ScenarioRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == SCENARIO_HEADER => {}
        other => {
            return Err(Error::MalformedFile {
                what: "scenario file",
                line: 1,
                msg: format!(
                    "expected header {SCENARIO_HEADER:?}, got {:?}",
                    other.map(|(_, l)| l).unwrap_or("")
                ),
            });
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let err = |msg: String| Error::MalformedFile {
            what: "scenario file",
            line: i + 1,
            msg,
        };
        if fields.len() != 6 {
            return Err(err(format!("expected 6 fields, got {}", fields.len())));
        }
        if fields[0].is_empty() {
            return Err(err("empty environment name".into()));
        }
        let num = |field: &str, name: &str| -> Result<f64> {
            field
                .parse::<f64>()
                .map_err(|e| err(format!("bad {name} {field:?}: {e}")))
        };
        let dataset_size = fields[2]
            .parse::<u64>()
            .map_err(|e| err(format!("bad dataset_size {:?}: {e}", fields[2])))?;
        let measured = TradeoffMeasured {
            t_training: num(fields[1], "t_training")?,
            dataset_size,
            t_check: num(fields[3], "t_check")?,
            t_rrt: num(fields[4], "t_rrt")?,
            t_cnrrt: num(fields[5], "t_cnrrt")?,
        };
        rows.push(ScenarioRow {
            env: fields[0].to_string(),
            measured,
        });
    }
    if rows.is_empty() {
        return Err(Error::MalformedFile {
            what: "scenario file",
            line: 1,
            msg: "no scenario rows".into(),
        });
    }
    Ok(rows)
}

/// Write workloads in the scenario CSV format read by [`load_scenarios`].
pub fn write_scenarios(path: impl AsRef<Path>, rows: &[ScenarioRow]) -> Result<()> {
    let mut out = String::from(SCENARIO_HEADER);
    out.push('\n');
    for row in rows {
        let m = &row.measured;
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.env, m.t_training, m.dataset_size, m.t_check, m.t_rrt, m.t_cnrrt
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Render a report as CSV with the three rounded query counts per row.
pub fn format_report(rows: &[ReportRow]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for row in rows {
        let [a, b, c] = row.rounded();
        out.push_str(&format!("{},{a},{b},{c},{}\n", row.env, row.no_savings));
    }
    out
}

pub fn write_report(path: impl AsRef<Path>, rows: &[ReportRow]) -> Result<()> {
    std::fs::write(path, format_report(rows))?;
    Ok(())
}

/// The bundled reference workloads: five environments measured with a
/// tuned dataset size, then the same five with a flat one-million-sample
/// dataset (the `-1m` variants).
pub fn reference_scenarios() -> Vec<ScenarioRow> {
    let row = |env: &str, t_training: f64, dataset_size: u64, t_check: f64, t_rrt: f64, t_cnrrt: f64| {
        ScenarioRow {
            env: env.to_string(),
            measured: TradeoffMeasured {
                t_training,
                dataset_size,
                t_check,
                t_rrt,
                t_cnrrt,
            },
        }
    };
    vec![
        row("block", 1500.0, 350_000, 1e-4, 2.70, 2.00),
        row("r2d2", 1800.0, 400_000, 2e-4, 2.80, 1.60),
        row("ducky", 1800.0, 400_000, 2e-4, 4.90, 4.30),
        row("mobile", 1800.0, 500_000, 2e-4, 89.90, 91.70),
        row("fetch", 2400.0, 600_000, 1e-3, 599.20, 417.20),
        row("block-1m", 3600.0, 1_000_000, 1e-4, 2.70, 2.00),
        row("r2d2-1m", 3600.0, 1_000_000, 2e-4, 2.80, 1.60),
        row("ducky-1m", 3600.0, 1_000_000, 2e-4, 4.90, 4.30),
        row("mobile-1m", 3600.0, 1_000_000, 2e-4, 89.90, 91.70),
        row("fetch-1m", 3600.0, 1_000_000, 1e-3, 599.20, 417.20),
    ]
}

/// Expected rounded counts for [`reference_scenarios`], in deployment
/// order per row.
pub fn reference_expected() -> Vec<(&'static str, [i64; 3])> {
    vec![
        ("block", [606, 2193, 569]),
        ("r2d2", [710, 1567, 671]),
        ("ducky", [501, 3133, 384]),
        ("mobile", [-36, -1056, 21]),
        ("fetch", [7, 16, 5]),
        ("block-1m", [1476, 5286, 1370]),
        ("r2d2-1m", [1452, 3167, 1357]),
        ("ducky-1m", [1068, 6333, 776]),
        ("mobile-1m", [-71, -2111, 42]),
        ("fetch-1m", [12, 25, 8]),
    ]
}
