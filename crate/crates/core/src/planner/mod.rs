//! The planning core.
//!
//! Three planners share one telemetry and budget substrate:
//!
//! * [`cnrrt_plan`]: grows a tree with batched model screening. Each
//!   iteration samples many targets at once, discretizes every candidate
//!   edge without touching the exact oracle, scores all edge points in a
//!   single batched model call, truncates each edge at the first point
//!   predicted below the current clearance threshold, and keeps a few
//!   surviving points. The proposal (or, on timeout, the raw two-point
//!   straight path) always goes through [`repair`], so a `success` result
//!   is certified by the exact oracle, never by the model.
//! * [`cnrrt_ng_plan`]: the ablation without gradient shifting; repair
//!   jumps straight from validation to the exact-check fallback.
//! * [`gjk_rrt_plan`]: the oracle-only baseline RRT that checks every
//!   edge point geometrically.
//!
//! Budgets and phase timings run on a [`Clock`]: wall time for production
//! planning, or a deterministic logical clock where elapsed time is a
//! count of primitive operations, which makes whole planner runs
//! reproducible bit for bit.

mod baseline;
mod cnrrt;
mod repair;
#[cfg(test)]
pub(crate) mod test_models;

pub use baseline::gjk_rrt_plan;
pub use cnrrt::{cnrrt_ng_plan, cnrrt_plan};
pub use repair::{fastron_repair_step, repair, RepairOpts, RepairOutcome};

use crate::clearancenet::{ClearanceModel, DataBatch};
use crate::cspace::{config_distance, interpolate, Environment, ExtendedConfig, Rng};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// A sequence of configurations sharing one workspace vector.
pub type Path = Vec<ExtendedConfig>;

pub const DEFAULT_STEP: f64 = 0.05;
pub const DEFAULT_GOAL_BIAS: f64 = 0.05;
pub const DEFAULT_K_ADD: usize = 3;
pub const DEFAULT_N_EXT: usize = 32;
pub const DEFAULT_T_MAX: f64 = 5.0;

/// Time source for planner budgets and telemetry.
///
/// `Wall` reads the monotonic clock. `Iteration` is a deterministic
/// logical clock: the planner charges one tick per primitive operation
/// (an exact clearance evaluation, one predicted-clearance row, one loop
/// iteration; a model gradient costs two) and elapsed time is
/// `ticks * seconds_per_tick`. A budget of `t_max` seconds therefore
/// becomes a budget of `t_max / seconds_per_tick` primitive operations,
/// and every time-driven decision becomes a pure function of the inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Clock {
    Wall,
    Iteration { seconds_per_tick: f64 },
}

impl Default for Clock {
    fn default() -> Self {
        Clock::Wall
    }
}

/// Per-run counters and phase timings.
///
/// `geometric_checks` counts every exact oracle evaluation anywhere in
/// the run; `repair_geometric_checks` counts the subset spent in the
/// exact-check fallback, so a zero there means the fallback never ran.
/// `heuristic_checks` counts model evaluations: one per predicted row,
/// one per gradient call. `path_steps` is the number of segments in the
/// returned (densified) path.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Telemetry {
    pub iterations: u64,
    pub geometric_checks: u64,
    pub heuristic_checks: u64,
    pub repair_geometric_checks: u64,
    pub shifts_applied: u64,
    pub path_steps: usize,
    pub compute_s: f64,
    pub build_s: f64,
    pub shift_s: f64,
    pub validate_s: f64,
    pub repair_s: f64,
}

/// Outcome of a planning run. `success` implies the path was certified
/// point by point by the exact oracle at the query's resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub success: bool,
    pub path: Path,
    pub telemetry: Telemetry,
}

/// One planning problem: robot start and goal poses in the workspace
/// slice fixed by `w`, plus the search knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanQuery {
    pub start: Vec<f64>,
    pub goal: Vec<f64>,
    pub w: Vec<f64>,
    pub t_max: f64,
    pub n_ext: usize,
    pub step: f64,
    pub goal_bias: f64,
    pub k_add: usize,
    pub clock: Clock,
}

impl PlanQuery {
    pub fn new(start: Vec<f64>, goal: Vec<f64>, w: Vec<f64>) -> Self {
        PlanQuery {
            start,
            goal,
            w,
            t_max: DEFAULT_T_MAX,
            n_ext: DEFAULT_N_EXT,
            step: DEFAULT_STEP,
            goal_bias: DEFAULT_GOAL_BIAS,
            k_add: DEFAULT_K_ADD,
            clock: Clock::default(),
        }
    }

    pub fn start_config(&self) -> ExtendedConfig {
        ExtendedConfig::new(self.start.clone(), self.w.clone())
    }

    pub fn goal_config(&self) -> ExtendedConfig {
        ExtendedConfig::new(self.goal.clone(), self.w.clone())
    }

    /// Shape and bounds admission; oracle validity of the endpoints is
    /// checked by the planners so the checks are counted.
    pub fn check(&self, env: &Environment) -> Result<()> {
        let d_r = env.d_r();
        if self.start.len() != d_r {
            return Err(Error::DimensionMismatch {
                context: "query start pose",
                expected: d_r,
                actual: self.start.len(),
            });
        }
        if self.goal.len() != d_r {
            return Err(Error::DimensionMismatch {
                context: "query goal pose",
                expected: d_r,
                actual: self.goal.len(),
            });
        }
        if self.w.len() != env.d_w() {
            return Err(Error::DimensionMismatch {
                context: "query workspace vector",
                expected: env.d_w(),
                actual: self.w.len(),
            });
        }
        for (name, pose) in [("start", &self.start), ("goal", &self.goal)] {
            for (j, (&v, &(lo, hi))) in
                pose.iter().zip(env.chain().joint_limits()).enumerate()
            {
                if !(lo..=hi).contains(&v) {
                    return Err(Error::InvalidQuery(format!(
                        "{name} joint {j} = {v} outside limits [{lo}, {hi}]"
                    )));
                }
            }
        }
        for (k, (&v, &(lo, hi))) in self
            .w
            .iter()
            .zip(env.space().workspace_bounds())
            .enumerate()
        {
            if !(lo..=hi).contains(&v) {
                return Err(Error::InvalidQuery(format!(
                    "workspace coordinate {k} = {v} outside bounds [{lo}, {hi}]"
                )));
            }
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidQuery(format!(
                "t_max {} must be positive and finite",
                self.t_max
            )));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidQuery(format!(
                "step {} must be positive and finite",
                self.step
            )));
        }
        if !(0.0..=1.0).contains(&self.goal_bias) {
            return Err(Error::InvalidQuery(format!(
                "goal_bias {} must lie in [0, 1]",
                self.goal_bias
            )));
        }
        if self.n_ext == 0 {
            return Err(Error::InvalidQuery("n_ext must be at least 1".into()));
        }
        if self.k_add == 0 {
            return Err(Error::InvalidQuery("k_add must be at least 1".into()));
        }
        if let Clock::Iteration { seconds_per_tick } = self.clock {
            if !(seconds_per_tick > 0.0 && seconds_per_tick.is_finite()) {
                return Err(Error::InvalidQuery(format!(
                    "seconds_per_tick {seconds_per_tick} must be positive and finite"
                )));
            }
        }
        Ok(())
    }
}

/// Knobs of the gradient repair walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepairConfig {
    pub alpha: f64,
    pub n_ex: u64,
    pub max_shifts: u64,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            alpha: 0.05,
            n_ex: 3,
            max_shifts: 200,
        }
    }
}

impl RepairConfig {
    pub(crate) fn check(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConstruction(format!(
                "repair alpha {} must be positive and finite",
                self.alpha
            )));
        }
        if self.max_shifts == 0 {
            return Err(Error::InvalidConstruction(
                "repair max_shifts must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Whether repair runs the gradient-shift phase or goes straight from
/// validation to the exact-check fallback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepairMode {
    GradientShift,
    ValidateOnly,
}

/// Search tree over one workspace slice. The root is index 0 and every
/// other node's parent index is strictly smaller than its own.
#[derive(Debug, Clone)]
pub struct Tree {
    nodes: Vec<ExtendedConfig>,
    parents: Vec<usize>,
}

impl Tree {
    pub fn new(root: ExtendedConfig) -> Self {
        Tree {
            nodes: vec![root],
            parents: vec![0],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, i: usize) -> &ExtendedConfig {
        &self.nodes[i]
    }

    pub fn parent(&self, i: usize) -> usize {
        self.parents[i]
    }

    pub fn add(&mut self, parent: usize, cfg: ExtendedConfig) -> usize {
        assert!(parent < self.nodes.len(), "parent index out of range");
        self.nodes.push(cfg);
        self.parents.push(parent);
        self.nodes.len() - 1
    }

    /// Waypoints from the root to node `i`, root first.
    pub fn path_to(&self, i: usize) -> Path {
        assert!(i < self.nodes.len(), "node index out of range");
        let mut indices = vec![i];
        let mut cur = i;
        while cur != 0 {
            cur = self.parents[cur];
            indices.push(cur);
        }
        indices.reverse();
        indices.into_iter().map(|k| self.nodes[k].clone()).collect()
    }
}

/// Index of the tree node closest to `target` in the robot-pose metric;
/// ties go to the lowest index.
pub fn nearest_neighbor(tree: &Tree, target: &ExtendedConfig) -> Result<usize> {
    let mut best = 0;
    let mut best_d = config_distance(tree.node(0), target)?;
    for i in 1..tree.len() {
        let d = config_distance(tree.node(i), target)?;
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    Ok(best)
}

/// Move a point along the model gradient component orthogonal to the
/// local path direction:
///
/// `q = g - ((g . dp) / |dp|^2) dp`, `p' = p + alpha q`,
///
/// where `g` is the robot-pose block of the model's input gradient and
/// `dp` is the robot-pose block of `p_next - p_prev`. A zero path vector
/// degenerates to `q = g`. Only robot coordinates move, and the result
/// is clamped to the joint limits.
/// Component of `g` orthogonal to `dp`, the shift direction that moves
/// a waypoint without sliding it along its local path tangent. A zero
/// `dp` leaves `g` untouched.
pub fn project_orthogonal(g: &[f64], dp: &[f64]) -> Vec<f64> {
    let dp_sq: f64 = dp.iter().map(|v| v * v).sum();
    if dp_sq == 0.0 {
        return g.to_vec();
    }
    let coef = g.iter().zip(dp).map(|(a, b)| a * b).sum::<f64>() / dp_sq;
    g.iter().zip(dp).map(|(a, b)| a - coef * b).collect()
}

pub fn gradient_shift(
    model: &ClearanceModel,
    p: &ExtendedConfig,
    p_prev: &ExtendedConfig,
    p_next: &ExtendedConfig,
    alpha: f64,
    joint_limits: &[(f64, f64)],
) -> Result<ExtendedConfig> {
    let d_r = p.robot().len();
    if p_prev.robot().len() != d_r || p_next.robot().len() != d_r {
        return Err(Error::DimensionMismatch {
            context: "gradient shift neighbors",
            expected: d_r,
            actual: p_prev.robot().len().min(p_next.robot().len()),
        });
    }
    if joint_limits.len() != d_r {
        return Err(Error::DimensionMismatch {
            context: "gradient shift joint limits",
            expected: d_r,
            actual: joint_limits.len(),
        });
    }
    let full = model.input_gradient(p)?;
    let g = &full[..d_r];
    let dp: Vec<f64> = p_next
        .robot()
        .iter()
        .zip(p_prev.robot())
        .map(|(n, v)| n - v)
        .collect();
    let q = project_orthogonal(g, &dp);
    let robot: Vec<f64> = p
        .robot()
        .iter()
        .zip(&q)
        .zip(joint_limits)
        .map(|((v, qk), &(lo, hi))| (v + alpha * qk).clamp(lo, hi))
        .collect();
    Ok(ExtendedConfig::new(robot, p.workspace().to_vec()))
}

/// Expand a waypoint sequence so consecutive points are at most `step`
/// apart; both original endpoints of every segment are kept.
pub fn densify_path(path: &[ExtendedConfig], step: f64) -> Result<Path> {
    let Some(first) = path.first() else {
        return Ok(Vec::new());
    };
    let mut out = vec![first.clone()];
    for pair in path.windows(2) {
        let seg = interpolate(&pair[0], &pair[1], step)?;
        out.extend_from_slice(&seg[1..]);
    }
    Ok(out)
}

/// Exact-oracle check of a whole path densified at `step`. Returns the
/// index of the first invalid point in the densified sequence, if any.
pub fn validate_path(
    env: &Environment,
    path: &[ExtendedConfig],
    step: f64,
) -> Result<(bool, Option<usize>)> {
    let dense = densify_path(path, step)?;
    for (i, p) in dense.iter().enumerate() {
        if !env.is_valid(p)? {
            return Ok((false, Some(i)));
        }
    }
    Ok((true, None))
}

pub(crate) fn check_model(env: &Environment, model: &ClearanceModel) -> Result<()> {
    if model.d_e() != env.d_e() {
        return Err(Error::DimensionMismatch {
            context: "model input dimension",
            expected: env.d_e(),
            actual: model.d_e(),
        });
    }
    if model.env_name() != env.name() {
        return Err(Error::InvalidConstruction(format!(
            "model was trained for {:?}, not {:?}",
            model.env_name(),
            env.name()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Phase {
    Build = 0,
    Shift = 1,
    Validate = 2,
    Repair = 3,
}

/// Phase-attributed stopwatch over either clock mode.
pub(crate) struct Meter {
    clock: Clock,
    run_start: Instant,
    ticks: u64,
    phase: Phase,
    phase_wall: Instant,
    phase_ticks: u64,
    acc: [f64; 4],
}

impl Meter {
    pub(crate) fn new(clock: Clock) -> Self {
        let now = Instant::now();
        Meter {
            clock,
            run_start: now,
            ticks: 0,
            phase: Phase::Build,
            phase_wall: now,
            phase_ticks: 0,
            acc: [0.0; 4],
        }
    }

    fn flush(&mut self) {
        let add = match self.clock {
            Clock::Wall => {
                let now = Instant::now();
                let dt = now.duration_since(self.phase_wall).as_secs_f64();
                self.phase_wall = now;
                dt
            }
            Clock::Iteration { seconds_per_tick } => {
                let dt = (self.ticks - self.phase_ticks) as f64 * seconds_per_tick;
                self.phase_ticks = self.ticks;
                dt
            }
        };
        self.acc[self.phase as usize] += add;
    }

    pub(crate) fn enter(&mut self, phase: Phase) {
        self.flush();
        self.phase = phase;
    }

    pub(crate) fn phase(&self) -> Phase {
        self.phase
    }

    pub(crate) fn tick(&mut self, n: u64) {
        self.ticks += n;
    }

    pub(crate) fn elapsed_s(&self) -> f64 {
        match self.clock {
            Clock::Wall => self.run_start.elapsed().as_secs_f64(),
            Clock::Iteration { seconds_per_tick } => self.ticks as f64 * seconds_per_tick,
        }
    }

    fn write_into(mut self, tel: &mut Telemetry) {
        self.flush();
        tel.compute_s = match self.clock {
            Clock::Wall => self.run_start.elapsed().as_secs_f64(),
            Clock::Iteration { seconds_per_tick } => self.ticks as f64 * seconds_per_tick,
        };
        tel.build_s = self.acc[Phase::Build as usize];
        tel.shift_s = self.acc[Phase::Shift as usize];
        tel.validate_s = self.acc[Phase::Validate as usize];
        tel.repair_s = self.acc[Phase::Repair as usize];
    }
}

/// Shared run state: environment, counters, budget clock, and the seeded
/// stream. Every oracle and model call goes through here so telemetry
/// and logical time stay consistent across planners.
pub(crate) struct Ctx<'a> {
    pub(crate) env: &'a Environment,
    pub(crate) meter: Meter,
    pub(crate) tel: Telemetry,
    pub(crate) rng: &'a mut Rng,
}

impl<'a> Ctx<'a> {
    pub(crate) fn new(env: &'a Environment, clock: Clock, rng: &'a mut Rng) -> Self {
        Ctx {
            env,
            meter: Meter::new(clock),
            tel: Telemetry::default(),
            rng,
        }
    }

    pub(crate) fn oracle_valid(&mut self, cfg: &ExtendedConfig) -> Result<bool> {
        self.meter.tick(1);
        self.tel.geometric_checks += 1;
        if self.meter.phase() == Phase::Repair {
            self.tel.repair_geometric_checks += 1;
        }
        self.env.is_valid(cfg)
    }

    pub(crate) fn predict_batch(
        &mut self,
        model: &ClearanceModel,
        batch: &DataBatch,
    ) -> Result<Vec<f64>> {
        let n = batch.n() as u64;
        self.meter.tick(n);
        self.tel.heuristic_checks += n;
        model.forward_batch(batch)
    }

    pub(crate) fn finish(self) -> Telemetry {
        let Ctx { meter, mut tel, .. } = self;
        meter.write_into(&mut tel);
        tel
    }
}
