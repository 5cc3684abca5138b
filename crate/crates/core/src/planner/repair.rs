//! Path validation and repair.
//!
//! The walk validates every densified point with the exact oracle. An
//! invalid point is pushed along the model gradient component orthogonal
//! to the local path direction until it clears (plus a few extra safety
//! steps), then reconnected to its neighbors with fresh interpolation
//! points that the walk re-validates. All shifting draws on one global
//! budget; when it runs out, the candidate is abandoned and a direct
//! RRT from start to goal runs with one fresh time window of its own,
//! so the planner inherits the baseline's completeness no matter how
//! bad the candidate was. The standalone excise-and-bridge repair that
//! mends a path in place instead of replanning it lives in
//! [`fastron_repair_step`].

use super::baseline::grow_rrt;
use super::{
    densify_path, gradient_shift, Clock, Ctx, Path, Phase, RepairConfig, RepairMode,
    Telemetry, DEFAULT_GOAL_BIAS, DEFAULT_STEP, DEFAULT_T_MAX,
};
use crate::clearancenet::ClearanceModel;
use crate::cspace::{interpolate, Environment, ExtendedConfig, Rng};
use crate::error::{Error, Result};

/// Context knobs for a standalone repair call; planners pass their own
/// query values instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepairOpts {
    pub step: f64,
    pub t_max: f64,
    pub goal_bias: f64,
    pub clock: Clock,
    pub mode: RepairMode,
}

impl Default for RepairOpts {
    fn default() -> Self {
        RepairOpts {
            step: DEFAULT_STEP,
            t_max: DEFAULT_T_MAX,
            goal_bias: DEFAULT_GOAL_BIAS,
            clock: Clock::Wall,
            mode: RepairMode::GradientShift,
        }
    }
}

/// Result of a standalone repair call.
#[derive(Debug, Clone, PartialEq)]
pub struct RepairOutcome {
    pub success: bool,
    pub path: Path,
    pub telemetry: Telemetry,
}

/// Certify (and if necessary mend) a proposed path. On success every
/// point of the returned path passed the exact oracle during this call.
pub fn repair(
    env: &Environment,
    model: &ClearanceModel,
    path: &[ExtendedConfig],
    cfg: &RepairConfig,
    opts: &RepairOpts,
    rng: &mut Rng,
) -> Result<RepairOutcome> {
    cfg.check()?;
    super::check_model(env, model)?;
    let (Some(first), Some(last)) = (path.first(), path.last()) else {
        return Err(Error::InvalidQuery("repair needs a non-empty path".into()));
    };
    let mut ctx = Ctx::new(env, opts.clock, rng);
    ctx.meter.enter(Phase::Validate);
    if !ctx.oracle_valid(first)? || !ctx.oracle_valid(last)? {
        return Err(Error::InvalidQuery(
            "repair endpoints must be collision free".into(),
        ));
    }
    let (success, repaired) = run(
        &mut ctx,
        model,
        path.to_vec(),
        cfg,
        opts.step,
        opts.t_max,
        opts.goal_bias,
        opts.mode,
    )?;
    let mut telemetry = ctx.finish();
    telemetry.path_steps = repaired.len().saturating_sub(1);
    Ok(RepairOutcome {
        success,
        path: repaired,
        telemetry,
    })
}

/// The shared repair engine. Endpoints of `proposal` must already be
/// known valid. Telemetry and budget accrue on the caller's context.
#[allow(clippy::too_many_arguments)]
pub(crate) fn run(
    ctx: &mut Ctx,
    model: &ClearanceModel,
    proposal: Path,
    cfg: &RepairConfig,
    step: f64,
    t_max: f64,
    goal_bias: f64,
    mode: RepairMode,
) -> Result<(bool, Path)> {
    ctx.meter.enter(Phase::Validate);
    let mut path = densify_path(&proposal, step)?;
    let limits = ctx.env.chain().joint_limits().to_vec();
    let mut n_shifts: u64 = 0;
    let mut i = 0usize;
    // First position that could not be certified, if the walk fails.
    let mut stuck: Option<usize> = None;
    while i < path.len() {
        if ctx.oracle_valid(&path[i])? {
            i += 1;
            continue;
        }
        if mode == RepairMode::ValidateOnly
            || n_shifts >= cfg.max_shifts
            || i == 0
            || i + 1 == path.len()
        {
            stuck = Some(i);
            break;
        }
        ctx.meter.enter(Phase::Shift);
        let mut point = path[i].clone();
        let mut cleared = false;
        while n_shifts < cfg.max_shifts {
            point = gradient_shift(model, &point, &path[i - 1], &path[i + 1], cfg.alpha, &limits)?;
            ctx.meter.tick(2);
            ctx.tel.heuristic_checks += 1;
            ctx.tel.shifts_applied += 1;
            n_shifts += 1;
            if ctx.oracle_valid(&point)? {
                cleared = true;
                break;
            }
        }
        if !cleared {
            path[i] = point;
            ctx.meter.enter(Phase::Validate);
            stuck = Some(i);
            break;
        }
        // Extra safety steps, not counted against the budget.
        for _ in 0..cfg.n_ex {
            point = gradient_shift(model, &point, &path[i - 1], &path[i + 1], cfg.alpha, &limits)?;
            ctx.meter.tick(2);
            ctx.tel.heuristic_checks += 1;
            ctx.tel.shifts_applied += 1;
        }
        // Reconnect the moved point to both neighbors with unchecked
        // interpolation points; the walk resumes at the first of them.
        let left = interpolate(&path[i - 1], &point, step)?;
        let right = interpolate(&point, &path[i + 1], step)?;
        let mut middle: Path = Vec::new();
        if left.len() >= 2 {
            middle.extend_from_slice(&left[1..left.len() - 1]);
        }
        middle.push(point);
        if right.len() >= 2 {
            middle.extend_from_slice(&right[1..right.len() - 1]);
        }
        path.splice(i..=i, middle);
        ctx.meter.enter(Phase::Validate);
    }
    if stuck.is_none() {
        return Ok((true, path));
    }

    // A candidate the walk could not mend crosses a configuration-space
    // wall that pointwise shifting cannot reroute around, and bracket
    // points of its invalid runs sit against that wall, so salvaging the
    // candidate is a poor use of the remaining budget. The fallback is a
    // direct RRT from start to goal that ignores the candidate path and
    // gets one fresh window of its own: exactly the baseline algorithm
    // under a baseline-equal budget, so the planner inherits the
    // baseline's completeness no matter how bad the candidate was.
    ctx.meter.enter(Phase::Repair);
    let deadline = ctx.meter.elapsed_s() + t_max;
    let a = path.first().expect("non-empty path").clone();
    let b = path.last().expect("non-empty path").clone();
    if let Some(direct) = grow_rrt(ctx, a, b, step, goal_bias, deadline)? {
        return Ok((true, direct));
    }
    Ok((false, path))
}

/// Exact-check suffix repair: oracle-check the densified suffix, excise
/// every maximal invalid run, and bridge each gap with the baseline RRT
/// between the bracketing valid points. `None` means some bridge could
/// not be planned within the budget (or an endpoint was invalid).
pub(crate) fn fastron_step(
    ctx: &mut Ctx,
    suffix: &[ExtendedConfig],
    step: f64,
    goal_bias: f64,
    deadline: f64,
) -> Result<Option<Path>> {
    if suffix.is_empty() {
        return Ok(None);
    }
    let dense = densify_path(suffix, step)?;
    let mut valid = Vec::with_capacity(dense.len());
    for p in &dense {
        valid.push(ctx.oracle_valid(p)?);
    }
    if !valid[0] || !valid[dense.len() - 1] {
        return Ok(None);
    }
    let mut out: Path = Vec::new();
    let mut idx = 0;
    while idx < dense.len() {
        if valid[idx] {
            out.push(dense[idx].clone());
            idx += 1;
            continue;
        }
        let mut end = idx;
        while !valid[end] {
            end += 1;
        }
        // Bracketing valid points; the left one is already in `out`.
        let a = dense[idx - 1].clone();
        let b = dense[end].clone();
        let Some(bridge) = grow_rrt(ctx, a, b, step, goal_bias, deadline)? else {
            return Ok(None);
        };
        out.extend(bridge.into_iter().skip(1));
        idx = end + 1;
    }
    Ok(Some(out))
}

/// Standalone entry point for the exact-check suffix repair, with its
/// own budget window.
pub fn fastron_repair_step(
    env: &Environment,
    suffix: &[ExtendedConfig],
    step: f64,
    goal_bias: f64,
    budget_s: f64,
    clock: Clock,
    rng: &mut Rng,
) -> Result<Option<Path>> {
    let mut ctx = Ctx::new(env, clock, rng);
    ctx.meter.enter(Phase::Repair);
    let deadline = ctx.meter.elapsed_s() + budget_s;
    fastron_step(&mut ctx, suffix, step, goal_bias, deadline)
}
