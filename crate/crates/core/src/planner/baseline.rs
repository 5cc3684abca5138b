//! Oracle-only baseline RRT.
//!
//! Classic single-target extension with a greedy connect: every point of
//! the discretized edge is checked by the exact oracle and the valid
//! prefix is added as a parent chain, so an extracted path is spaced at
//! the interpolation resolution and already certified point by point.
//! The single-tree grower also bridges invalid runs for the standalone
//! excise-and-bridge repair; the bidirectional variant backs the
//! in-planner repair fallback.

use super::{nearest_neighbor, Ctx, Path, Phase, PlanQuery, PlanResult, Tree};
use crate::cspace::{config_distance, interpolate, Environment, ExtendedConfig, Rng};
use crate::error::{Error, Result};

/// Grow an RRT from `start` toward `goal` inside the workspace slice
/// both configurations share, stopping at `deadline` seconds of context
/// time. Success requires a goal-targeted extension to reach the goal
/// without truncation, so the returned path is oracle-valid end to end.
pub(crate) fn grow_rrt(
    ctx: &mut Ctx,
    start: ExtendedConfig,
    goal: ExtendedConfig,
    step: f64,
    goal_bias: f64,
    deadline: f64,
) -> Result<Option<Path>> {
    if config_distance(&start, &goal)? == 0.0 {
        return Ok(Some(vec![start]));
    }
    let mut tree = Tree::new(start);
    loop {
        if ctx.meter.elapsed_s() >= deadline {
            return Ok(None);
        }
        ctx.meter.tick(1);
        ctx.tel.iterations += 1;
        let (target, target_is_goal) = if ctx.rng.chance(goal_bias) {
            (goal.clone(), true)
        } else {
            let env = ctx.env;
            (
                env.space().sample_fixed_w(ctx.rng, goal.workspace())?,
                false,
            )
        };
        let nn = nearest_neighbor(&tree, &target)?;
        let edge = interpolate(tree.node(nn), &target, step)?;
        let mut frontier = nn;
        let mut reached = true;
        for point in &edge[1..] {
            if ctx.oracle_valid(point)? {
                frontier = tree.add(frontier, point.clone());
            } else {
                reached = false;
                break;
            }
        }
        if target_is_goal && reached {
            return Ok(Some(tree.path_to(frontier)));
        }
    }
}

/// Bidirectional variant used by the repair fallback: one tree from
/// each endpoint, greedy extension toward a shared sample, then a
/// greedy connect attempt between the frontiers. Success joins the two
/// certified node chains at an exactly shared configuration, so the
/// returned path is oracle-valid end to end at the step resolution.
/// Far lower variance than the single-tree planner on narrow necks,
/// which is what a completeness fallback needs.
pub(crate) fn connect_rrt(
    ctx: &mut Ctx,
    a: ExtendedConfig,
    b: ExtendedConfig,
    step: f64,
    deadline: f64,
) -> Result<Option<Path>> {
    if config_distance(&a, &b)? == 0.0 {
        return Ok(Some(vec![a]));
    }
    let w = a.workspace().to_vec();
    let mut trees = [Tree::new(a), Tree::new(b)];
    // trees[side] extends toward the sample; the other tree then tries
    // to connect to whatever frontier that extension reached.
    let mut side = 0;
    loop {
        if ctx.meter.elapsed_s() >= deadline {
            return Ok(None);
        }
        ctx.meter.tick(1);
        ctx.tel.iterations += 1;
        let target = ctx.env.space().sample_fixed_w(ctx.rng, &w)?;
        let frontier_idx = {
            let tree = &mut trees[side];
            let nn = nearest_neighbor(tree, &target)?;
            let edge = interpolate(tree.node(nn), &target, step)?;
            let mut frontier = nn;
            for point in &edge[1..] {
                if ctx.oracle_valid(point)? {
                    frontier = tree.add(frontier, point.clone());
                } else {
                    break;
                }
            }
            frontier
        };
        let frontier = trees[side].node(frontier_idx).clone();
        let other = &mut trees[1 - side];
        let nn = nearest_neighbor(other, &frontier)?;
        let edge = interpolate(other.node(nn), &frontier, step)?;
        let mut reach = nn;
        let mut connected = true;
        for point in &edge[1..] {
            if ctx.oracle_valid(point)? {
                reach = other.add(reach, point.clone());
            } else {
                connected = false;
                break;
            }
        }
        if connected {
            // `reach` in the other tree now sits exactly on `frontier`,
            // which the extending tree also holds; stitch root-to-root.
            let via_side = trees[side].path_to(frontier_idx);
            let via_other = trees[1 - side].path_to(reach);
            let (mut path, tail) = if side == 0 {
                (via_side, via_other)
            } else {
                (via_other, via_side)
            };
            path.extend(tail.into_iter().rev().skip(1));
            return Ok(Some(path));
        }
        side = 1 - side;
    }
}

/// The baseline planner: every collision decision is an exact oracle
/// call; the model is never consulted.
pub fn gjk_rrt_plan(
    env: &Environment,
    query: &PlanQuery,
    rng: &mut Rng,
) -> Result<PlanResult> {
    query.check(env)?;
    let mut ctx = Ctx::new(env, query.clock, rng);
    let start = query.start_config();
    let goal = query.goal_config();
    ctx.meter.enter(Phase::Validate);
    if !ctx.oracle_valid(&start)? {
        return Err(Error::InvalidQuery(
            "start configuration is in collision".into(),
        ));
    }
    if !ctx.oracle_valid(&goal)? {
        return Err(Error::InvalidQuery(
            "goal configuration is in collision".into(),
        ));
    }
    ctx.meter.enter(Phase::Build);
    let deadline = ctx.meter.elapsed_s() + query.t_max;
    let grown = grow_rrt(&mut ctx, start.clone(), goal.clone(), query.step, query.goal_bias, deadline)?;
    let (success, path) = match grown {
        Some(p) => (true, p),
        None => (false, vec![start, goal]),
    };
    let mut telemetry = ctx.finish();
    telemetry.path_steps = path.len().saturating_sub(1);
    Ok(PlanResult {
        success,
        path,
        telemetry,
    })
}
