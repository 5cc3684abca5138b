//! Clearance-network RRT: batched tree growth screened by the learned
//! model, then exact-oracle certification and repair.
//!
//! Each build iteration samples a block of extension targets, steers
//! every target to within a capped distance of its nearest tree node,
//! discretizes the straight edge at a screening resolution coarser than
//! the certification step, and predicts clearance for all edge points of
//! all extensions in a single batched forward pass; no exact checks
//! happen while building. Each edge is truncated at the first point
//! predicted below the active threshold, and a few surviving points per
//! edge join the tree as children of the expansion node. The threshold
//! schedule relaxes on elapsed time so a stalling search admits riskier
//! extensions. When the goal connects (or the budget expires and the
//! two-point fallback is used) the proposal goes to repair, whose
//! verdict is the planner's; repair always certifies at the full query
//! resolution, so the coarse screening never weakens the guarantee.

use super::repair;
use super::{
    check_model, nearest_neighbor, Ctx, Path, Phase, PlanQuery, PlanResult, RepairConfig,
    RepairMode, Tree,
};
use crate::classifier::ThresholdSchedule;
use crate::clearancenet::{ClearanceModel, DataBatch};
use crate::cspace::{config_distance, interpolate, Environment, ExtendedConfig, Rng};
use crate::error::{Error, Result};

/// Longest extension attempted in one step; more distant targets are
/// pulled onto the segment toward them at this distance. Keeps the
/// per-iteration prediction block small so the budget buys breadth
/// (many iterations) rather than depth (few giant edges).
const STEER_MAX: f64 = 0.6;

/// Screening discretization as a multiple of the certification step.
/// The model is smooth at the step scale, so predicting every second
/// point halves the block without losing screening power.
const SCREEN_COARSENING: f64 = 2.0;

/// Plan with gradient-shift repair.
pub fn cnrrt_plan(
    env: &Environment,
    model: &ClearanceModel,
    query: &PlanQuery,
    schedule: ThresholdSchedule,
    repair_cfg: &RepairConfig,
    rng: &mut Rng,
) -> Result<PlanResult> {
    plan_with_mode(
        env,
        model,
        query,
        schedule,
        repair_cfg,
        rng,
        RepairMode::GradientShift,
    )
}

/// Plan with validation-only repair: invalid points go straight to the
/// exact-check fallback instead of being shifted first.
pub fn cnrrt_ng_plan(
    env: &Environment,
    model: &ClearanceModel,
    query: &PlanQuery,
    schedule: ThresholdSchedule,
    repair_cfg: &RepairConfig,
    rng: &mut Rng,
) -> Result<PlanResult> {
    plan_with_mode(
        env,
        model,
        query,
        schedule,
        repair_cfg,
        rng,
        RepairMode::ValidateOnly,
    )
}

fn plan_with_mode(
    env: &Environment,
    model: &ClearanceModel,
    query: &PlanQuery,
    mut schedule: ThresholdSchedule,
    repair_cfg: &RepairConfig,
    rng: &mut Rng,
    mode: RepairMode,
) -> Result<PlanResult> {
    query.check(env)?;
    repair_cfg.check()?;
    check_model(env, model)?;
    let start = query.start_config();
    let goal = query.goal_config();
    let mut ctx = Ctx::new(env, query.clock, rng);
    ctx.meter.enter(Phase::Validate);
    if !ctx.oracle_valid(&start)? {
        return Err(Error::InvalidQuery("start pose is in collision".into()));
    }
    if !ctx.oracle_valid(&goal)? {
        return Err(Error::InvalidQuery("goal pose is in collision".into()));
    }

    let mut tree = Tree::new(start.clone());
    let mut goal_node = if config_distance(&start, &goal)? == 0.0 {
        Some(0)
    } else {
        None
    };

    ctx.meter.enter(Phase::Build);
    while goal_node.is_none() && ctx.meter.elapsed_s() < query.t_max {
        ctx.meter.tick(1);
        ctx.tel.iterations += 1;

        // Targets and edges come from the tree as it stood at the top of
        // the iteration; additions land only after screening.
        let mut edges: Vec<(usize, Path)> = Vec::with_capacity(query.n_ext);
        for _ in 0..query.n_ext {
            let target = if ctx.rng.chance(query.goal_bias) {
                goal.clone()
            } else {
                env.space().sample_fixed_w(ctx.rng, goal.workspace())?
            };
            let near = nearest_neighbor(&tree, &target)?;
            let target = steer(tree.node(near), &target)?;
            let edge = interpolate(tree.node(near), &target, SCREEN_COARSENING * query.step)?;
            edges.push((near, edge));
        }

        // The single batched model call of this iteration.
        let batch = DataBatch::from_configs(edges.iter().flat_map(|(_, e)| e.iter()))?;
        let preds = ctx.predict_batch(model, &batch)?;
        let d_star = schedule.current();

        let mut offset = 0;
        'edges: for (near, edge) in &edges {
            let scores = &preds[offset..offset + edge.len()];
            offset += edge.len();
            let survive = first_below(scores, d_star);
            // Index 0 is the expansion node itself; an edge whose very
            // first new point fails contributes nothing.
            if survive <= 1 {
                continue;
            }
            let chosen = choose_additions(survive, query.k_add, ctx.rng);
            let mut node_of = vec![None; survive];
            for &c in &chosen {
                node_of[c] = Some(tree.add(*near, edge[c].clone()));
            }
            for (idx, point) in edge.iter().enumerate().take(survive).skip(1) {
                let d = config_distance(point, &goal)?;
                if d <= query.step {
                    let node = match node_of[idx] {
                        Some(id) => id,
                        None => tree.add(*near, point.clone()),
                    };
                    goal_node = Some(if d == 0.0 {
                        node
                    } else {
                        tree.add(node, goal.clone())
                    });
                    break 'edges;
                }
            }
        }
        schedule.advance(ctx.meter.elapsed_s());
    }

    let proposal = match goal_node {
        Some(node) => tree.path_to(node),
        None => vec![start, goal],
    };
    let (success, path) = repair::run(
        &mut ctx,
        model,
        proposal,
        repair_cfg,
        query.step,
        query.t_max,
        query.goal_bias,
        mode,
    )?;
    let mut telemetry = ctx.finish();
    telemetry.path_steps = path.len().saturating_sub(1);
    Ok(PlanResult {
        success,
        path,
        telemetry,
    })
}

/// Pull a target beyond `STEER_MAX` back onto the segment toward it at
/// exactly that distance; nearer targets pass through unchanged. The
/// workspace block is shared by construction, so only robot coordinates
/// interpolate.
fn steer(from: &ExtendedConfig, target: &ExtendedConfig) -> Result<ExtendedConfig> {
    let d = config_distance(from, target)?;
    if d <= STEER_MAX {
        return Ok(target.clone());
    }
    let t = STEER_MAX / d;
    let robot: Vec<f64> = from
        .robot()
        .iter()
        .zip(target.robot())
        .map(|(a, b)| a + t * (b - a))
        .collect();
    Ok(ExtendedConfig::new(robot, target.workspace().to_vec()))
}

/// Length of the surviving prefix: the index of the first score below
/// the threshold, or the full length when none falls below.
fn first_below(scores: &[f64], d_star: f64) -> usize {
    scores
        .iter()
        .position(|&s| s < d_star)
        .unwrap_or(scores.len())
}

/// Pick up to `k_add` indices from the surviving prefix `1..survive`,
/// without replacement, always including the furthest surviving point.
/// Returned sorted ascending so tree insertion order is deterministic.
fn choose_additions(survive: usize, k_add: usize, rng: &mut Rng) -> Vec<usize> {
    debug_assert!(survive >= 2 && k_add >= 1);
    let furthest = survive - 1;
    let mut pool: Vec<usize> = (1..furthest).collect();
    let extra = (k_add - 1).min(pool.len());
    for i in 0..extra {
        let j = i + rng.below(pool.len() - i);
        pool.swap(i, j);
    }
    let mut chosen: Vec<usize> = pool[..extra].to_vec();
    chosen.push(furthest);
    chosen.sort_unstable();
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cspace::catalog;
    use crate::cspace::{ExtendedConfig, ExtendedConfigSpace};
    use crate::geometry::{KinematicChain, Vec2};
    use crate::planner::test_models::{constant_model, handmade_model};
    use crate::planner::{gjk_rrt_plan, validate_path, Clock};

    fn schedule() -> ThresholdSchedule {
        ThresholdSchedule::new(vec![0.02], vec![f64::INFINITY]).unwrap()
    }

    fn iteration_query(start: Vec<f64>, goal: Vec<f64>, t_max: f64) -> PlanQuery {
        let mut q = PlanQuery::new(start, goal, vec![]);
        q.t_max = t_max;
        q.n_ext = 8;
        q.clock = Clock::Iteration {
            seconds_per_tick: 1e-5,
        };
        q
    }

    #[test]
    fn first_below_truncates_at_the_threshold() {
        let scores = [0.5, 0.3, 0.1, 0.4];
        assert_eq!(first_below(&scores, 0.2), 2);
        assert_eq!(first_below(&scores, 0.6), 0);
        assert_eq!(first_below(&scores, 0.05), 4);
        assert_eq!(first_below(&[], 0.1), 0);
    }

    #[test]
    fn choose_additions_always_takes_the_furthest_and_never_the_root() {
        let mut rng = Rng::from_seed(21);
        for survive in 2..30 {
            for k_add in 1..6 {
                let chosen = choose_additions(survive, k_add, &mut rng);
                assert_eq!(chosen.len(), k_add.min(survive - 1));
                assert!(chosen.contains(&(survive - 1)));
                assert!(chosen.windows(2).all(|w| w[0] < w[1]), "sorted, unique");
                assert!(chosen.iter().all(|&c| c >= 1 && c < survive));
            }
        }
    }

    #[test]
    fn empty_workspace_succeeds_with_oracle_checks_only_in_validation() {
        let chain = KinematicChain::new(
            Vec2::new(0.0, 0.0),
            vec![1.0],
            0.05,
            vec![(-3.0, 3.0)],
            8,
        )
        .unwrap();
        let space = ExtendedConfigSpace::new(chain.joint_limits().to_vec(), vec![]).unwrap();
        let env = Environment::new("open", chain, vec![], vec![], space, 0.5, None).unwrap();
        let model = constant_model("open", 1, 0.4);
        let query = iteration_query(vec![-2.0], vec![2.0], 5.0);
        let mut rng = Rng::from_seed(31);
        let out = cnrrt_plan(&env, &model, &query, schedule(), &RepairConfig::default(), &mut rng)
            .unwrap();
        assert!(out.success);
        assert_eq!(out.path.first().unwrap().robot(), &[-2.0]);
        assert_eq!(out.path.last().unwrap().robot(), &[2.0]);
        let (valid, _) = validate_path(&env, &out.path, query.step).unwrap();
        assert!(valid);
        // Two endpoint admissions plus one check per walked point; the
        // build phase itself never consults the oracle.
        assert_eq!(
            out.telemetry.geometric_checks,
            2 + out.path.len() as u64
        );
        assert_eq!(out.telemetry.repair_geometric_checks, 0);
        assert_eq!(out.telemetry.shifts_applied, 0);
        assert!(out.telemetry.heuristic_checks > 0);
        assert!(out.telemetry.build_s > 0.0);
        assert!(out.telemetry.validate_s > 0.0);
    }

    #[test]
    fn optimist_model_acts_as_lazy_rrt_and_repair_certifies() {
        let env = catalog::by_name("narrow-gap").unwrap();
        let a = vec![2.2, 0.3, 0.2];
        let b = vec![2.2, -0.4, -0.3];
        let straight = [
            ExtendedConfig::robot_only(a.clone()),
            ExtendedConfig::robot_only(b.clone()),
        ];
        let (direct_ok, _) = validate_path(&env, &straight, 0.05).unwrap();
        assert!(direct_ok, "chosen endpoints must see each other");

        let model = constant_model("narrow-gap", 3, 0.4);
        let query = iteration_query(a, b, 5.0);
        let mut rng = Rng::from_seed(32);
        let out = cnrrt_plan(&env, &model, &query, schedule(), &RepairConfig::default(), &mut rng)
            .unwrap();
        assert!(out.success);
        let (valid, _) = validate_path(&env, &out.path, query.step).unwrap();
        assert!(valid);
        assert_eq!(out.telemetry.geometric_checks, 2 + out.path.len() as u64);
        assert_eq!(out.telemetry.repair_geometric_checks, 0);
        assert_eq!(out.telemetry.shifts_applied, 0);

        // Identical seeds reproduce the whole run.
        let mut rng2 = Rng::from_seed(32);
        let again = cnrrt_plan(&env, &model, &query, schedule(), &RepairConfig::default(), &mut rng2)
            .unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn pessimist_model_times_out_and_fallback_still_solves() {
        // Every prediction sits below any threshold, so no edge survives,
        // the build loop runs dry, and the two-point fallback path goes to
        // repair. The straight segment is actually free, so the walk
        // certifies it without a single shift; the baseline planner agrees
        // on the same query.
        let env = catalog::by_name("narrow-gap").unwrap();
        let a = vec![2.2, 0.3, 0.2];
        let b = vec![2.2, -0.4, -0.3];
        let model = constant_model("narrow-gap", 3, -0.5);
        let query = iteration_query(a, b, 0.3);
        let mut rng = Rng::from_seed(33);
        let out = cnrrt_plan(&env, &model, &query, schedule(), &RepairConfig::default(), &mut rng)
            .unwrap();
        assert!(out.success);
        assert!(out.telemetry.iterations >= 1);
        assert!(out.telemetry.heuristic_checks >= query.n_ext as u64);
        assert_eq!(out.telemetry.shifts_applied, 0);
        let dense = crate::planner::densify_path(
            &[
                ExtendedConfig::robot_only(query.start.clone()),
                ExtendedConfig::robot_only(query.goal.clone()),
            ],
            query.step,
        )
        .unwrap();
        assert_eq!(out.path, dense);

        let mut rng_base = Rng::from_seed(33);
        let base = gjk_rrt_plan(&env, &query, &mut rng_base).unwrap();
        assert_eq!(base.success, out.success);
    }

    #[test]
    fn invalid_endpoints_and_mismatched_models_are_rejected() {
        let env = catalog::by_name("narrow-gap").unwrap();
        let model = constant_model("narrow-gap", 3, 0.4);
        let mut rng = Rng::from_seed(34);

        // Start pose drives the straight arm into the upper box.
        let query = iteration_query(vec![0.45, 0.0, 0.0], vec![0.0, 0.0, 0.0], 0.2);
        let err = cnrrt_plan(&env, &model, &query, schedule(), &RepairConfig::default(), &mut rng);
        assert!(matches!(err, Err(Error::InvalidQuery(_))));

        // Wrong environment name with matching dimensions.
        let foreign = handmade_model(
            "clutter",
            3,
            &[
                (vec![vec![0.0; 2]; 3], vec![0.0; 2]),
                (vec![vec![0.0; 2]; 2], vec![0.0; 2]),
                (vec![vec![0.0]; 2], vec![0.1]),
            ],
        );
        let query = iteration_query(vec![2.2, 0.3, 0.2], vec![2.2, -0.4, -0.3], 0.2);
        let err = cnrrt_plan(&env, &foreign, &query, schedule(), &RepairConfig::default(), &mut rng);
        assert!(matches!(err, Err(Error::InvalidConstruction(_))));
    }

    #[test]
    fn validate_only_variant_matches_on_clean_runs() {
        // Full goal bias and a goal within the steering cap pin the build
        // to a single straight extension that is genuinely free, so
        // neither variant ever shifts and the two planners must agree
        // move for move.
        let env = catalog::by_name("narrow-gap").unwrap();
        let model = constant_model("narrow-gap", 3, 0.4);
        let mut query = iteration_query(vec![2.2, 0.3, 0.2], vec![2.2, -0.1, 0.0], 5.0);
        query.goal_bias = 1.0;
        let mut rng_a = Rng::from_seed(35);
        let a = cnrrt_plan(&env, &model, &query, schedule(), &RepairConfig::default(), &mut rng_a)
            .unwrap();
        let mut rng_b = Rng::from_seed(35);
        let b = cnrrt_ng_plan(&env, &model, &query, schedule(), &RepairConfig::default(), &mut rng_b)
            .unwrap();
        assert_eq!(a, b);
        assert!(a.success);
        assert_eq!(a.telemetry.iterations, 1);
        assert_eq!(a.telemetry.shifts_applied, 0);
    }

    #[test]
    fn start_equal_to_goal_short_circuits_the_build() {
        let env = catalog::by_name("narrow-gap").unwrap();
        let model = constant_model("narrow-gap", 3, 0.4);
        let query = iteration_query(vec![2.2, 0.3, 0.2], vec![2.2, 0.3, 0.2], 5.0);
        let mut rng = Rng::from_seed(36);
        let out = cnrrt_plan(&env, &model, &query, schedule(), &RepairConfig::default(), &mut rng)
            .unwrap();
        assert!(out.success);
        assert_eq!(out.telemetry.iterations, 0);
        assert_eq!(out.telemetry.heuristic_checks, 0);
        assert_eq!(out.path, vec![ExtendedConfig::robot_only(vec![2.2, 0.3, 0.2])]);
        assert_eq!(out.telemetry.path_steps, 0);
    }
}
