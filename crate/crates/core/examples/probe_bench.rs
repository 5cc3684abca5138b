//! Replay the acceptance bench on selected environments with cached
//! models, printing the per-query cost picture for both planners.

use neuroclear::bench::{run_bench, BenchConfig, PlannerKind};
use neuroclear::clearancenet::{load_model, save_model, train, Activation, TrainConfig};
use neuroclear::cspace::{catalog, Rng};
use neuroclear::dataset;
use neuroclear::planner::Clock;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let envs: Vec<&str> = if args.is_empty() {
        vec!["narrow-gap", "clutter"]
    } else {
        args.iter().map(|s| s.as_str()).collect()
    };
    std::fs::create_dir_all("/tmp/neuroclear-probe").unwrap();
    for name in envs {
        let env = catalog::by_name(name).unwrap();
        let i = catalog::names().iter().position(|n| *n == name).unwrap();
        let cache = format!("/tmp/neuroclear-probe/{name}.json");
        let model = match load_model(&cache) {
            Ok(m) => m,
            Err(_) => {
                let mut rng = Rng::from_seed(1000 + i as u64);
                let ds = dataset::collect(&env, 90_000, 10_000, &mut rng).unwrap();
                let cfg = TrainConfig {
                    hidden: 256,
                    epochs: 100,
                    lr: 1.7495e-4,
                    batch: 191,
                    dropout: 0.01,
                    seed: 2000 + i as u64,
                    activation: Activation::Rectifier,
                };
                let (model, _) = train(&env, &ds, &cfg).unwrap();
                save_model(&cache, &model).unwrap();
                model
            }
        };
        let mut cfg = BenchConfig::new(100, 500);
        cfg.t_max = 2.0;
        cfg.clock = Clock::Iteration {
            seconds_per_tick: 1e-5,
        };
        cfg.planners = vec![PlannerKind::Cnrrt, PlannerKind::GjkRrt];
        let t0 = std::time::Instant::now();
        let out = run_bench(&env, &model, &cfg).unwrap();
        let wall = t0.elapsed().as_secs_f64();

        let rows_of = |kind: PlannerKind| -> Vec<_> {
            out.rows.iter().filter(|r| r.planner == kind).collect()
        };
        let cn = rows_of(PlannerKind::Cnrrt);
        let gj = rows_of(PlannerKind::GjkRrt);
        let mean = |rows: &[&neuroclear::bench::BenchRow]| {
            rows.iter()
                .map(|r| r.result.telemetry.geometric_checks as f64)
                .sum::<f64>()
                / rows.len() as f64
        };
        let succ = |rows: &[&neuroclear::bench::BenchRow]| {
            rows.iter().filter(|r| r.result.success).count()
        };
        println!(
            "{name}: wall {wall:.0}s  cnrrt mean_checks {:.0} succ {}  gjk mean_checks {:.0} succ {}",
            mean(&cn),
            succ(&cn),
            mean(&gj),
            succ(&gj)
        );
        for qi in 0..out.queries.len() {
            let c = cn.iter().find(|r| r.query == qi).unwrap();
            let g = gj.iter().find(|r| r.query == qi).unwrap();
            let ct = &c.result.telemetry;
            if g.result.success && !c.result.success {
                println!(
                    "  C6-VIOLATION q{qi}: cnrrt checks {} iters {} shifts {} repair_checks {} | gjk checks {}",
                    ct.geometric_checks,
                    ct.iterations,
                    ct.shifts_applied,
                    ct.repair_geometric_checks,
                    g.result.telemetry.geometric_checks
                );
            } else if ct.geometric_checks > 20_000 {
                println!(
                    "  heavy q{qi}: cnrrt {} checks (succ {}, iters {}, shifts {}, repair {}) | gjk {} checks (succ {})",
                    ct.geometric_checks,
                    c.result.success,
                    ct.iterations,
                    ct.shifts_applied,
                    ct.repair_geometric_checks,
                    g.result.telemetry.geometric_checks,
                    g.result.success
                );
            }
        }
    }
}
