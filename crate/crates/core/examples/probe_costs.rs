//! Measure the single-core wall cost of one exact oracle check against
//! one batched model prediction row, to calibrate the logical clock.

use neuroclear::clearancenet::{Activation, ClearanceModel, DataBatch};
use neuroclear::cspace::{catalog, Rng};
use std::time::Instant;

fn main() {
    for name in catalog::names() {
        let env = catalog::by_name(name).unwrap();
        let mut rng = Rng::from_seed(7);
        let cfgs: Vec<_> = (0..2000).map(|_| env.space().sample(&mut rng)).collect();

        // Oracle cost.
        for c in &cfgs {
            std::hint::black_box(env.is_valid(c).unwrap());
        }
        let t0 = Instant::now();
        for _ in 0..5 {
            for c in &cfgs {
                std::hint::black_box(env.is_valid(c).unwrap());
            }
        }
        let per_oracle = t0.elapsed().as_secs_f64() / (5.0 * cfgs.len() as f64);

        // Single-row model forward cost.
        let model = ClearanceModel::init(name, env.d_e(), 256, Activation::Rectifier, 9).unwrap();
        let one = DataBatch::from_configs(cfgs.iter().take(1)).unwrap();
        for _ in 0..100 {
            std::hint::black_box(model.forward_batch(&one).unwrap());
        }
        let t0 = Instant::now();
        for _ in 0..2000 {
            std::hint::black_box(model.forward_batch(&one).unwrap());
        }
        let per_single = t0.elapsed().as_secs_f64() / 2000.0;

        // Batched per-row cost at a planner-typical block size.
        let big = DataBatch::from_configs(cfgs.iter()).unwrap();
        for _ in 0..3 {
            std::hint::black_box(model.forward_batch(&big).unwrap());
        }
        let t0 = Instant::now();
        for _ in 0..10 {
            std::hint::black_box(model.forward_batch(&big).unwrap());
        }
        let per_row = t0.elapsed().as_secs_f64() / (10.0 * cfgs.len() as f64);

        println!(
            "{name}: oracle {:.2}us single_fwd {:.2}us batched_row {:.3}us  row/oracle {:.3}  row/single {:.3}",
            per_oracle * 1e6,
            per_single * 1e6,
            per_row * 1e6,
            per_row / per_oracle,
            per_row / per_single,
        );
    }
}
