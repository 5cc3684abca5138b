//! Throughput benches for the two hot paths: batched model inference
//! and exact-oracle dataset labeling.
//!
//! Labeling runs through the chunked execution layer, so running this
//! suite twice, once with the default features and once with
//! `--no-default-features`, compares the data-parallel backend against
//! the sequential fallback under identical group names apart from the
//! mode prefix.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use neuroclear::clearancenet::{Activation, ClearanceModel, DataBatch};
use neuroclear::cspace::{by_name, Rng};
use neuroclear::dataset;
use ndarray::Array2;
use std::hint::black_box;

const MODE: &str = if cfg!(feature = "parallel") {
    "parallel"
} else {
    "sequential"
};

fn forward_batch(c: &mut Criterion) {
    let d_e = 7;
    let model = ClearanceModel::init("bench", d_e, 256, Activation::Rectifier, 7).unwrap();
    let mut rng = Rng::from_seed(8);
    let mut group = c.benchmark_group(format!("{MODE}/forward_batch"));
    for n in [1usize, 16, 256, 1024] {
        let rows = Array2::from_shape_fn((n, d_e), |_| rng.uniform(-1.0, 1.0));
        let batch = DataBatch::from_rows(rows).unwrap();
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &batch, |b, batch| {
            b.iter(|| model.forward_batch(black_box(batch)).unwrap());
        });
    }
    group.finish();
}

fn oracle_labeling(c: &mut Criterion) {
    let env = by_name("narrow-gap").unwrap();
    let mut group = c.benchmark_group(format!("{MODE}/oracle_labeling"));
    group.sample_size(20);
    for n in [512usize, 4096] {
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| {
                let mut rng = Rng::from_seed(9);
                dataset::collect(black_box(&env), n, 0, &mut rng).unwrap()
            });
        });
    }
    group.finish();
}

fn input_gradient(c: &mut Criterion) {
    let env = by_name("narrow-gap").unwrap();
    let d_e = env.d_e();
    let model = ClearanceModel::init(env.name(), d_e, 256, Activation::Rectifier, 10).unwrap();
    let mut rng = Rng::from_seed(11);
    let cfg = env.space().sample(&mut rng);
    c.bench_function(&format!("{MODE}/input_gradient"), |b| {
        b.iter(|| model.input_gradient(black_box(&cfg)).unwrap());
    });
}

criterion_group!(benches, forward_batch, oracle_labeling, input_gradient);
criterion_main!(benches);
