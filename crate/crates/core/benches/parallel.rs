use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bsac::autoencoder::SAConfig;
use bsac::data::{generic_frame, read_csv};
use bsac::ensemble::train_bsac;
use bsac::eval::run_cv;
use bsac::nn::Rng;
use bsac::synth::separable_blobs;
use bsac::Execution;

const SCHEDULES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn config() -> SAConfig {
    SAConfig {
        layer_sizes: vec![8, 6, 3, 6, 8],
        epochs: 5,
        batch_size: 64,
        ..SAConfig::default()
    }
}

fn bench_train(c: &mut Criterion) {
    let ds = separable_blobs(2000, 0.2, 8, 0.4, 1);
    let train: Vec<usize> = (0..ds.rows()).filter(|i| i % 5 != 0).collect();
    let val: Vec<usize> = (0..ds.rows()).filter(|i| i % 5 == 0).collect();
    let (train, val) = (ds.select_rows(&train), ds.select_rows(&val));
    let grid = [0.1, 0.5, 0.9];
    let mut group = c.benchmark_group("train_bsac");
    group.sample_size(10);
    for (name, exec) in SCHEDULES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| train_bsac(&train, &val, &config(), &grid, &mut Rng::new(1), exec).unwrap())
        });
    }
    group.finish();
}

fn bench_predict(c: &mut Criterion) {
    let ds = separable_blobs(2000, 0.2, 8, 0.4, 2);
    let model = train_bsac(&ds, &ds, &config(), &[0.5], &mut Rng::new(2), Execution::Sequential).unwrap();
    let mut group = c.benchmark_group("predict");
    for (name, exec) in SCHEDULES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| model.predict(&ds.features, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_cv(c: &mut Criterion) {
    let ds = separable_blobs(1000, 0.2, 8, 0.4, 3);
    let mut csv = Vec::new();
    ds.write_csv(&mut csv).unwrap();
    let table = read_csv(csv.as_slice(), "bench", &[]).unwrap();
    let frame = generic_frame(&table, "label", true).unwrap();
    let mut group = c.benchmark_group("run_cv");
    group.sample_size(10);
    for (name, exec) in SCHEDULES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_cv(&frame, &config(), &[0.5], 3, &mut Rng::new(3), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_train, bench_predict, bench_cv);
criterion_main!(benches);
