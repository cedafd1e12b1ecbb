//! Same library calls on the global rayon pool and on a one-thread pool.
//! Build with `--no-default-features` to get the plain sequential code path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mcslab::geometry::{estimate_reach, sample_secants_budget};
use mcslab::manifold::{make_circle, sample_manifold, ManifoldSample};
use mcslab::measurement::{draw_gaussian_operator, embedding_distortion, MeasurementOperator};
use std::f64::consts::PI;
use std::hint::black_box;
use std::sync::Arc;

fn circle(count: usize, n: usize) -> ManifoldSample {
    let model = Arc::new(make_circle(1.0, n).unwrap());
    sample_manifold(model, count, 8.0 * 2.0 * PI / count as f64).unwrap()
}

fn pools() -> [(&'static str, rayon::ThreadPool); 2] {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    [("sequential", one), ("parallel", all)]
}

fn reach(c: &mut Criterion) {
    let sample = circle(1000, 2);
    let mut group = c.benchmark_group("estimate_reach");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, 1000), |b| {
            b.iter(|| pool.install(|| estimate_reach(black_box(&sample)).unwrap()))
        });
    }
    group.finish();
}

fn distortion(c: &mut Criterion) {
    let sample = circle(2000, 256);
    let secants = sample_secants_budget(&sample, 1e-3, 1.0, 10_000, 1).unwrap();
    let op: MeasurementOperator = draw_gaussian_operator(64, 256, 1).unwrap();
    let mut group = c.benchmark_group("embedding_distortion");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, 10_000), |b| {
            b.iter(|| pool.install(|| embedding_distortion(&op, &sample, black_box(&secants)).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, reach, distortion);
criterion_main!(benches);
