use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use sparse_eb::experiments::{table1, ExperimentConfig};
use sparse_eb::{oracle, selector, Signal};
use sparse_eb_bench::spiky_observation;

fn select(c: &mut Criterion) {
    let mut group = c.benchmark_group("select");
    for n in [500, 10_000, 100_000] {
        let x = spiky_observation(n, n / 20, 4.0, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| {
            b.iter(|| selector::select(black_box(x), 0.7).unwrap())
        });
    }
    group.finish();
}

fn tau_oracle(c: &mut Criterion) {
    let theta = Signal::spikes(10_000, 500, 3.0).unwrap();
    c.bench_function("tau_oracle_n10000", |b| {
        b.iter(|| oracle::tau_oracle(black_box(&theta), 1.0, 1.0).unwrap())
    });
}

fn published_table(c: &mut Criterion) {
    let mut group = c.benchmark_group("table1");
    group.sample_size(10);
    let config = ExperimentConfig::published(1);
    group.bench_function("published_grid", |b| b.iter(|| table1(black_box(&config)).unwrap()));
    group.finish();
}

criterion_group!(benches, select, tau_oracle, published_table);
criterion_main!(benches);
