use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use noisedim_core::constants::toy_source;
use noisedim_core::tradeoff::{oracle_tradeoff, solve_tradeoff, sweep_curve, DivergenceKind, SolverConfig};

fn bench_single_point(c: &mut Criterion) {
    let p = toy_source();
    let cfg = SolverConfig::default();
    c.bench_function("solve_tradeoff toy eps=0.9", |b| {
        b.iter(|| solve_tradeoff(&p, black_box(0.9), &cfg).unwrap())
    });
}

fn bench_sweep(c: &mut Criterion) {
    let p = toy_source();
    let cfg = SolverConfig::default();
    let grid: Vec<f64> = (1..=40).map(|i| i as f64 * 0.05).collect();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("toy 40-point curve", |b| {
        b.iter(|| sweep_curve(&p, black_box(&grid), &cfg).unwrap())
    });
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let p = noisedim_core::tradeoff::DiscreteDistribution::new(vec![0.6, 0.3, 0.1]).unwrap();
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("ternary grid 1e-3", |b| {
        b.iter(|| oracle_tradeoff(&p, black_box(0.9), 1e-3, DivergenceKind::Kl).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_single_point, bench_sweep, bench_oracle);
criterion_main!(benches);
