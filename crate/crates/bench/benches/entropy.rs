use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use noisedim_core::floatfmt::{self, round_to_format};
use noisedim_core::gauss_entropy::{exact_entropy, mc_entropy, pmf};

fn bench_pmf(c: &mut Criterion) {
    let atom = round_to_format(1.5, floatfmt::BINARY32);
    c.bench_function("pmf binary32 atom", |b| b.iter(|| pmf(black_box(atom)).unwrap()));
}

fn bench_exact_binary16(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact entropy");
    group.sample_size(10);
    group.bench_function("binary16 enumeration", |b| {
        b.iter(|| exact_entropy(black_box(floatfmt::BINARY16)).unwrap())
    });
    group.finish();
}

fn bench_mc(c: &mut Criterion) {
    let mut group = c.benchmark_group("mc entropy");
    group.sample_size(10);
    for k in [100_000u64, 1_000_000] {
        group.bench_function(format!("binary32 k={k}"), |b| {
            b.iter_batched(
                || (),
                |_| mc_entropy(floatfmt::BINARY32, black_box(k), 7).unwrap(),
                BatchSize::PerIteration,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, bench_pmf, bench_exact_binary16, bench_mc);
criterion_main!(benches);
