use std::hint::black_box;

use arw_bench::lattice_workload;
use arw_core::greens::green_to_origin;
use arw_core::{stabilize, weak_stabilize, FiniteRegion};
use criterion::{criterion_group, criterion_main, Criterion};

fn tape(c: &mut Criterion) {
    let w = lattice_workload(2, 4, 0.5, 1.0);
    c.bench_function("tape 10k instructions", |b| {
        b.iter(|| {
            (1..=10_000u64)
                .map(|j| w.tape.instruction(black_box(3), j).is_jump() as u64)
                .sum::<u64>()
        })
    });
}

fn stabilization(c: &mut Criterion) {
    let w = lattice_workload(2, 16, 0.5, 1.0);
    c.bench_function("stabilize Z2 L=16 mu=0.5", |b| {
        b.iter(|| stabilize(&w.region, black_box(&w.config), &w.tape).unwrap())
    });
    c.bench_function("weak stabilize Z2 L=16 mu=0.5", |b| {
        b.iter(|| weak_stabilize(0, &w.region, black_box(&w.config), &w.tape).unwrap())
    });
}

fn green(c: &mut Criterion) {
    let k = FiniteRegion::lattice_ball(3, 16).unwrap();
    let mut group = c.benchmark_group("green");
    group.sample_size(10);
    group.bench_function("column Z3 L=16", |b| b.iter(|| green_to_origin(black_box(&k)).unwrap()));
    group.finish();
}

criterion_group!(benches, tape, stabilization, green);
criterion_main!(benches);
