use criterion::{black_box, criterion_group, criterion_main, Criterion};

use hermdens::fiber::{verify_fiber, FiberLimits};
use hermdens::naive::{density_estimate, DEFAULT_MAX_STATES};
use hermdens::{jordan_split, local_density, Tail, TypeProfile};
use hermdens_bench::{lattice, mixed_rank_six};

fn jordan(c: &mut Criterion) {
    let g = mixed_rank_six(Some(7));
    c.bench_function("jordan_split rank 6 conjugated", |b| {
        b.iter(|| jordan_split(black_box(&g)).unwrap())
    });
}

fn density(c: &mut Criterion) {
    let p = TypeProfile::from_decomposition(&jordan_split(&mixed_rank_six(None)).unwrap()).unwrap();
    c.bench_function("local_density rank 6", |b| {
        b.iter(|| local_density(black_box(&p), 2).unwrap())
    });
}

fn naive(c: &mut Criterion) {
    let g = lattice(1, &[(0, 2, Tail::A12b1 { b: 0 })], Some(3));
    let mut group = c.benchmark_group("naive");
    group.sample_size(10);
    group.bench_function("density_estimate rank 2 kmax 6", |b| {
        b.iter(|| density_estimate(black_box(&g), 6, DEFAULT_MAX_STATES).unwrap())
    });
    group.finish();
}

fn fiber(c: &mut Criterion) {
    let d = jordan_split(&lattice(1, &[(0, 1, Tail::Unit { a: 1 }), (1, 2, Tail::H1)], None)).unwrap();
    let mut group = c.benchmark_group("fiber");
    group.sample_size(10);
    group.bench_function("verify_fiber rank 3", |b| {
        b.iter(|| verify_fiber(black_box(&d), FiberLimits::default(), false).unwrap())
    });
    group.finish();
}

criterion_group!(pipeline, jordan, density, naive, fiber);
criterion_main!(pipeline);
