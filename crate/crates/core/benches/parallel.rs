//! Compares the rayon-backed and sequential execution paths on the
//! data-parallel kernels. Run twice to populate both sides:
//!
//!     cargo bench -p qhm                          # parallel feature (default)
//!     cargo bench -p qhm --no-default-features    # sequential fallback
//!
//! Group names carry the active mode, so criterion keeps the two sets of
//! measurements side by side under target/criterion.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qhm::{
    enumerate_maximal_strict_subspaces, gen_box_corners, gen_discrete, gen_join_discrete_cycle,
    hypermetric_check_bounded, knr_lower_bound_search, m_value, m_value_oracle, parallel_enabled,
    DEFAULT_TOL,
};

fn mode() -> &'static str {
    if parallel_enabled() {
        "parallel"
    } else {
        "sequential"
    }
}

fn bench_oracle(c: &mut Criterion) {
    let d = gen_discrete(12);
    let mut group = c.benchmark_group(format!("m_value_oracle/{}", mode()));
    group.bench_function("discrete12_restarts", |b| {
        b.iter(|| m_value_oracle(black_box(&d), 2_000).unwrap())
    });
    group.finish();
}

fn bench_hypermetric(c: &mut Criterion) {
    let d = gen_join_discrete_cycle(3, 0.1).unwrap();
    let mut group = c.benchmark_group(format!("hypermetric_enumeration/{}", mode()));
    group.bench_function("cycle_join_b2", |b| {
        b.iter(|| hypermetric_check_bounded(black_box(&d), 2, 10_000_000).unwrap())
    });
    group.finish();
}

fn bench_subset_enumeration(c: &mut Criterion) {
    let (_, d) = gen_box_corners(&[0.5, 0.4, 0.3], None).unwrap();
    let mut group = c.benchmark_group(format!("subset_enumeration/{}", mode()));
    group.bench_function("box8_all_subsets", |b| {
        b.iter(|| enumerate_maximal_strict_subspaces(black_box(&d), DEFAULT_TOL, 4096).unwrap())
    });
    group.finish();
}

fn bench_knr_search(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("knr_search/{}", mode()));
    group.sample_size(10);
    group.bench_function("cell_6_4_restarts", |b| {
        b.iter(|| knr_lower_bound_search(6, 4, 2_000, 17, None).unwrap())
    });
    group.finish();
}

fn bench_m_value_single(c: &mut Criterion) {
    // single-matrix baseline: no inner parallelism, useful as a control
    let (_, d) = gen_box_corners(&[0.5, 0.45, 0.4, 0.35, 0.3], None).unwrap();
    let mut group = c.benchmark_group(format!("m_value_single/{}", mode()));
    group.bench_function("box32", |b| {
        b.iter(|| m_value(black_box(&d), DEFAULT_TOL).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_oracle,
    bench_hypermetric,
    bench_subset_enumeration,
    bench_knr_search,
    bench_m_value_single
);
criterion_main!(benches);
