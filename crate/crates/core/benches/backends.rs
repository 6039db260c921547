use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use squeeze_core::gradedlc::{fixtures, local_cohomology_with};
use squeeze_core::permgrp::named;
use squeeze_core::squeeze::{classical_tate_dimensions_with, tate_squeezed_homology};
use squeeze_core::{Exec, FpMatrix, GroupAlgebra, Window};

const BACKENDS: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn rref(c: &mut Criterion) {
    let mut group = c.benchmark_group("rref");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [64usize, 256] {
        let m = FpMatrix::random(5, n, n, &mut rng);
        for (name, exec) in BACKENDS {
            group.bench_with_input(BenchmarkId::new(name, n), &m, |b, m| {
                b.iter(|| m.rref_with(exec))
            });
        }
    }
    group.finish();
}

fn local_cohomology(c: &mut Criterion) {
    let mut group = c.benchmark_group("local_cohomology");
    let m = fixtures::polynomial2(3, 2, 2, 80);
    let window = Window::new(-16, 8).unwrap();
    for (name, exec) in BACKENDS {
        group.bench_function(name, |b| {
            b.iter(|| local_cohomology_with(&m, window, exec).unwrap())
        });
    }
    group.finish();
}

fn classical_tate(c: &mut Criterion) {
    let mut group = c.benchmark_group("classical_tate");
    group.sample_size(10);
    let alg = GroupAlgebra::new(Arc::new(named::frobenius20()), 5, 0).unwrap();
    let window = Window::new(-6, 6).unwrap();
    for (name, exec) in BACKENDS {
        group.bench_function(name, |b| {
            b.iter(|| classical_tate_dimensions_with(&alg, window, exec).unwrap())
        });
    }
    group.finish();
}

fn catalog_jobs(c: &mut Criterion) {
    let mut group = c.benchmark_group("catalog_jobs");
    group.sample_size(10);
    let jobs = [
        (named::symmetric3(), 3),
        (named::alternating4(), 2),
        (named::frobenius20(), 5),
        (named::c3_times_s3(), 3),
        (named::dihedral8(), 2),
        (named::cyclic(6), 3),
    ];
    let window = Window::new(-4, 4).unwrap();
    for (name, exec) in BACKENDS {
        group.bench_function(name, |b| {
            b.iter(|| {
                exec.map(jobs.len(), |i| {
                    let (g, p) = &jobs[i];
                    let alg = GroupAlgebra::new(Arc::new(g.clone()), *p, 0).unwrap();
                    tate_squeezed_homology(&alg, window).unwrap()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    rref,
    local_cohomology,
    classical_tate,
    catalog_jobs
);
criterion_main!(benches);
