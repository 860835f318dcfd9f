//! Benchmarks of the hot paths: root enumeration, VMD state expansion,
//! sector Hamiltonians, the Lanczos solver, the f curve and the correlation
//! recursion.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fqh_core::bounds::{f_approx, martingale_epsilon, F_CERT_NMAX};
use fqh_core::correlations::{diag_expectation, DiagonalObservable};
use fqh_core::hamiltonian::{build_sector, Boundary, ModelParams};
use fqh_core::spectra::lowest_eigenvalues;
use fqh_core::tiling::{count_roots, enumerate_roots, RootTiling};
use fqh_core::vmd_states::vmd_state;

fn tilings(c: &mut Criterion) {
    let mut g = c.benchmark_group("tiling");
    for l in [12, 18, 24] {
        g.bench_with_input(BenchmarkId::new("enumerate_roots", l), &l, |b, &l| b.iter(|| enumerate_roots(black_box(l))));
    }
    g.bench_function("count_roots/200", |b| b.iter(|| count_roots(black_box(200))));
    g.finish();
}

fn states(c: &mut Criterion) {
    let mut g = c.benchmark_group("vmd_state");
    for l in [18, 30, 45] {
        let root = RootTiling::pure_monomer(l).unwrap();
        g.bench_with_input(BenchmarkId::new("pure_monomer", l), &root, |b, r| b.iter(|| vmd_state(r, 1.0).unwrap()));
    }
    g.finish();
}

fn hamiltonians(c: &mut Criterion) {
    let p = ModelParams::new(1.0, 1.0).unwrap();
    let mut g = c.benchmark_group("hamiltonian");
    g.sample_size(20);
    for (l, n) in [(12, 4), (15, 5), (18, 6)] {
        g.bench_function(BenchmarkId::new("build_sector_periodic", format!("{l}/{n}")), |b| {
            b.iter(|| build_sector(l, n, &p, Boundary::Periodic).unwrap())
        });
    }
    let (_, op) = build_sector(18, 6, &p, Boundary::Periodic).unwrap();
    let x = vec![1.0; op.dim()];
    g.bench_function("mul_vec/18/6", |b| b.iter(|| op.mul_vec(black_box(&x))));
    g.finish();
}

fn eigensolver(c: &mut Criterion) {
    let p = ModelParams::new(1.0, 1.0).unwrap();
    let mut g = c.benchmark_group("lanczos");
    g.sample_size(10);
    for (l, n) in [(12, 4), (15, 5)] {
        let (_, op) = build_sector(l, n, &p, Boundary::Periodic).unwrap();
        g.bench_function(BenchmarkId::new("lowest_4", format!("{l}/{n}")), |b| {
            b.iter(|| lowest_eigenvalues(&op, 4, 1e-10).unwrap())
        });
    }
    g.finish();
}

fn bounds(c: &mut Criterion) {
    let mut g = c.benchmark_group("bounds");
    g.bench_function("f_approx/73", |b| b.iter(|| f_approx(black_box(1.0), F_CERT_NMAX).unwrap()));
    g.sample_size(10);
    g.bench_function("martingale_epsilon/11", |b| b.iter(|| martingale_epsilon(11, black_box(1.0)).unwrap()));
    g.finish();
}

fn correlations(c: &mut Criterion) {
    let mut g = c.benchmark_group("correlations");
    for l in [400, 4000] {
        let root = RootTiling::pure_monomer(l).unwrap();
        let obs = DiagonalObservable::pair(l / 3, l / 3 + 60);
        g.bench_with_input(BenchmarkId::new("density_pair", l), &root, |b, r| {
            b.iter(|| diag_expectation(r, 1.0, black_box(&obs)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, tilings, states, hamiltonians, eigensolver, bounds, correlations);
criterion_main!(benches);
