use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use conserve_bench::compressible_fixture;
use conserve_core::compressible1d::compressible_scheme;
use conserve_core::framework::{assemble_residual, SlabState};
use conserve_core::gauss_rule;
use conserve_core::spectral3d::{cross_product_dealiased, curl, make_random_divfree, FourierGrid};

fn gauss(c: &mut Criterion) {
    let mut group = c.benchmark_group("gauss_rule");
    for m in [2, 6, 12] {
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| b.iter(|| gauss_rule(black_box(m)).unwrap()));
    }
    group.finish();
}

fn compressible_residual(c: &mut Criterion) {
    let mut group = c.benchmark_group("compressible_residual");
    for cells in [32, 128] {
        let (problem, u0) = compressible_fixture(cells);
        let scheme = compressible_scheme(1).unwrap();
        let slab = SlabState::initial_guess(&problem, &scheme, &u0);
        group.bench_with_input(BenchmarkId::from_parameter(cells), &slab, |b, slab| {
            b.iter(|| assemble_residual(&problem, &scheme, black_box(slab), 1.0 / 128.0).unwrap())
        });
    }
    group.finish();
}

fn dealiased_cross_product(c: &mut Criterion) {
    let mut group = c.benchmark_group("dealiased_cross_product");
    for n in [8, 16] {
        let grid = FourierGrid::new(n).unwrap();
        let u = make_random_divfree(&grid, 3, 1.0).into_field();
        let w = curl(&grid, &u);
        group.bench_with_input(BenchmarkId::from_parameter(n), &(u, w), |b, (u, w)| {
            b.iter(|| cross_product_dealiased(&grid, black_box(u), black_box(w)))
        });
    }
    group.finish();
}

criterion_group!(benches, gauss, compressible_residual, dealiased_cross_product);
criterion_main!(benches);
