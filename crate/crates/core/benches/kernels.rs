//! Benchmarks of the data-parallel kernels against their sequential twins.
//!
//! Run `cargo bench` for the parallel build and
//! `cargo bench --no-default-features` for the sequential one; the pairs
//! below also compare both code paths inside a single build.

use criterion::{criterion_group, criterion_main, Criterion};

use dualpolar::forms::{make_space, Family};
use dualpolar::lattice::PolarLattice;
use dualpolar::matrix::{IntMatrix, RationalMatrix};

fn bench_lattice_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("lattice_enumeration_b23");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| PolarLattice::enumerate(make_space(Family::B, 2, 3).unwrap()).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| PolarLattice::enumerate_seq(make_space(Family::B, 2, 3).unwrap()).unwrap())
    });
    group.finish();
}

fn bench_integer_product(c: &mut Criterion) {
    let lat = PolarLattice::enumerate(make_space(Family::C, 3, 2).unwrap()).unwrap();
    let n = lat.num_vertices() as i64;
    let a = IntMatrix::from_fn(n as usize, n as usize, |i, j| {
        ((i as i64 * 31 + j as i64 * 17) % 7) - 3
    });
    let mut group = c.benchmark_group("int_matrix_product_135");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| a.mul(&a)));
    group.bench_function("sequential", |b| b.iter(|| a.mul_seq(&a)));
    group.finish();
}

fn bench_rational_product(c: &mut Criterion) {
    let a = RationalMatrix::from_fn(60, 60, |i, j| {
        num::BigRational::new(
            ((i as i64 * 13 + j as i64 * 7) % 11 - 5).into(),
            (1 + ((i + 2 * j) % 9) as i64).into(),
        )
    });
    let mut group = c.benchmark_group("rational_matrix_product_60");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| a.mul(&a)));
    group.bench_function("sequential", |b| b.iter(|| a.mul_seq(&a)));
    group.finish();
}

criterion_group!(
    kernels,
    bench_lattice_enumeration,
    bench_integer_product,
    bench_rational_product
);
criterion_main!(kernels);
