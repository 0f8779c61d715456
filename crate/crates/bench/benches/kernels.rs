use std::hint::black_box;

use bkvg_bench::{extension, instance, sample_pair};
use bkvg_core::discretization::{discretize, numerical_range_sweep, rayleigh_inf_on_extension};
use bkvg_core::family::BvpProblem;
use bkvg_core::{l2_inner, oracle_form, Family, FormKind, MeshSpec, MonomialSum, Sign};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn inner_products(c: &mut Criterion) {
    let (f, g) = sample_pair();
    c.bench_function("l2_inner/closed_form", |b| b.iter(|| l2_inner(black_box(&f), black_box(&g))));
    c.bench_function("l2_inner/quadrature", |b| {
        b.iter(|| oracle_form(FormKind::L2, black_box(&f), black_box(&g)))
    });
}

fn bvp_oracle(c: &mut Criterion) {
    let inst = instance(Family::HardyImaginary, 2.0);
    let rhs = MonomialSum::power(inst.omega_plus.conj());
    let mut group = c.benchmark_group("bvp_solve_oracle");
    for nodes in [500, 2000] {
        let mesh = MeshSpec::new(nodes, 0.85).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(nodes), &mesh, |b, mesh| {
            b.iter(|| inst.bvp_solve_oracle(BvpProblem::Friedrichs(Sign::Plus), &rhs, mesh))
        });
    }
    group.finish();
}

fn numerical_range(c: &mut Criterion) {
    let mut group = c.benchmark_group("numerical_range_sweep");
    group.sample_size(10);
    for family in [Family::HardyImaginary, Family::HardyReal] {
        let op = discretize(&instance(family, 2.0), Sign::Plus, &MeshSpec::new(1024, 0.85).unwrap()).unwrap();
        group.bench_function(family.name(), |b| b.iter(|| numerical_range_sweep(black_box(&op), 64)));
    }
    group.finish();
}

fn rayleigh(c: &mut Criterion) {
    let spec = extension(1.0);
    let mesh = MeshSpec::default();
    let mut group = c.benchmark_group("rayleigh_inf_on_extension");
    group.sample_size(10);
    group.bench_function("margin_1", |b| b.iter(|| rayleigh_inf_on_extension(black_box(&spec), &mesh)));
    group.finish();
}

criterion_group!(benches, inner_products, bvp_oracle, numerical_range, rayleigh);
criterion_main!(benches);
