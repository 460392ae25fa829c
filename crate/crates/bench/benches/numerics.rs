//! Hot paths: radial spectral quadrature, Poisson sampling, the weight table
//! and the linear-field Monte Carlo.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use levy_spde_core::kernels::RADIAL_TOL;
use levy_spde_core::prm::sample_prm;
use levy_spde_core::rng::family_tag;
use levy_spde_core::{
    ColorationKernel, GreenOperator, KernelFamily, LevyMeasure, OperatorFamily, RandomStream, SpatialBox,
    TrialRunner, WeightTable,
};
use std::hint::black_box;

fn radial_quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("radial_quadrature");
    for (family, alpha, dim) in [(KernelFamily::Heat, 1.0, 1), (KernelFamily::Bessel, 1.5, 2), (KernelFamily::Riesz, 1.0, 3)] {
        let mu = ColorationKernel::new(family, alpha, dim).unwrap().spectral_measure();
        for op_family in [OperatorFamily::Heat, OperatorFamily::Wave] {
            let Ok(op) = GreenOperator::new(op_family, dim) else { continue };
            let id = BenchmarkId::new(format!("{op_family:?}"), format!("{family:?}-a{alpha}-d{dim}"));
            group.bench_function(id, |b| {
                b.iter(|| mu.integrate_radial(|r| op.h_transform(1.0, r).powi(2), RADIAL_TOL).unwrap())
            });
        }
    }
    group.finish();
}

fn prm_sampling(c: &mut Criterion) {
    let nu = LevyMeasure::symmetric_unit();
    let mut group = c.benchmark_group("prm_sampling");
    for half in [1.0, 10.0, 100.0] {
        let bounds = SpatialBox::cube(half, 1).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(half), &bounds, |b, bounds| {
            let mut rng = RandomStream::new(7, family_tag("bench"), 0);
            b.iter(|| sample_prm(bounds, &nu, &mut rng).unwrap().len())
        });
    }
    group.finish();
}

fn weight_table(c: &mut Criterion) {
    let mut group = c.benchmark_group("weight_table");
    group.sample_size(10);
    let cases = [
        (OperatorFamily::Heat, KernelFamily::Heat, 1.0),
        (OperatorFamily::Heat, KernelFamily::Bessel, 0.5),
        (OperatorFamily::Wave, KernelFamily::Bessel, 1.5),
    ];
    for (op_family, family, alpha) in cases {
        let op = GreenOperator::new(op_family, 1).unwrap();
        let kernel = ColorationKernel::new(family, alpha, 1).unwrap();
        let id = BenchmarkId::new(format!("{op_family:?}"), format!("{family:?}-a{alpha}"));
        group.bench_function(id, |b| b.iter(|| WeightTable::build(&op, &kernel, 1.0, 10.0).unwrap().len()));
    }
    group.finish();
}

fn linear_field(c: &mut Criterion) {
    let op = GreenOperator::new(OperatorFamily::Heat, 1).unwrap();
    let kernel = ColorationKernel::new(KernelFamily::Heat, 1.0, 1).unwrap();
    let nu = LevyMeasure::symmetric_unit();
    let runner = TrialRunner::new(1, 1);
    let mut group = c.benchmark_group("linear_field");
    group.sample_size(10);
    group.bench_function("heat-heat-1000", |b| {
        b.iter(|| {
            let est = levy_spde_core::linear::simulate_linear(
                &op, &kernel, &nu, &[0.5, 1.0], &[0.0], 8.0, 1000, &runner, family_tag("bench"),
            );
            black_box(est.unwrap())
        })
    });
    group.finish();
}

criterion_group!(benches, radial_quadrature, prm_sampling, weight_table, linear_field);
criterion_main!(benches);
