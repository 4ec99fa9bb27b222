use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qcvar::extremal::{l1_distance_to_span, rho_basis, ExtremalOptions};
use qcvar::grunsky::{grunsky_coefficients, grunsky_norm};
use qcvar::quaddiff::{l1_norm, BeltramiField, PolePoint, QuadDiff, QuadratureOptions, Region, Term};
use qcvar::variation::{solve_beltrami, SolverOptions};
use qcvar::{Complex64 as C, LaurentSeries};

fn grunsky(c: &mut Criterion) {
    let b: Vec<C> = (0..64).map(|n| C::new(0.3 / (n as f64 + 1.0).powi(2), 0.1 / (n as f64 + 2.0))).collect();
    let f = LaurentSeries::sigma(&b, 128);
    for n in [16, 32] {
        c.bench_function(&format!("grunsky_norm_N{n}"), |bench| {
            bench.iter(|| grunsky_norm(&grunsky_coefficients(black_box(&f), n).unwrap()))
        });
    }
}

fn quadrature(c: &mut Criterion) {
    let psi = QuadDiff::new(
        Region::Disk,
        vec![
            Term::Monomial { c: C::new(1.0, 0.5), p: 2 },
            Term::Pole { c: C::new(1.0, 0.0), a: C::new(1.5, 0.0), order: 2 },
        ],
    )
    .unwrap();
    c.bench_function("l1_norm_pole_1e-9", |bench| {
        bench.iter(|| l1_norm(black_box(&psi), QuadratureOptions::with_tol(1e-9)).unwrap())
    });
}

fn solver(c: &mut Criterion) {
    let mu = BeltramiField::Constant { c: C::new(0.3, 0.1) };
    for grid_size in [128, 256] {
        let opts = SolverOptions { grid_size, ..SolverOptions::default() };
        c.bench_function(&format!("solve_beltrami_{grid_size}"), |bench| {
            bench.iter(|| solve_beltrami(black_box(&mu), &opts).unwrap())
        });
    }
}

fn irls(c: &mut Criterion) {
    let psi0 = QuadDiff::new(Region::Disk, vec![Term::Monomial { c: C::new(1.0, 0.0), p: 0 }]).unwrap();
    let basis = rho_basis(&[PolePoint::Infinity]).unwrap();
    let opts = ExtremalOptions { tol: 1e-6, restarts: 1, ..ExtremalOptions::default() };
    let mut group = c.benchmark_group("extremal");
    group.sample_size(10);
    group.bench_function("l1_distance_one_point", |bench| {
        bench.iter(|| l1_distance_to_span(black_box(&psi0), &basis, &opts).unwrap())
    });
    group.finish();
}

criterion_group!(benches, grunsky, quadrature, solver, irls);
criterion_main!(benches);
