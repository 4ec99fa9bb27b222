//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::time::Instant;

use num_complex::Complex64 as C;
use qcvar::extremal::{kkt_check, kn_bracket, l1_distance_to_span, rho_basis, ExtremalOptions};
use qcvar::grunsky::{grunsky_coefficients, grunsky_norm, h_x_value};
use qcvar::metrics::{curvature_check, hyperbolic_density, metric_sweep, pullback_density, MetricFamily};
use qcvar::quaddiff::{BeltramiField, GridField, PolePoint, QuadDiff, QuadratureOptions, Region, Term};
use qcvar::series::{koebe_qc, univalent_catalog};
use qcvar::variation::{first_order_value, l1_directional_derivative, solve_beltrami, FunctionalSpec, SolverOptions};
use qcvar::LaurentSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = (bool, String);

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn random_c(rng: &mut ChaCha8Rng, s: f64) -> C {
    c(rng.random_range(-s..s), rng.random_range(-s..s))
}

fn grunsky_diagonal() -> Outcome {
    let start = Instant::now();
    let mut worst_diag = 0.0f64;
    let mut worst_off = 0.0f64;
    let mut worst_norm = 0.0f64;
    for b in [0.3, 0.5, 0.7] {
        let f = LaurentSeries::sigma(&[c(0.0, 0.0), c(b, 0.0)], 80);
        let g = grunsky_coefficients(&f, 32).unwrap();
        for m in 1..=32 {
            for n in 1..=32 {
                let a = g.alpha(m, n);
                if m == n {
                    worst_diag = worst_diag.max((a - c(b.powi(m as i32) / m as f64, 0.0)).norm());
                } else {
                    worst_off = worst_off.max(a.norm());
                }
            }
        }
        worst_norm = worst_norm.max((grunsky_norm(&g).value - b).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst_diag < 1e-12 && worst_off < 1e-12 && worst_norm < 1e-8 && secs < 5.0,
        format!("diag err {worst_diag:.1e}, off-diag {worst_off:.1e}, norm err {worst_norm:.1e}, {secs:.2}s"),
    )
}

fn coefficient_equality() -> Outcome {
    let mut worst = 0.0f64;
    for n in 3..=8u32 {
        for j in 0..8 {
            let t = C::from_polar(0.1, std::f64::consts::TAU * j as f64 / 8.0);
            let f = koebe_qc(t, n - 1, n as usize + 4).unwrap();
            worst = worst.max((f.coeff(n as i32) - t * (2.0 / (n as f64 - 1.0))).norm());
        }
    }
    (worst < 1e-12, format!("max |a_n - 2t/(n-1)| = {worst:.1e}"))
}

fn kn_brackets() -> Outcome {
    let mut worst = 0.0f64;
    let mut lower_ok = true;
    for n in 3..=8u32 {
        let b = kn_bracket(n).unwrap();
        worst = worst.max((b.root - b.upper).abs());
        let nf = n as f64;
        let k = 1.0 / (nf * nf + 1.0);
        lower_ok &= 2.0 * k / (nf - 1.0) >= nf * k.powi(n as i32 - 1);
    }
    (worst < 1e-10 && lower_ok, format!("root vs closed form {worst:.1e}, lower end admissible: {lower_ok}"))
}

fn solver_exactness() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_b1 = 0.0f64;
    for cst in [0.05, 0.1] {
        let sol = solve_beltrami(&BeltramiField::Constant { c: c(cst, 0.0) }, &SolverOptions::default()).unwrap();
        for k in 0..64 {
            let z = C::from_polar(2.0, std::f64::consts::TAU * k as f64 / 64.0);
            worst = worst.max((sol.eval(z) - (z + cst / z)).norm());
        }
        worst_b1 = worst_b1.max((sol.b(1) - cst).norm());
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst < 5e-3 && worst_b1 < 1e-3 && secs < 60.0,
        format!("max sample err {worst:.1e}, b1 err {worst_b1:.1e}, {secs:.1}s"),
    )
}

fn smooth_field(rng: &mut ChaCha8Rng, n: usize) -> GridField {
    let a: Vec<C> = (0..4).map(|_| random_c(rng, 1.0)).collect();
    let raw = GridField::sample(n, 4.0, 1, |z| {
        let r2 = z.norm_sqr();
        if r2 >= 1.0 {
            return c(0.0, 0.0);
        }
        (a[0] + a[1] * z + a[2] * z.conj() + a[3] * z * z) * (1.0 - r2).powi(2) * 0.01
    })
    .unwrap();
    let sup = raw.sup_norm;
    GridField::new(n, raw.spacing, raw.origin, raw.samples.iter().map(|v| v * (0.9 / sup)).collect()).unwrap()
}

fn first_order_accuracy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let j = FunctionalSpec::coefficient(1, 2.0, 64).unwrap();
    let opts = SolverOptions { grid_size: 256, tol: 1e-14, ..SolverOptions::default() };
    let eps = [0.02, 0.01, 0.005];
    let mut slopes = Vec::new();
    for _ in 0..5 {
        let unit = smooth_field(&mut rng, opts.grid_size);
        let errs: Vec<f64> = eps
            .iter()
            .map(|&e| {
                let mu = BeltramiField::Grid(
                    GridField::new(unit.grid_size, unit.spacing, unit.origin, unit.samples.iter().map(|v| v * e).collect())
                        .unwrap(),
                );
                let exact = j.evaluate(&solve_beltrami(&mu, &opts).unwrap());
                let linear = first_order_value(&j, &mu, QuadratureOptions::with_tol(1e-10)).unwrap();
                (exact - linear).norm()
            })
            .collect();
        slopes.push(log_log_slope(&eps, &errs));
    }
    let ok = slopes.iter().all(|s| (s - 2.0).abs() <= 0.3);
    (ok, format!("slopes {}", slopes.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>().join(", ")))
}

fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

fn random_rational(rng: &mut ChaCha8Rng) -> QuadDiff {
    let mut terms: Vec<Term> = (0..3).map(|p| Term::Monomial { c: random_c(rng, 1.0), p }).collect();
    let a = C::from_polar(rng.random_range(1.3..2.5), rng.random_range(0.0..std::f64::consts::TAU));
    terms.push(Term::Pole { c: random_c(rng, 1.0), a, order: 1 });
    QuadDiff::new(Region::Disk, terms).unwrap()
}

/// `∬_D |g|` on a uniform polar mesh with 3×3 Gauss points per cell.
fn polar_l1<G: Fn(C) -> f64 + Sync>(g: G, nr: usize, nt: usize) -> f64 {
    let x = [-(0.6f64).sqrt(), 0.0, 0.6f64.sqrt()];
    let w = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let (dr, dt) = (1.0 / nr as f64, std::f64::consts::TAU / nt as f64);
    (0..nr)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for jt in 0..nt {
                for a in 0..3 {
                    let r = dr * (i as f64 + 0.5 + 0.5 * x[a]);
                    for b in 0..3 {
                        let th = dt * (jt as f64 + 0.5 + 0.5 * x[b]);
                        acc += w[a] * w[b] * r * g(C::from_polar(r, th));
                    }
                }
            }
            acc * 0.25 * dr * dt
        })
        .sum()
}

fn norm_derivative() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let delta = 1e-3;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let phi = random_rational(&mut rng);
        let psi = random_rational(&mut rng);
        let h = |t: f64| polar_l1(|z| (phi.eval(z) + psi.eval(z) * t).norm(), 256, 512);
        let fd = (8.0 * (h(delta) - h(-delta)) - (h(2.0 * delta) - h(-2.0 * delta))) / (12.0 * delta);
        let formula = l1_directional_derivative(&phi, &psi, QuadratureOptions::with_tol(1e-9)).unwrap().value.re;
        worst = worst.max((fd - formula).abs());
    }
    (worst < 1e-5, format!("max |formula - finite difference| = {worst:.1e}"))
}

fn kkt_conditions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = ExtremalOptions { restarts: 5, ..ExtremalOptions::default() };
    let mut worst_kkt = 0.0f64;
    let mut worst_spread = 0.0f64;
    let mut all_passed = true;
    for _ in 0..10 {
        let mut terms: Vec<Term> = (0..3).map(|p| Term::Monomial { c: random_c(&mut rng, 1.0), p }).collect();
        let a = C::from_polar(1.5, rng.random_range(0.0..std::f64::consts::TAU));
        terms.push(Term::Pole { c: random_c(&mut rng, 1.0), a, order: 2 });
        let psi0 = QuadDiff::new(Region::Disk, terms).unwrap();
        let count = rng.random_range(1..=2);
        let e: Vec<PolePoint> = (0..count)
            .map(|_| PolePoint::Finite(C::from_polar(2.0, rng.random_range(0.0..std::f64::consts::TAU))))
            .collect();
        let basis = rho_basis(&e).unwrap();
        match l1_distance_to_span(&psi0, &basis, &opts) {
            Ok(sol) => {
                let report = kkt_check(&sol, &psi0, &basis, 1e-4).unwrap();
                all_passed &= report.passed;
                for (r, s) in report.residuals.iter().zip(&report.scales) {
                    worst_kkt = worst_kkt.max(r / s);
                }
                let (lo, hi) = sol.restart_d.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &d| (a.min(d), b.max(d)));
                worst_spread = worst_spread.max(hi - lo);
            }
            Err(_) => all_passed = false,
        }
    }
    (
        all_passed && worst_kkt < 1e-4 && worst_spread < 1e-4,
        format!("max relative KKT residual {worst_kkt:.1e}, restart spread of d {worst_spread:.1e}"),
    )
}

fn metric_coincidence() -> Outcome {
    let mut worst = 0.0f64;
    for theta in [0.0, 0.7, 2.1, 4.0] {
        let grid = qcvar::metrics::radial_grid(0.9, 19, theta);
        let s = metric_sweep(MetricFamily::B1Map { b: c(0.6, 0.0) }, &grid, 16, 40).unwrap();
        worst = worst.max(s.max_gap);
        for m in &s.samples {
            worst = worst.max((m.lower - (0.6 * m.t.norm_sqr()).atanh()).abs());
        }
    }
    (worst < 1e-6, format!("max gap / deviation from closed form {worst:.1e}"))
}

fn curvature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let points: Vec<C> = (0..100)
        .map(|_| C::from_polar(0.7 * rng.random_range(0.0f64..1.0).sqrt(), rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    let mut worst = 0.0f64;
    for &t in &points {
        worst = worst.max(curvature_check(hyperbolic_density, t, 1e-3).unwrap().abs());
    }
    for _ in 0..5 {
        let a = C::from_polar(rng.random_range(0.0..0.6), rng.random_range(0.0..std::f64::consts::TAU));
        let rot = C::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        let b = move |z: C| rot * (z - a) / (C::new(1.0, 0.0) - a.conj() * z);
        for &t in &points {
            let r = curvature_check(|z| pullback_density(b, z).unwrap(), t, 1e-3).unwrap();
            worst = worst.max(r.abs());
        }
    }
    (worst < 1e-4, format!("max |Δlog λ - 4λ²| = {worst:.1e}"))
}

fn univalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_norm = 0.0f64;
    let mut worst_form = f64::NEG_INFINITY;
    let n = 16;
    for map in univalent_catalog(64).unwrap() {
        let g = grunsky_coefficients(&map.series, n).unwrap();
        worst_norm = worst_norm.max(grunsky_norm(&g).value);
        for _ in 0..1000 {
            let raw: Vec<C> = (0..n).map(|_| random_c(&mut rng, 1.0)).collect();
            let scale = rng.random_range(0.05..1.0) / raw.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let x: Vec<C> = raw.iter().map(|v| v * scale).collect();
            let norm2: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            worst_form = worst_form.max(h_x_value(&g, &x).unwrap().norm() / norm2);
        }
    }
    (
        worst_norm <= 1.0 + 1e-8 && worst_form <= 1.0,
        format!("max Grunsky norm {worst_norm:.6}, max |xᵀBx|/‖x‖² {worst_form:.6}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("Grunsky diagonal family", grunsky_diagonal),
        ("coefficient equality case", coefficient_equality),
        ("k_n bracket", kn_brackets),
        ("Beltrami solver exactness", solver_exactness),
        ("first-order accuracy", first_order_accuracy),
        ("norm-derivative formula", norm_derivative),
        ("KKT conditions", kkt_conditions),
        ("metric coincidence", metric_coincidence),
        ("curvature property", curvature),
        ("univalence and area bounds", univalence),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run();
        if !ok {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<28} {}  ({detail}; {:.1}s)",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
