use num_complex::Complex64 as C;
use proptest::prelude::*;
use qcvar::quaddiff::{teich_beltrami, BeltramiField, GridField, QuadDiff, QuadratureOptions, Region, Term};
use qcvar::variation::{
    first_order_map, first_order_value, solve_beltrami, FunctionalSpec, FunctionalTerm, Normalization, SolverOptions,
};

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn opts() -> QuadratureOptions {
    QuadratureOptions::with_tol(1e-10)
}

fn small_solver() -> SolverOptions {
    SolverOptions { grid_size: 128, ..SolverOptions::default() }
}

fn term(point: C, order: u32, weight: C) -> FunctionalTerm {
    FunctionalTerm { point, order, weight }
}

#[test]
fn constant_field_first_order_map() {
    // μ = c on the disk: f(z) = z + c/z exactly outside
    let mu = BeltramiField::Constant { c: c(0.04, 0.03) };
    for z in [c(1.5, 0.0), c(-2.0, 1.0)] {
        let w = first_order_map(&mu, z, Normalization::Hydrodynamic, opts()).unwrap();
        assert!((w - (z + c(0.04, 0.03) / z)).norm() < 1e-10);
    }
}

#[test]
fn unit_point_normalization_fixes_one() {
    let mu = BeltramiField::Constant { c: c(0.08, 0.0) };
    let sol = solve_beltrami(&mu, &SolverOptions { normalization: Normalization::UnitPoint, ..small_solver() }).unwrap();
    assert!((sol.eval(c(1.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-12);
    // same map up to a translation
    let free = solve_beltrami(&mu, &small_solver()).unwrap();
    let z = c(2.0, 1.0);
    assert!(((sol.eval(z) - free.eval(z)) - (sol.shift - free.shift)).norm() < 1e-12);
}

#[test]
fn residual_small_for_smooth_field() {
    let g = GridField::sample(128, 4.0, 1, |z| {
        let r2 = z.norm_sqr();
        if r2 < 1.0 { (c(0.2, 0.1) + z * 0.1) * (1.0 - r2).powi(2) } else { c(0.0, 0.0) }
    })
    .unwrap();
    let sol = solve_beltrami(&BeltramiField::Grid(g), &small_solver()).unwrap();
    assert!(sol.residual < small_solver().residual_tol, "{}", sol.residual);
    assert!(sol.increment < 1e-12);
}

#[test]
fn functional_validation() {
    assert!(FunctionalSpec::new(vec![term(c(1.0, 0.0), 0, c(1.0, 0.0))], Normalization::Hydrodynamic).is_err());
    assert!(FunctionalSpec::new(vec![term(c(0.5, 0.0), 1, c(1.0, 0.0))], Normalization::Hydrodynamic).is_err());
    assert!(FunctionalSpec::new(vec![term(c(2.0, 0.0), 0, c(0.0, 0.0))], Normalization::Hydrodynamic).is_err());
    let raw = r#"{"terms": [{"point": [2.0, 0.0], "weight": [1.0, 0.0]}]}"#;
    let spec: FunctionalSpec = serde_json::from_str(raw).unwrap();
    assert_eq!(spec.terms()[0].order, 0);
    assert_eq!(spec.normalization(), Normalization::Hydrodynamic);
}

#[test]
fn first_order_agrees_with_solver_for_teichmuller_field() {
    let psi = QuadDiff::new(Region::Disk, vec![Term::Monomial { c: c(1.0, 0.0), p: 0 }, Term::Monomial { c: c(0.5, 0.2), p: 1 }]).unwrap();
    let mu = teich_beltrami(&psi, 0.01).unwrap();
    let j = FunctionalSpec::new(vec![term(c(1.8, 0.4), 0, c(1.0, 0.0)), term(c(-2.0, 0.0), 1, c(0.0, 1.0))], Normalization::Hydrodynamic).unwrap();
    let linear = first_order_value(&j, &mu, opts()).unwrap();
    let sol = solve_beltrami(&mu, &SolverOptions { grid_size: 256, ..SolverOptions::default() }).unwrap();
    let exact = j.evaluate(&sol);
    // second order in k plus pixelization of the boundary
    assert!((exact - linear).norm() < 2e-3 * linear.norm().max(1e-3), "{exact} vs {linear}");
}

fn spec_from(points: &[(f64, f64, u32, f64, f64)]) -> Option<FunctionalSpec> {
    let terms = points.iter().map(|&(r, th, s, wr, wi)| term(C::from_polar(r, th), s, c(wr, wi))).collect();
    FunctionalSpec::new(terms, Normalization::Hydrodynamic).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linear_in_mu_and_weights(
        pts in prop::collection::vec((1.2..3.0f64, 0.0..6.3f64, 0u32..3, -1.0..1.0f64, -1.0..1.0f64), 1..4),
        a in (-0.3..0.3f64, -0.3..0.3f64),
        b in (-0.3..0.3f64, -0.3..0.3f64),
        s in -2.0..2.0f64,
    ) {
        let Some(j) = spec_from(&pts) else { return Ok(()); };
        let (a, b) = (c(a.0, a.1), c(b.0, b.1));
        let va = first_order_value(&j, &BeltramiField::Constant { c: a }, opts()).unwrap();
        let vb = first_order_value(&j, &BeltramiField::Constant { c: b }, opts()).unwrap();
        let vab = first_order_value(&j, &BeltramiField::Constant { c: a + b }, opts()).unwrap();
        prop_assert!((vab - va - vb).norm() < 1e-8 * (1.0 + va.norm() + vb.norm()));
        let scaled: Vec<_> = pts.iter().map(|&(r, th, o, wr, wi)| (r, th, o, wr * s, wi * s)).collect();
        if let Some(js) = spec_from(&scaled) {
            let vs = first_order_value(&js, &BeltramiField::Constant { c: a }, opts()).unwrap();
            prop_assert!((vs - va * s).norm() < 1e-8 * (1.0 + va.norm() * s.abs()));
        }
    }
}
