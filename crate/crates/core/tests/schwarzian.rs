use num_complex::Complex64 as C;
use proptest::prelude::*;
use qcvar::schwarzian::{b_norm_estimate, homotopy_schwarzian_check, schwarzian};
use qcvar::series::univalent_catalog;
use qcvar::LaurentSeries;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// `f'''/f' - 3/2 (f''/f')²` from closed-form derivatives of `z + Σ b_n z^-n`.
fn schwarzian_direct(b: &[C], z: C) -> C {
    let mut d = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    for (n, bn) in b.iter().enumerate().skip(1) {
        let n = n as f64;
        d[0] += bn * (-n) * z.powf(-n - 1.0);
        d[1] += bn * (n * (n + 1.0)) * z.powf(-n - 2.0);
        d[2] += bn * (-n * (n + 1.0) * (n + 2.0)) * z.powf(-n - 3.0);
    }
    d[2] / d[0] - (d[1] / d[0]).powi(2) * 1.5
}

#[test]
fn matches_direct_formula() {
    let b = [c(0.3, 0.0), c(0.2, -0.1), c(0.05, 0.1), c(-0.04, 0.02)];
    let s = schwarzian(&LaurentSeries::sigma(&b, 80)).unwrap();
    for z in [c(2.0, 0.0), c(-1.5, 1.2), c(0.3, 2.5)] {
        assert!((s.eval(z) - schwarzian_direct(&b, z)).norm() < 1e-12, "{z}");
    }
}

#[test]
fn affine_maps_have_zero_schwarzian() {
    let s = schwarzian(&LaurentSeries::sigma(&[c(0.7, -0.2)], 30)).unwrap();
    assert!(s.series().coeffs().iter().all(|v| v.norm() == 0.0));
    // z/(1 - az) truncated: zero up to the truncation order
    let a = c(0.3, 0.4);
    let coeffs: Vec<C> = (0..20).map(|k| a.powi(k)).collect();
    let f = LaurentSeries::class_s(&coeffs[1..], 20);
    let s = schwarzian(&f).unwrap();
    for p in 0..12 {
        assert!(s.series().coeff(p).norm() < 1e-12, "{p}");
    }
}

#[test]
fn catalog_chain_rule() {
    for map in univalent_catalog(40).unwrap() {
        for t in [c(0.5, 0.0), c(0.3, -0.6), c(-0.8, 0.1)] {
            let err = homotopy_schwarzian_check(&map.series, t).unwrap();
            assert!(err < 1e-10, "{}: {err}", map.name);
        }
    }
}

#[test]
fn b_norm_of_b1_map() {
    // sup (|z|²-1)² 6|b|/|z²-b|² is 6|b| for small real b, approached at |z| -> ∞
    let s = schwarzian(&LaurentSeries::sigma(&[c(0.0, 0.0), c(0.1, 0.0)], 60)).unwrap();
    let est = b_norm_estimate(&s, 1.6, 64).unwrap();
    assert!(est.value > 0.0 && est.value <= 6.0 * 0.1 / (1.0 - 0.1f64).powi(2) + 1e-9, "{est:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leading_term_is_minus_six_b1(b in prop::collection::vec((-0.3..0.3f64, -0.3..0.3f64), 2..6)) {
        let b: Vec<C> = b.into_iter().map(|(x, y)| c(x, y)).collect();
        let s = schwarzian(&LaurentSeries::sigma(&b, 30)).unwrap();
        prop_assert_eq!(s.series().coeff(-4), b[1] * -6.0);
        for p in -3..=2 {
            prop_assert_eq!(s.series().coeff(p), c(0.0, 0.0));
        }
    }
}
