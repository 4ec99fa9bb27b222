//! Explicit univalent families and the transforms acting on them.

use num_complex::Complex64;
use num_rational::Rational64;

use super::{pow_series, Domain, LaurentSeries};
use crate::error::{precondition, Error, Result};

type C = Complex64;

/// Complex homotopy `f_t(z) = t f(z/t)`: `b_n -> b_n t^(n+1)`.
///
/// `t = 0` returns the identity with the same window.
pub fn homotopy(f: &LaurentSeries, t: C) -> Result<LaurentSeries> {
    if !f.is_class_sigma() {
        return Err(Error::NotClassSigma("homotopy is defined on class Σ".into()));
    }
    if t.norm() >= 1.0 {
        return Err(precondition(format!("|t| = {} must be < 1", t.norm())));
    }
    let coeffs = (f.lo()..=f.hi())
        .map(|p| if p == 1 { f.coeff(1) } else { f.coeff(p) * t.powi(1 - p) })
        .collect();
    Ok(LaurentSeries::new(Domain::Exterior, f.lo(), coeffs))
}

/// Odd square-root transform `(f(z^2) - f0)^(1/2)`.
pub fn sqrt_transform(f: &LaurentSeries, f0: C) -> Result<LaurentSeries> {
    if !f.is_class_sigma() {
        return Err(Error::NotClassSigma("square-root transform needs class Σ".into()));
    }
    let g = f.compose_monomial(2).add_constant(-f0)?;
    pow_series(&g, Rational64::new(1, 2))
}

/// `f_{1,t}(z) = z/(1 - t z)^2` for `n = 1`, and `f_{1,t}(z^n)^(1/n)` for
/// larger `n`, retaining powers up to `z^trunc`.
pub fn koebe_qc(t: C, n: u32, trunc: usize) -> Result<LaurentSeries> {
    if t.norm() >= 1.0 {
        return Err(precondition(format!("|t| = {} must be < 1", t.norm())));
    }
    if n == 0 {
        return Err(precondition("n must be at least 1"));
    }
    let n_usize = n as usize;
    // base map known to a window large enough that the n-th root keeps trunc powers
    let base_trunc = trunc.div_ceil(n_usize).max(1);
    let one_minus_tz = LaurentSeries::new(
        Domain::Interior,
        0,
        (0..=base_trunc).map(|k| match k {
            0 => C::new(1.0, 0.0),
            1 => -t,
            _ => C::new(0.0, 0.0),
        }).collect(),
    );
    let z = LaurentSeries::monomial(Domain::Interior, C::new(1.0, 0.0), 1, base_trunc);
    let f1 = z.mul(&one_minus_tz.mul(&one_minus_tz)?.recip()?)?.truncate(base_trunc as i32);
    if n == 1 {
        return Ok(f1.truncate(trunc as i32));
    }
    let root = pow_series(&f1.compose_monomial(n), Rational64::new(1, n as i64))?;
    Ok(root.truncate(trunc as i32))
}

/// Named univalent maps with known Teichmüller-norm upper bounds, used for
/// property checks and sweeps.
#[derive(Debug, Clone)]
pub struct CatalogMap {
    pub name: String,
    pub series: LaurentSeries,
    /// Dilatation of an explicit quasiconformal extension, when known.
    pub dilatation_bound: Option<f64>,
}

/// Class-Σ catalog at the given truncation.
pub fn univalent_catalog(trunc: usize) -> Result<Vec<CatalogMap>> {
    let c = |re: f64, im: f64| C::new(re, im);
    let mut out = vec![CatalogMap {
        name: "identity".into(),
        series: LaurentSeries::identity(Domain::Exterior, trunc),
        dilatation_bound: Some(0.0),
    }];
    for b in [c(0.3, 0.0), c(0.5, 0.0), c(0.7, 0.0), c(0.2, 0.6), c(-0.95, 0.0)] {
        out.push(CatalogMap {
            name: format!("z + ({b})/z"),
            series: LaurentSeries::sigma(&[c(0.0, 0.0), b], trunc),
            dilatation_bound: Some(b.norm()),
        });
    }
    for b in [c(0.25, 0.0), c(0.0, 0.5)] {
        // z + b/z^2 is univalent on |z| > 1 iff |b| <= 1/2
        out.push(CatalogMap {
            name: format!("z + ({b})/z^2"),
            series: LaurentSeries::sigma(&[c(0.0, 0.0), c(0.0, 0.0), b], trunc),
            dilatation_bound: None,
        });
    }
    for t in [c(0.5, 0.0), c(0.3, 0.6), c(-0.9, 0.1)] {
        let f = koebe_qc(t, 1, trunc)?.to_sigma()?.truncate(-(trunc as i32));
        out.push(CatalogMap {
            name: format!("koebe_qc(t={t}, n=1) in Σ"),
            series: f,
            dilatation_bound: Some(t.norm_sqr()),
        });
    }
    for (t, n) in [(c(0.4, 0.2), 2u32), (c(0.6, 0.0), 3)] {
        // the S_k extension fixing infinity has dilatation |t|
        let f = koebe_qc(t, n, trunc)?.to_sigma()?.truncate(-(trunc as i32));
        out.push(CatalogMap {
            name: format!("koebe_qc(t={t}, n={n}) in Σ"),
            series: f,
            dilatation_bound: Some(t.norm()),
        });
    }
    let base = LaurentSeries::sigma(&[c(0.1, 0.0), c(0.6, 0.0)], 2 * trunc);
    out.push(CatalogMap {
        name: "sqrt transform of z + 0.1 + 0.6/z".into(),
        series: sqrt_transform(&base, C::new(0.0, 0.0))?.truncate(-(trunc as i32)),
        dilatation_bound: None,
    });
    let koebe = koebe_qc(c(0.5, 0.3), 1, trunc)?.to_sigma()?.truncate(-(trunc as i32));
    out.push(CatalogMap {
        name: "homotopy of koebe_qc at t = 0.7i".into(),
        series: homotopy(&koebe, c(0.0, 0.7))?,
        dilatation_bound: Some(c(0.5, 0.3).norm_sqr() * 0.49),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn homotopy_of_identity_is_identity() {
        let f = LaurentSeries::identity(Domain::Exterior, 10);
        for t in [c(0.0, 0.0), c(0.5, 0.2), c(-0.9, 0.0)] {
            assert_eq!(homotopy(&f, t).unwrap(), f);
        }
    }

    #[test]
    fn homotopy_scales_coefficients() {
        let b = [c(0.1, 0.2), c(0.3, -0.1), c(-0.2, 0.05)];
        let f = LaurentSeries::sigma(&b, 8);
        let t = c(0.4, 0.3);
        let ft = homotopy(&f, t).unwrap();
        assert!((ft.coeff(0) - b[0] * t).norm() < 1e-16);
        assert!((ft.coeff(-1) - b[1] * t * t).norm() < 1e-16);
        assert!((ft.coeff(-2) - b[2] * t * t * t).norm() < 1e-16);
        assert_eq!(ft.coeff(1), c(1.0, 0.0));
    }

    #[test]
    fn homotopy_composes() {
        let f = LaurentSeries::sigma(&[c(0.1, 0.0), c(0.3, 0.2), c(0.0, 0.1)], 12);
        let (t, s) = (c(0.5, 0.1), c(-0.3, 0.6));
        let lhs = homotopy(&homotopy(&f, t).unwrap(), s).unwrap();
        let rhs = homotopy(&f, t * s).unwrap();
        assert!(lhs.max_diff(&rhs) < 1e-15);
    }

    #[test]
    fn homotopy_rejects_large_t() {
        let f = LaurentSeries::identity(Domain::Exterior, 4);
        assert!(homotopy(&f, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn sqrt_transform_identity() {
        let f = LaurentSeries::identity(Domain::Exterior, 8);
        let r = sqrt_transform(&f, c(0.0, 0.0)).unwrap();
        assert_eq!(r.coeff(1), c(1.0, 0.0));
        assert!((r.lo()..1).all(|p| r.coeff(p).norm() == 0.0));
    }

    #[test]
    fn sqrt_transform_first_coefficient_and_oddness() {
        let b = [c(0.2, -0.1), c(0.4, 0.1), c(0.05, 0.02), c(-0.1, 0.0)];
        let f = LaurentSeries::sigma(&b, 10);
        let f0 = c(-0.3, 0.25);
        let r = sqrt_transform(&f, f0).unwrap();
        assert!((r.coeff(-1) - (b[0] - f0) / 2.0).norm() < 1e-15);
        for p in (r.lo()..=r.hi()).filter(|p| p % 2 == 0) {
            assert_eq!(r.coeff(p), c(0.0, 0.0), "even power {p}");
        }
    }

    #[test]
    fn sqrt_transform_binomial() {
        let b = c(0.35, 0.2);
        let f = LaurentSeries::sigma(&[c(0.0, 0.0), b], 10);
        let r = sqrt_transform(&f, c(0.0, 0.0)).unwrap();
        assert!((r.coeff(-3) - b / 2.0).norm() < 1e-15);
        assert!((r.coeff(-7) + b * b / 8.0).norm() < 1e-15);
        assert!((r.coeff(-11) - b.powi(3) / 16.0).norm() < 1e-15);
    }

    #[test]
    fn koebe_zero_parameter_is_identity() {
        let f = koebe_qc(c(0.0, 0.0), 3, 12).unwrap();
        assert_eq!(f.coeff(1), c(1.0, 0.0));
        assert!((2..=12).all(|p| f.coeff(p).norm() == 0.0));
    }

    #[test]
    fn koebe_first_family_coefficients() {
        let t = c(0.6, -0.3);
        let f = koebe_qc(t, 1, 25).unwrap();
        for m in 1..=25 {
            assert!((f.coeff(m) - t.powi(m - 1) * m as f64).norm() < 1e-13);
        }
    }

    #[test]
    fn koebe_root_family_leading_coefficient() {
        let t = c(0.2, 0.1);
        let f2 = koebe_qc(t, 2, 20).unwrap();
        assert!((f2.coeff(3) - t).norm() < 1e-15);
        assert_eq!(f2.coeff(2), c(0.0, 0.0));
        let f3 = koebe_qc(t, 3, 20).unwrap();
        assert!((f3.coeff(4) - t * 2.0 / 3.0).norm() < 1e-15);
        assert_eq!(f3.hi(), 20);
    }
}
