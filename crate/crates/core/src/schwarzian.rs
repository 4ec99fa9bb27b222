//! Schwarzian derivatives of truncated series and the weighted sup-norm of
//! the space `B` of hyperbolically bounded holomorphic functions on `|z| > 1`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::series::{homotopy, Domain, LaurentSeries};

type C = Complex64;

/// `S_f = (f''/f')' - (f''/f')^2 / 2` as a truncated series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SchwarzianSeries(pub LaurentSeries);

impl SchwarzianSeries {
    pub fn series(&self) -> &LaurentSeries {
        &self.0
    }

    pub fn eval(&self, z: C) -> C {
        self.0.eval(z)
    }
}

pub fn schwarzian(f: &LaurentSeries) -> Result<SchwarzianSeries> {
    let d1 = f.derivative();
    if d1.coeffs().iter().all(|c| *c == C::new(0.0, 0.0)) {
        return Err(Error::InvalidExpansion("f' vanishes on the retained window".into()));
    }
    let d2 = d1.derivative();
    let g = d2.div(&d1)?;
    let s = g.derivative().sub(&g.mul(&g)?.scale(C::new(0.5, 0.0)))?;
    Ok(SchwarzianSeries(s))
}

/// Max coefficient discrepancy between `S` of the homotopy `f_t` and the
/// rescaled `t^-2 S_f(z/t)`.
pub fn homotopy_schwarzian_check(f: &LaurentSeries, t: C) -> Result<f64> {
    if t.norm() == 0.0 {
        return Err(precondition("t must be nonzero"));
    }
    let lhs = schwarzian(&homotopy(f, t)?)?;
    let rhs = schwarzian(f)?.0.rescale_argument(t.inv()).scale(t.powi(-2));
    Ok(lhs.0.max_diff(&rhs))
}

/// Grid estimate of `sup (|z|^2 - 1)^2 |φ(z)|` over `1 < |z| <= r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BNormEstimate {
    pub value: f64,
    /// Same estimate on the half-resolution grid.
    pub coarse: f64,
    pub refinement_delta: f64,
    /// Largest weighted magnitude of the last retained terms over the grid
    /// radii; large values mean the truncation is not trustworthy there.
    pub tail: f64,
}

/// Tail threshold above which evaluation is refused.
pub const TAIL_TOL: f64 = 1e-8;

pub fn b_norm_estimate(phi: &SchwarzianSeries, r_max: f64, grid: usize) -> Result<BNormEstimate> {
    if phi.0.domain() != Domain::Exterior {
        return Err(Error::DomainMismatch("B-norm is defined for exterior series".into()));
    }
    if !(r_max > 1.0) || grid < 2 {
        return Err(precondition("need r_max > 1 and at least 2 grid points"));
    }
    let weight = |r: f64| (r * r - 1.0).powi(2);
    let tail = radii(r_max, grid)
        .map(|r| weight(r) * phi.0.tail_magnitude(r, 4))
        .fold(0.0, f64::max);
    if tail > TAIL_TOL {
        return Err(Error::InsufficientTruncation(format!(
            "weighted tail {tail:e} exceeds {TAIL_TOL:e} near |z| = 1"
        )));
    }
    let value = grid_sup(phi, r_max, grid);
    let coarse = grid_sup(phi, r_max, grid / 2);
    Ok(BNormEstimate { value, coarse, refinement_delta: (value - coarse).abs(), tail })
}

fn radii(r_max: f64, grid: usize) -> impl Iterator<Item = f64> {
    (1..=grid).map(move |i| 1.0 + (r_max - 1.0) * i as f64 / grid as f64)
}

fn grid_sup(phi: &SchwarzianSeries, r_max: f64, grid: usize) -> f64 {
    let rs: Vec<f64> = radii(r_max, grid).collect();
    rs.par_iter()
        .map(|&r| {
            let w = (r * r - 1.0).powi(2);
            (0..grid)
                .map(|j| {
                    let th = std::f64::consts::TAU * j as f64 / grid as f64;
                    w * phi.eval(C::from_polar(r, th)).norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}
