//! Hyperbolic geometry of the disk (density `1/(1-|t|²)`, curvature -4),
//! pullback densities, and the Grunsky/Teichmüller distance bounds along the
//! homotopy disk.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::grunsky::{grunsky_coefficients, grunsky_norm};
use crate::series::{homotopy, koebe_qc, LaurentSeries};

type C = Complex64;

/// Nodes on the Cauchy circle used to differentiate samplers.
pub const CAUCHY_NODES: usize = 32;

fn check_disk(t: C, what: &str) -> Result<()> {
    if !(t.norm() < 1.0) {
        return Err(Error::DomainMismatch(format!("{what} = {t} is not in the unit disk")));
    }
    Ok(())
}

pub fn hyperbolic_distance(t1: C, t2: C) -> Result<f64> {
    check_disk(t1, "t1")?;
    check_disk(t2, "t2")?;
    Ok(((t1 - t2) / (C::new(1.0, 0.0) - t2.conj() * t1)).norm().atanh())
}

pub fn hyperbolic_density(t: C) -> f64 {
    1.0 / (1.0 - t.norm_sqr())
}

/// `|h'(t)|/(1 - |h(t)|²)` with `h'` supplied.
pub fn pullback_density_with<H, D>(h: H, dh: D, t: C) -> Result<f64>
where
    H: Fn(C) -> C,
    D: Fn(C) -> C,
{
    let v = h(t);
    if !(v.norm() < 1.0) {
        return Err(Error::DomainMismatch(format!("h({t}) = {v} is not in the unit disk")));
    }
    Ok(dh(t).norm() / (1.0 - v.norm_sqr()))
}

/// `|h'(t)|/(1 - |h(t)|²)` with `h'` from the trapezoidal Cauchy integral
/// on a circle inside the disk.
pub fn pullback_density<H: Fn(C) -> C>(h: H, t: C) -> Result<f64> {
    check_disk(t, "t")?;
    let r = (0.5 * (1.0 - t.norm())).min(0.05);
    let dh = |t: C| {
        let m = CAUCHY_NODES;
        (0..m)
            .map(|j| {
                let w = C::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
                h(t + w * r) / w
            })
            .sum::<C>()
            / (r * m as f64)
    };
    pullback_density_with(&h, dh, t)
}

/// `Δ log λ(t0) - 4 λ(t0)²` with the 5-point Laplacian of step `h`.
pub fn curvature_check<L: Fn(C) -> f64>(lambda: L, t0: C, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(precondition("stencil step must be positive"));
    }
    let pts = [t0, t0 + h, t0 - h, t0 + C::new(0.0, h), t0 - C::new(0.0, h)];
    let mut logs = [0.0; 5];
    for (slot, &p) in logs.iter_mut().zip(&pts) {
        let v = lambda(p);
        if !(v > 0.0) {
            return Err(Error::DomainMismatch(format!("density {v} at {p} is not positive")));
        }
        *slot = v.ln();
    }
    let lap = (logs[1] + logs[2] + logs[3] + logs[4] - 4.0 * logs[0]) / (h * h);
    Ok(lap - 4.0 * logs[0].exp().powi(2))
}

/// `tanh⁻¹ κ(f_t)` from the Grunsky matrix of the homotopy at truncation `n`.
///
/// The largest singular value is computed directly, so `_restarts` has no
/// effect; it is kept for interface stability with iterative estimators.
pub fn caratheodory_lower_bound(f: &LaurentSeries, t: C, n: usize, _restarts: usize) -> Result<f64> {
    check_disk(t, "t")?;
    grunsky_distance(&homotopy(f, t)?, n)
}

fn grunsky_distance(f: &LaurentSeries, n: usize) -> Result<f64> {
    let kappa = grunsky_norm(&grunsky_coefficients(f, n)?).value;
    if kappa >= 1.0 {
        return Err(Error::NonConvergence { iterations: n, residual: kappa });
    }
    Ok(kappa.atanh())
}

pub fn teichmuller_upper_bound(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(precondition(format!("k = {k} must lie in [0, 1)")));
    }
    Ok(k.atanh())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub t: C,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
}

/// Lower and upper distance bounds for `f_t` over `t_grid`.
pub fn geodesic_coincidence_experiment<K>(f: &LaurentSeries, known_k: K, t_grid: &[C], n: usize) -> Result<Vec<MetricSample>>
where
    K: Fn(C) -> f64 + Sync,
{
    sample_family(|t| homotopy(f, t), known_k, t_grid, n)
}

fn sample_family<F, K>(family: F, known_k: K, t_grid: &[C], n: usize) -> Result<Vec<MetricSample>>
where
    F: Fn(C) -> Result<LaurentSeries> + Sync,
    K: Fn(C) -> f64 + Sync,
{
    t_grid
        .par_iter()
        .map(|&t| {
            check_disk(t, "t")?;
            let lower = grunsky_distance(&family(t)?, n)?;
            let upper = teichmuller_upper_bound(known_k(t))?;
            Ok(MetricSample { t, lower, upper, gap: upper - lower })
        })
        .collect()
}

/// Families with an explicit extremal extension along the homotopy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MetricFamily {
    /// `z + b/z`, extended by `z + b t² z̄`.
    B1Map { b: C },
    /// `koebe_qc(1, n)` carried to `Σ` by `z ↦ 1/f(1/z)`. Its homotopy at `t`
    /// is `koebe_qc(tⁿ, n)`, which extends with dilatation `|t|ⁿ`, and
    /// `|t|²` when `n = 1`.
    KoebeQc { n: u32 },
}

impl MetricFamily {
    /// The member at homotopy parameter `t`.
    pub fn member(&self, t: C, trunc: usize) -> Result<LaurentSeries> {
        match *self {
            MetricFamily::B1Map { b } => homotopy(&LaurentSeries::sigma(&[C::new(0.0, 0.0), b], trunc), t),
            MetricFamily::KoebeQc { n } => {
                let s = koebe_qc(t.powu(n), n, trunc)?;
                Ok(s.to_sigma()?.truncate(-(trunc as i32)))
            }
        }
    }

    pub fn known_k(&self, t: C) -> f64 {
        match *self {
            MetricFamily::B1Map { b } => b.norm() * t.norm_sqr(),
            MetricFamily::KoebeQc { n: 1 } => t.norm_sqr(),
            MetricFamily::KoebeQc { n } => t.norm().powi(n as i32),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub family: MetricFamily,
    pub truncation: usize,
    pub samples: Vec<MetricSample>,
    pub max_gap: f64,
    /// Largest `lower - upper`, which should not be positive.
    pub max_chain_violation: f64,
}

pub fn metric_sweep(family: MetricFamily, t_grid: &[C], n: usize, trunc: usize) -> Result<SweepSummary> {
    if t_grid.is_empty() {
        return Err(precondition("t grid is empty"));
    }
    if let MetricFamily::KoebeQc { n: 0 } = family {
        return Err(precondition("koebe_qc needs n >= 1"));
    }
    let samples = sample_family(|t| family.member(t, trunc), |t| family.known_k(t), t_grid, n)?;
    let max_gap = samples.iter().map(|s| s.gap.abs()).fold(0.0, f64::max);
    let max_chain_violation = samples.iter().map(|s| s.lower - s.upper).fold(f64::NEG_INFINITY, f64::max);
    Ok(SweepSummary { family, truncation: n, samples, max_gap, max_chain_violation })
}

/// `count` points on `[0, r_max]` along the ray of angle `theta`.
pub fn radial_grid(r_max: f64, count: usize, theta: f64) -> Vec<C> {
    if count == 0 {
        return Vec::new();
    }
    let step = if count == 1 { 0.0 } else { r_max / (count - 1) as f64 };
    (0..count).map(|i| C::from_polar(step * i as f64, theta)).collect()
}
