//! Extremal problems for point functionals: the `ρ` basis, the `L¹` distance
//! from `ψ₀` to its span with KKT verification, coefficient bounds, and the
//! Monte Carlo sharpness experiment.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::quaddiff::{
    integrate_many, l1_norm, BeltramiField, GridField, Mesh, PolePoint, QuadDiff, QuadratureOptions, Region, Term,
};
use crate::variation::{first_order_value, solve_beltrami, FunctionalSpec, SolverOptions};

type C = Complex64;
const PI: f64 = std::f64::consts::PI;
/// Relative distance below which `ψ₀` is treated as lying in the span.
const DEGENERATE_RATIO: f64 = 1e-9;

/// `ρ_s(z) = (e_s - 1)/((z - 1)(z - e_s))` on the disk.
pub fn rho_basis(e: &[PolePoint]) -> Result<Vec<QuadDiff>> {
    for (i, p) in e.iter().enumerate() {
        if let PolePoint::Finite(z) = p {
            if (*z - 1.0).norm() == 0.0 {
                return Err(precondition("e_s = 1 gives a degenerate kernel"));
            }
        }
        if e[..i].contains(p) {
            return Err(precondition(format!("repeated point {p:?}")));
        }
    }
    e.iter()
        .map(|&p| QuadDiff::new(Region::Disk, vec![Term::PoleBasis { c: C::new(1.0, 0.0), e: p }]))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalOptions {
    /// Quadrature tolerance for the initial mesh.
    pub tol: f64,
    /// KKT acceptance threshold, relative to the basis norms.
    pub kkt_tol: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Mesh refinements attempted when the KKT check fails.
    pub max_refinements: usize,
    pub max_cells: usize,
}

impl Default for ExtremalOptions {
    fn default() -> Self {
        Self { tol: 1e-7, kkt_tol: 1e-4, restarts: 5, seed: 0, max_refinements: 4, max_cells: 400_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// `|⟨|ψ_e|/ψ_e, ρ_s⟩|` for each basis element, then `|⟨|ψ_e|/ψ_e, ψ₀⟩ - d|`.
    pub residuals: Vec<f64>,
    /// `‖ρ_s‖₁`, then `‖ψ₀‖₁`.
    pub scales: Vec<f64>,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshReport {
    pub nodes: usize,
    pub cells: usize,
    pub refinements: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalSolution {
    /// `min ‖ψ₀ - Σ ξ_s ρ_s‖₁`.
    pub d: f64,
    /// Coefficients with `ψ_e = ψ₀ + Σ xi_s ρ_s`.
    pub xi: Vec<C>,
    pub psi_e: QuadDiff,
    pub kkt_residuals: Vec<f64>,
    pub kkt: KktReport,
    /// `d` from each restart.
    pub restart_d: Vec<f64>,
    pub quadrature_report: MeshReport,
}

/// Minimize `ξ ↦ ‖ψ₀ - Σ ξ_s ρ_s‖₁` by IRLS on an adaptive mesh; the mesh is
/// refined until the continuous KKT conditions hold.
pub fn l1_distance_to_span(psi0: &QuadDiff, basis: &[QuadDiff], opts: &ExtremalOptions) -> Result<ExtremalSolution> {
    if psi0.domain() != Region::Disk || basis.iter().any(|b| b.domain() != Region::Disk) {
        return Err(Error::DomainMismatch("extremal problems live on the unit disk".into()));
    }
    let qopts = QuadratureOptions { tol: opts.tol, max_cells: opts.max_cells };
    if basis.is_empty() {
        let d = l1_norm(psi0, qopts)?;
        let kkt = kkt_check_with(psi0, psi0, basis, d.value.re, opts.kkt_tol, qopts)?;
        return Ok(ExtremalSolution {
            d: d.value.re,
            xi: Vec::new(),
            psi_e: psi0.clone(),
            kkt_residuals: kkt.residuals.clone(),
            kkt,
            restart_d: Vec::new(),
            quadrature_report: MeshReport { nodes: 0, cells: d.cells, refinements: 0, tol: opts.tol },
        });
    }
    let mut singular = psi0.singular_points();
    for b in basis {
        singular.extend(b.singular_points());
    }
    let m = basis.len();
    // start from a mesh adapted to ψ₀ and the basis themselves
    let mut mesh = Mesh::build(
        Region::Disk,
        m + 1,
        |z, out| {
            out[0] = psi0.eval(z);
            for (k, b) in basis.iter().enumerate() {
                out[k + 1] = b.eval(z);
            }
        },
        &singular,
        qopts,
    )?;
    let mut tol = opts.tol;
    let mut last_kkt = None;
    for refinement in 0..=opts.max_refinements {
        let (xi_opt, restart_d) = lad_on_mesh(&mesh, psi0, basis, opts)?;
        let xi: Vec<C> = xi_opt.iter().map(|x| -x).collect();
        let psi_e = psi0.combine(&xi, basis)?;
        let best_d = restart_d.iter().copied().fold(f64::INFINITY, f64::min);
        let psi0_mesh = mesh.integrate(|z| C::new(psi0.eval(z).norm(), 0.0)).re;
        if best_d <= DEGENERATE_RATIO * psi0_mesh {
            // ψ₀ lies in the span: ψ_e vanishes and any multiplier of modulus
            // at most one satisfies the optimality conditions
            let scales = basis.iter().map(|_| 0.0).chain([psi0_mesh]).collect();
            let kkt = KktReport { residuals: vec![0.0; m + 1], scales, tol: opts.kkt_tol, passed: true };
            return Ok(ExtremalSolution {
                d: best_d,
                xi,
                kkt_residuals: kkt.residuals.clone(),
                kkt,
                psi_e,
                restart_d,
                quadrature_report: MeshReport { nodes: mesh.len(), cells: mesh.cells, refinements: refinement, tol },
            });
        }
        let qopts = QuadratureOptions { tol, max_cells: opts.max_cells };
        let d = l1_norm(&psi_e, qopts)?.value.re;
        let kkt = kkt_check_with(&psi_e, psi0, basis, d, opts.kkt_tol, qopts)?;
        if kkt.passed {
            return Ok(ExtremalSolution {
                d,
                xi,
                kkt_residuals: kkt.residuals.clone(),
                kkt,
                psi_e,
                restart_d,
                quadrature_report: MeshReport { nodes: mesh.len(), cells: mesh.cells, refinements: refinement, tol },
            });
        }
        last_kkt = Some(kkt);
        // refine for the sign-weighted integrands at the current estimate
        tol *= 0.1;
        let pe = psi_e.clone();
        let mut sing = singular.clone();
        sing.extend(pe.singular_points());
        mesh = Mesh::build(
            Region::Disk,
            m + 1,
            |z, out| {
                let v = pe.eval(z);
                let s = if v.norm() == 0.0 { C::new(0.0, 0.0) } else { C::new(v.norm(), 0.0) / v };
                out[0] = s * psi0.eval(z);
                for (k, b) in basis.iter().enumerate() {
                    out[k + 1] = s * b.eval(z);
                }
            },
            &sing,
            QuadratureOptions { tol, max_cells: opts.max_cells },
        )?;
    }
    Err(Error::KktFailure(format!("{:?}", last_kkt.map(|k| k.residuals))))
}

/// Complex least absolute deviations by iteratively reweighted least
/// squares with a decreasing smoothing parameter, from several starts.
fn lad_on_mesh(
    mesh: &Mesh,
    psi0: &QuadDiff,
    basis: &[QuadDiff],
    opts: &ExtremalOptions,
) -> Result<(Vec<C>, Vec<f64>)> {
    let m = basis.len();
    let a: Vec<C> = mesh.points.par_iter().map(|&z| psi0.eval(z)).collect();
    let b: Vec<Vec<C>> = mesh.points.par_iter().map(|&z| basis.iter().map(|q| q.eval(z)).collect()).collect();
    let w = &mesh.weights;
    let objective = |xi: &[C]| -> f64 {
        (0..a.len())
            .into_par_iter()
            .map(|i| w[i] * residual(&a[i], &b[i], xi).norm())
            .sum()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let mut best: Option<(f64, Vec<C>)> = None;
    let mut ds = Vec::with_capacity(opts.restarts.max(1));
    for r in 0..opts.restarts.max(1) {
        let mut xi: Vec<C> = if r == 0 {
            vec![C::new(0.0, 0.0); m]
        } else {
            (0..m).map(|_| C::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect()
        };
        for eps_exp in 2..=8 {
            let eps = 10f64.powi(-eps_exp) * scale;
            for _ in 0..60 {
                let next = irls_step(&a, &b, w, &xi, eps)?;
                let change = next.iter().zip(&xi).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
                xi = next;
                if change < 1e-13 * (1.0 + xi.iter().map(|v| v.norm()).fold(0.0, f64::max)) {
                    break;
                }
            }
        }
        let d = objective(&xi);
        ds.push(d);
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, xi));
        }
    }
    Ok((best.expect("at least one restart").1, ds))
}

fn residual(a: &C, b: &[C], xi: &[C]) -> C {
    a - b.iter().zip(xi).map(|(p, q)| p * q).sum::<C>()
}

fn irls_step(a: &[C], b: &[Vec<C>], w: &[f64], xi: &[C], eps: f64) -> Result<Vec<C>> {
    let m = xi.len();
    let (g, rhs) = (0..a.len())
        .into_par_iter()
        .fold(
            || (DMatrix::<C>::zeros(m, m), DVector::<C>::zeros(m)),
            |(mut g, mut rhs), i| {
                let r = residual(&a[i], &b[i], xi);
                let om = w[i] / (r.norm_sqr() + eps * eps).sqrt();
                for p in 0..m {
                    let bp = b[i][p].conj() * om;
                    for q in 0..m {
                        g[(p, q)] += bp * b[i][q];
                    }
                    rhs[p] += bp * a[i];
                }
                (g, rhs)
            },
        )
        .reduce(|| (DMatrix::zeros(m, m), DVector::zeros(m)), |x, y| (x.0 + y.0, x.1 + y.1));
    let sol = g
        .lu()
        .solve(&rhs)
        .ok_or(Error::NonConvergence { iterations: 0, residual: f64::INFINITY })?;
    Ok(sol.iter().copied().collect())
}

/// Verify `⟨|ψ_e|/ψ_e, ρ_s⟩ = 0` and `⟨|ψ_e|/ψ_e, ψ₀⟩ = d`.
pub fn kkt_check(sol: &ExtremalSolution, psi0: &QuadDiff, basis: &[QuadDiff], tol: f64) -> Result<KktReport> {
    let qopts = QuadratureOptions::with_tol(1e-9);
    let psi0_norm = l1_norm(psi0, qopts)?.value.re;
    if sol.d <= DEGENERATE_RATIO * psi0_norm {
        // ψ₀ in the span: the sign of ψ_e is rounding noise and the
        // conditions hold with a zero multiplier
        let scales = basis.iter().map(|_| 0.0).chain([psi0_norm]).collect();
        return Ok(KktReport { residuals: vec![0.0; basis.len() + 1], scales, tol, passed: true });
    }
    kkt_check_with(&sol.psi_e, psi0, basis, sol.d, tol, qopts)
}

fn kkt_check_with(
    psi_e: &QuadDiff,
    psi0: &QuadDiff,
    basis: &[QuadDiff],
    d: f64,
    tol: f64,
    opts: QuadratureOptions,
) -> Result<KktReport> {
    let m = basis.len();
    let mut singular = psi_e.singular_points();
    singular.extend(psi0.singular_points());
    for b in basis {
        singular.extend(b.singular_points());
    }
    let pairs = integrate_many(
        Region::Disk,
        2 * (m + 1),
        |z, out| {
            let v = psi_e.eval(z);
            let s = if v.norm() == 0.0 { C::new(0.0, 0.0) } else { C::new(v.norm(), 0.0) / v };
            for (k, b) in basis.iter().enumerate() {
                let bv = b.eval(z);
                out[k] = s * bv;
                out[m + 1 + k] = C::new(bv.norm(), 0.0);
            }
            let p0 = psi0.eval(z);
            out[m] = s * p0;
            out[2 * m + 1] = C::new(p0.norm(), 0.0);
        },
        &singular,
        opts,
    )?;
    let mut residuals: Vec<f64> = pairs[..m].iter().map(|r| r.value.norm()).collect();
    residuals.push((pairs[m].value - d).norm());
    let scales: Vec<f64> = pairs[m + 1..].iter().map(|r| r.value.re).collect();
    let passed = residuals.iter().zip(&scales).all(|(r, s)| *r < tol * s.max(f64::MIN_POSITIVE));
    Ok(KktReport { residuals, scales, tol, passed })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffBound {
    pub bound: f64,
    pub admissible: bool,
}

/// `|a_n| <= 2k/(n-1)`, valid for `k <= 1/(n²+1)`; every `k` when `n = 2`.
pub fn coeff_bound(n: u32, k: f64) -> Result<CoeffBound> {
    if n < 2 {
        return Err(precondition("n must be at least 2"));
    }
    if !(0.0..1.0).contains(&k) {
        return Err(precondition(format!("k = {k} must lie in [0, 1)")));
    }
    let nf = n as f64;
    Ok(CoeffBound { bound: 2.0 * k / (nf - 1.0), admissible: n == 2 || k <= 1.0 / (nf * nf + 1.0) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnBracket {
    pub lower: f64,
    pub upper: f64,
    /// Numerical root of `2k/(n-1) = n k^(n-1)` in `(0, 1)`.
    pub root: f64,
    pub crossing_ok: bool,
}

pub fn kn_bracket(n: u32) -> Result<KnBracket> {
    if n < 3 {
        return Err(precondition("k_n bracket needs n >= 3"));
    }
    let nf = n as f64;
    let lower = 1.0 / (nf * nf + 1.0);
    let upper = (2.0 / (nf * (nf - 1.0))).powf(1.0 / (nf - 2.0));
    // the nonzero root solves 2/(n-1) = n k^(n-2); g is decreasing on (0, 1]
    let g = |k: f64| 2.0 / (nf - 1.0) - nf * k.powi(n as i32 - 2);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    let root = 0.5 * (lo + hi);
    Ok(KnBracket { lower, upper, root, crossing_ok: (root - upper).abs() < 1e-10 })
}

/// `‖J'‖/(‖J'‖ + M + 1)`.
pub fn k0_lower_bound(j_norm: f64, m: f64) -> Result<f64> {
    if !(j_norm > 0.0) || !(m >= 0.0) {
        return Err(precondition("need ‖J'‖ > 0 and M >= 0"));
    }
    Ok(j_norm / (j_norm + m + 1.0))
}

/// First-order minimal dilatation `r/d` for the level `r`.
pub fn min_dilatation_for_level(r: f64, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(precondition("d must be positive"));
    }
    if r < 0.0 {
        return Err(precondition("r must be nonnegative"));
    }
    Ok(r / d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpBoundOptions {
    pub seed: u64,
    /// Pixels per side of the sampling window `[-4, 4]²`.
    pub grid_size: usize,
    /// How many samples (after the Teichmüller field) are also solved.
    pub nonlinear: usize,
    pub quadrature: QuadratureOptions,
}

impl Default for SharpBoundOptions {
    fn default() -> Self {
        Self { seed: 0, grid_size: 128, nonlinear: 0, quadrature: QuadratureOptions::with_tol(1e-9) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpBoundReport {
    pub k: f64,
    pub samples: usize,
    pub psi0_l1: f64,
    /// `(k/π)‖ψ₀‖₁`.
    pub bound: f64,
    /// Same bound with `‖ψ₀‖₁` restricted to the sampled pixels.
    pub discrete_bound: f64,
    /// `|first_order_value|` of the sampled Teichmüller field.
    pub teichmuller_value: f64,
    pub max_sample_value: f64,
    /// Samples exceeding the bound by more than the discretization gap.
    pub violations: usize,
    /// Mean `|μ - μ*|/k` over the support for the best sample.
    pub best_distance: f64,
    /// `max (|Ĵ(μ)| - |Ĵ(μ*)|)⁺ / k²` over the solved samples.
    pub c_estimate: Option<f64>,
}

/// Random fields with `‖μ‖ = k` on the disk, compared with `(k/π)‖ψ₀‖₁`.
pub fn sharp_bound_experiment(
    j: &FunctionalSpec,
    k: f64,
    samples: usize,
    opts: &SharpBoundOptions,
) -> Result<SharpBoundReport> {
    if !(0.0..1.0).contains(&k) || k == 0.0 {
        return Err(precondition("k must lie in (0, 1)"));
    }
    let psi0 = crate::variation::functional_derivative(j)?;
    let psi0_l1 = l1_norm(&psi0, opts.quadrature)?.value.re;
    let bound = k / PI * psi0_l1;
    let n = opts.grid_size;
    let half = 4.0;
    let in_disk = |z: C| z.norm() < 1.0;
    let unimodular = |v: C| if v.norm() == 0.0 { C::new(0.0, 0.0) } else { v / v.norm() };
    let teich = GridField::sample(n, half, 1, |z| if in_disk(z) { unimodular(psi0.eval(z).conj()) * k } else { C::new(0.0, 0.0) })?;
    // μ*·conj(μ*)/k² is the indicator of the sampled pixels
    let pixel_l1 = teich
        .integrate_against(|z| teich.eval(z).conj() * (psi0.eval(z).norm() / (k * k)))
        .value
        .re;
    let discrete_bound = k / PI * pixel_l1;
    let gap = (discrete_bound - bound).max(0.0) + 1e-12;
    let teich_field = BeltramiField::Grid(teich.clone());
    let teichmuller_value = first_order_value(j, &teich_field, opts.quadrature)?.norm();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let fields: Vec<GridField> = (0..samples)
        .map(|_| random_field(&mut rng, n, half, k))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = fields
        .par_iter()
        .map(|g| first_order_value(j, &BeltramiField::Grid(g.clone()), opts.quadrature).map(|v| v.norm()))
        .collect::<Result<_>>()?;
    let violations = values.iter().filter(|&&v| v > bound + gap).count();
    let (best_idx, max_sample_value) =
        values.iter().enumerate().fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let best_distance = fields.get(best_idx).map_or(0.0, |g| {
        let (sum, count) = g
            .samples
            .iter()
            .zip(&teich.samples)
            .filter(|(_, t)| t.norm() != 0.0)
            .fold((0.0, 0usize), |(s, c), (a, b)| (s + (a - b).norm() / k, c + 1));
        sum / count.max(1) as f64
    });

    let c_estimate = if opts.nonlinear > 0 {
        let sopts = SolverOptions::default();
        let solved = |g: &GridField| -> Result<f64> {
            Ok(j.evaluate(&solve_beltrami(&BeltramiField::Grid(g.clone()), &sopts)?).norm())
        };
        let reference = solved(&teich)?;
        let mut c = 0.0f64;
        for g in fields.iter().take(opts.nonlinear) {
            c = c.max((solved(g)? - reference) / (k * k));
        }
        Some(c.max(0.0))
    } else {
        None
    };
    Ok(SharpBoundReport {
        k,
        samples,
        psi0_l1,
        bound,
        discrete_bound,
        teichmuller_value,
        max_sample_value,
        violations,
        best_distance,
        c_estimate,
    })
}

/// Random field on the pixels of the disk with sup norm exactly `k`: either
/// a smooth polynomial in `z, z̄` or a unimodular field with a random phase.
fn random_field(rng: &mut ChaCha8Rng, n: usize, half: f64, k: f64) -> Result<GridField> {
    let coeffs: Vec<C> = (0..6).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let unimodular = rng.random_bool(0.5);
    let poly = |z: C| {
        coeffs[0] + coeffs[1] * z + coeffs[2] * z.conj() + coeffs[3] * z * z + coeffs[4] * z * z.conj() + coeffs[5] * z.conj() * z.conj()
    };
    let raw = GridField::sample(n, half, 1, |z| {
        if z.norm() >= 1.0 {
            return C::new(0.0, 0.0);
        }
        let v = poly(z);
        if unimodular && v.norm() > 0.0 {
            v * (0.5 / v.norm())
        } else {
            v * 1e-3
        }
    })?;
    let sup = raw.samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if sup == 0.0 {
        return Err(Error::NonConvergence { iterations: 0, residual: 0.0 });
    }
    GridField::new(n, raw.spacing, raw.origin, raw.samples.iter().map(|v| v * (k / sup)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn rho_values_and_errors() {
        let b = rho_basis(&[PolePoint::Finite(c(2.0, 0.0)), PolePoint::Infinity]).unwrap();
        assert!((b[0].eval(c(0.0, 0.0)) - c(0.5, 0.0)).norm() < 1e-15);
        let z = c(0.3, -0.2);
        assert!((b[1].eval(z) + (z - 1.0).inv()).norm() < 1e-15);
        // partial fractions
        let e = c(0.5, 1.9);
        let r = rho_basis(&[PolePoint::Finite(e)]).unwrap();
        assert!((r[0].eval(z) - ((z - e).inv() - (z - 1.0).inv())).norm() < 1e-14);
        assert!(rho_basis(&[PolePoint::Finite(c(1.0, 0.0))]).is_err());
        assert!(rho_basis(&[PolePoint::Infinity, PolePoint::Infinity]).is_err());
    }

    #[test]
    fn coeff_bounds() {
        let b = coeff_bound(3, 0.1).unwrap();
        assert!((b.bound - 0.1).abs() < 1e-15 && b.admissible);
        assert_eq!(coeff_bound(5, 0.0).unwrap().bound, 0.0);
        let b = coeff_bound(2, 0.4).unwrap();
        assert!((b.bound - 0.8).abs() < 1e-15 && b.admissible);
        assert!(!coeff_bound(4, 0.2).unwrap().admissible);
        assert!(coeff_bound(1, 0.1).is_err());
        assert!(coeff_bound(3, 1.0).is_err());
    }

    #[test]
    fn kn_brackets() {
        let b = kn_bracket(3).unwrap();
        assert!((b.lower - 0.1).abs() < 1e-15 && (b.upper - 1.0 / 3.0).abs() < 1e-15 && b.crossing_ok);
        let b = kn_bracket(4).unwrap();
        assert!((b.lower - 1.0 / 17.0).abs() < 1e-15);
        assert!((b.upper - (1.0f64 / 6.0).sqrt()).abs() < 1e-15);
        assert!(kn_bracket(2).is_err());
    }

    #[test]
    fn k0_and_min_dilatation() {
        assert!((k0_lower_bound(1.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let seq: Vec<f64> = [1.0, 10.0, 100.0, 1e4].iter().map(|&j| k0_lower_bound(j, 0.0).unwrap()).collect();
        assert!(seq.windows(2).all(|w| w[1] > w[0]) && seq[3] < 1.0 && seq[3] > 0.999);
        assert!(k0_lower_bound(0.0, 1.0).is_err());
        assert!((min_dilatation_for_level(0.05, 1.0).unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(min_dilatation_for_level(0.0, 2.0).unwrap(), 0.0);
        assert!(min_dilatation_for_level(0.1, 0.0).is_err());
    }

    #[test]
    fn distance_trivial_cases() {
        let one = QuadDiff::monomial(Region::Disk, c(1.0, 0.0), 0).unwrap();
        let sol = l1_distance_to_span(&one, &[], &ExtremalOptions::default()).unwrap();
        assert!((sol.d - PI).abs() < 1e-7 && sol.kkt.passed);
        let rho = rho_basis(&[PolePoint::Finite(c(2.0, 0.0))]).unwrap();
        let psi0 = rho[0].scale(c(0.3, -0.7));
        let sol = l1_distance_to_span(&psi0, &rho, &ExtremalOptions::default()).unwrap();
        assert!(sol.d < 1e-6, "{}", sol.d);
    }

    #[test]
    fn constant_against_z() {
        let one = QuadDiff::monomial(Region::Disk, c(1.0, 0.0), 0).unwrap();
        let z = QuadDiff::monomial(Region::Disk, c(1.0, 0.0), 1).unwrap();
        let sol = l1_distance_to_span(&one, std::slice::from_ref(&z), &ExtremalOptions::default()).unwrap();
        assert!((sol.d - PI).abs() < 1e-6, "{sol:?}");
        assert!(sol.xi[0].norm() < 1e-4);
        let kkt = kkt_check(&sol, &one, &[z], 1e-6).unwrap();
        assert!(kkt.passed, "{kkt:?}");
    }
}
