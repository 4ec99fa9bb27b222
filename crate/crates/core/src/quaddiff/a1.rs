use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::beltrami::BeltramiField;
use super::quadrature::{integrate_many, QuadratureOptions, Region};
use super::{QuadDiff, Term};
use crate::error::{precondition, Error, Result};
use crate::linalg::top_right_singular_vector;

type C = Complex64;
const PI: f64 = std::f64::consts::PI;

/// Coefficients of `ω(z) = π^-1/2 Σ √m x_m z^(m-1)`, lowest power first.
pub fn omega_coefficients(x: &[C]) -> Vec<C> {
    let s = PI.sqrt().recip();
    x.iter().enumerate().map(|(i, xm)| xm * ((i + 1) as f64).sqrt() * s).collect()
}

/// `ψ(z) = π^-1 Σ √(mn) x_m x_n z^(m+n-2)`, which equals `ω²`.
pub fn a1sq_from_vector(x: &[C]) -> QuadDiff {
    let k = x.len();
    let mut coeffs = vec![C::new(0.0, 0.0); (2 * k).saturating_sub(1)];
    for m in 0..k {
        for n in 0..k {
            coeffs[m + n] += x[m] * x[n] * (((m + 1) * (n + 1)) as f64).sqrt() / PI;
        }
    }
    let terms = coeffs
        .into_iter()
        .enumerate()
        .filter(|(_, c)| c.norm() != 0.0)
        .map(|(p, c)| Term::Monomial { c, p: p as i32 })
        .collect();
    QuadDiff::new(Region::Disk, terms).expect("polynomials are integrable on the disk")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub quadrature: QuadratureOptions,
}

impl Default for AlphaOptions {
    fn default() -> Self {
        Self { restarts: 8, seed: 0, max_iter: 2000, quadrature: QuadratureOptions::with_tol(1e-10) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    /// Largest certified `|⟨μ, ψ_x⟩|/‖ψ_x‖₁`.
    pub value: f64,
    /// Maximizing vector, `‖x‖ = 1`.
    pub x: Vec<C>,
    /// Value reached from each random start.
    pub restart_values: Vec<f64>,
}

/// `sup |⟨μ, ψ_x⟩|` over `ψ_x = a1sq_from_vector(x)` with `‖x‖ = 1` and
/// `x` supported in the first `basis_size` indices.
///
/// `⟨μ, ψ_x⟩ = xᵀMx` for the symmetric moment matrix
/// `M_mn = π^-1 √(mn) ⟨μ, z^(m+n-2)⟩` and `‖ψ_x‖₁ = ‖x‖²`, so each iterate
/// gives a certified lower bound. The iteration `x ← conj(Mx)/‖Mx‖` is
/// projected gradient ascent with full step.
pub fn alpha_d(mu: &BeltramiField, basis_size: usize, opts: &AlphaOptions) -> Result<AlphaEstimate> {
    if basis_size == 0 {
        return Err(precondition("basis_size must be positive"));
    }
    let moments = disk_moments(mu, 2 * basis_size - 1, opts.quadrature)?;
    let m = DMatrix::from_fn(basis_size, basis_size, |i, j| {
        moments[i + j] * (((i + 1) * (j + 1)) as f64).sqrt() / PI
    });
    let value_of = |x: &DVector<C>| (x.transpose() * &m * x)[(0, 0)].norm();
    let ascend = |mut x: DVector<C>| {
        x /= C::new(x.norm(), 0.0);
        let mut best = value_of(&x);
        for _ in 0..opts.max_iter {
            let y = (&m * &x).conjugate();
            let n = y.norm();
            if n == 0.0 {
                break;
            }
            let next = y / C::new(n, 0.0);
            let v = value_of(&next);
            x = next;
            if v - best <= 1e-15 * v.max(1.0) {
                best = best.max(v);
                break;
            }
            best = v;
        }
        (best, x)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut restart_values = Vec::with_capacity(opts.restarts);
    let mut best = (0.0, DVector::from_element(basis_size, C::new(0.0, 0.0)));
    best.1[0] = C::new(1.0, 0.0);
    for _ in 0..opts.restarts {
        let x0 = DVector::from_fn(basis_size, |_, _| {
            C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let (v, x) = ascend(x0);
        restart_values.push(v);
        if v > best.0 {
            best = (v, x);
        }
    }
    // start from the top singular vector as well; this reaches σ_max
    if let Some((_, v)) = top_right_singular_vector(&m) {
        let (val, x) = ascend(v.conjugate());
        if val > best.0 {
            best = (val, x);
        }
    }
    Ok(AlphaEstimate { value: best.0, x: best.1.iter().copied().collect(), restart_values })
}

/// `⟨μ, z^j⟩` over the disk for `j < count`.
fn disk_moments(mu: &BeltramiField, count: usize, opts: QuadratureOptions) -> Result<Vec<C>> {
    match mu {
        BeltramiField::Grid(g) => {
            if !g.supported_in(Region::Disk) {
                return Err(Error::DomainMismatch("μ must be supported in the unit disk".into()));
            }
            Ok((0..count).map(|j| g.integrate_against(|z| z.powi(j as i32)).value).collect())
        }
        other => {
            if other.region() != Some(Region::Disk) {
                return Err(Error::DomainMismatch("μ must be supported in the unit disk".into()));
            }
            let singular = match other {
                BeltramiField::Teichmuller { psi, .. } => psi.singular_points(),
                _ => Vec::new(),
            };
            let f = |z: C, out: &mut [C]| {
                let v = other.eval(z);
                let mut p = C::new(1.0, 0.0);
                for slot in out.iter_mut() {
                    *slot = v * p;
                    p *= z;
                }
            };
            Ok(integrate_many(Region::Disk, count, f, &singular, opts)?.into_iter().map(|r| r.value).collect())
        }
    }
}
