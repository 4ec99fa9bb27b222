//! First-order quasiconformal variation.
//!
//! For a Beltrami coefficient `μ` supported in the unit disk, the normalized
//! solution satisfies
//!
//! ```text
//! f(z) = z - (1/π) ∬ μ(ζ) K(ζ, z) dξ dη + O(‖μ‖²)
//! ```
//!
//! with `K = 1/(ζ - z)` under the hydrodynamic normalization and
//! `K = 1/(ζ - z) - 1/(ζ - 1)` when `f(1) = 1` is also imposed. A
//! point-evaluation functional `J` then varies by `-(1/π)⟨μ, ψ₀⟩` where
//! `ψ₀` is assembled term by term from derivatives of `K`.

mod solver;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::quaddiff::{
    integrate, pairing, BeltramiField, QuadDiff, QuadratureOptions, QuadratureReport, Region, Term,
};
pub use solver::{circle_fit, solve_beltrami, to_grid, BeltramiSolution, GridDump, SolverOptions, MIN_PADDING};

type C = Complex64;
const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `f(z) = z + O(1)` at ∞.
    #[default]
    Hydrodynamic,
    /// Hydrodynamic and `f(1) = 1`.
    UnitPoint,
}

/// `weight · f^(order)(point)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalTerm {
    pub point: C,
    #[serde(default)]
    pub order: u32,
    pub weight: C,
}

/// Linear part of a distortion functional at the identity:
/// `Ĵ(f) = Σ weight · (f^(s)(z_j) - id^(s)(z_j))`.
///
/// Points with `|z| > 1` lie in the conformality domain and may carry any
/// derivative order; a point with `|z| < 1` is an interior evaluation and
/// must have order 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct FunctionalSpec {
    terms: Vec<FunctionalTerm>,
    normalization: Normalization,
}

#[derive(Deserialize)]
struct RawSpec {
    terms: Vec<FunctionalTerm>,
    #[serde(default)]
    normalization: Normalization,
}

impl TryFrom<RawSpec> for FunctionalSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        FunctionalSpec::new(raw.terms, raw.normalization)
    }
}

impl FunctionalSpec {
    pub fn new(terms: Vec<FunctionalTerm>, normalization: Normalization) -> Result<Self> {
        if terms.iter().all(|t| t.weight.norm() == 0.0) {
            return Err(precondition("functional has no nonzero weight"));
        }
        for t in &terms {
            let r = t.point.norm();
            if !r.is_finite() || !t.weight.re.is_finite() || !t.weight.im.is_finite() {
                return Err(Error::Input(format!("non-finite functional term {t:?}")));
            }
            if (r - 1.0).abs() < 1e-12 {
                return Err(precondition(format!("point {} lies on the unit circle", t.point)));
            }
            if r < 1.0 && t.order > 0 {
                return Err(precondition(format!(
                    "interior point {} only supports order 0",
                    t.point
                )));
            }
        }
        Ok(Self { terms, normalization })
    }

    /// The coefficient `b_n` of `z^-n`, as the trapezoidal Cauchy integral
    /// `(1/M) Σ f(z_k) z_k^n` over `M` points on `|z| = radius`.
    pub fn coefficient(n: u32, radius: f64, points: usize) -> Result<Self> {
        if radius <= 1.0 || points == 0 {
            return Err(precondition("coefficient functional needs radius > 1"));
        }
        let terms = (0..points)
            .map(|k| {
                let z = C::from_polar(radius, std::f64::consts::TAU * k as f64 / points as f64);
                FunctionalTerm { point: z, order: 0, weight: z.powi(n as i32) / points as f64 }
            })
            .collect();
        Self::new(terms, Normalization::Hydrodynamic)
    }

    pub fn terms(&self) -> &[FunctionalTerm] {
        &self.terms
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn with_normalization(mut self, n: Normalization) -> Self {
        self.normalization = n;
        self
    }

    /// `Ĵ` evaluated on a solved map.
    pub fn evaluate(&self, sol: &BeltramiSolution) -> C {
        self.terms
            .iter()
            .map(|t| {
                let id = match t.order {
                    0 => t.point,
                    1 => C::new(1.0, 0.0),
                    _ => C::new(0.0, 0.0),
                };
                t.weight * (sol.derivative(t.point, t.order) - id)
            })
            .sum()
    }
}

/// `ψ₀(ζ) = Σ w s!/(ζ - z_j)^(s+1)`, minus `w/(ζ - 1)` for each order-0 term
/// under the `f(1) = 1` normalization.
pub fn functional_derivative(j: &FunctionalSpec) -> Result<QuadDiff> {
    let mut terms = Vec::with_capacity(j.terms.len() + 1);
    let mut at_one = C::new(0.0, 0.0);
    for t in &j.terms {
        let fact: f64 = (1..=t.order).map(|k| k as f64).product();
        terms.push(Term::Pole { c: t.weight * fact, a: t.point, order: t.order + 1 });
        if t.order == 0 {
            at_one += t.weight;
        }
    }
    if j.normalization == Normalization::UnitPoint && at_one.norm() != 0.0 {
        terms.push(Term::Pole { c: -at_one, a: C::new(1.0, 0.0), order: 1 });
    }
    QuadDiff::new(Region::Disk, terms)
}

/// `⟨μ, ψ⟩` for a kernel `ψ` that may have poles off the disk. Grid fields
/// are integrated over their own pixels.
fn pair_kernel(mu: &BeltramiField, psi: &QuadDiff, opts: QuadratureOptions) -> Result<QuadratureReport> {
    match mu {
        BeltramiField::Grid(g) => Ok(g.integrate_against(|z| psi.eval(z))),
        BeltramiField::Teichmuller { psi: phi, .. } if phi.domain() != Region::Disk => {
            Err(precondition("first-order formulas need μ supported in the unit disk"))
        }
        _ => pairing(mu, psi, opts),
    }
}

/// `-(1/π)⟨μ, ψ₀⟩`, the first-order change of `J` under `μ`.
pub fn first_order_value(j: &FunctionalSpec, mu: &BeltramiField, opts: QuadratureOptions) -> Result<C> {
    let psi0 = functional_derivative(j)?;
    if let BeltramiField::Grid(g) = mu {
        for t in j.terms.iter().filter(|t| t.point.norm() > 1.0) {
            if g.distance_to_support(t.point) <= g.pixel_radius() {
                return Err(precondition(format!("point {} meets the support of μ", t.point)));
            }
        }
    }
    Ok(pair_kernel(mu, &psi0, opts)?.value * (-1.0 / PI))
}

/// `z - (1/π) ∬ μ(ζ) K(ζ, z)`, for `z` off the support of `μ`.
pub fn first_order_map(
    mu: &BeltramiField,
    z: C,
    normalization: Normalization,
    opts: QuadratureOptions,
) -> Result<C> {
    let outside = match mu {
        BeltramiField::Grid(g) => g.distance_to_support(z) > g.pixel_radius(),
        other => match other.region() {
            Some(Region::Disk) => z.norm() > 1.0,
            _ => return Err(precondition("first-order map needs μ supported in the unit disk")),
        },
    };
    if !outside {
        return Err(precondition(format!("z = {z} lies in the support of μ")));
    }
    let mut terms = vec![Term::Pole { c: C::new(1.0, 0.0), a: z, order: 1 }];
    if normalization == Normalization::UnitPoint {
        terms.push(Term::Pole { c: C::new(-1.0, 0.0), a: C::new(1.0, 0.0), order: 1 });
    }
    let kernel = QuadDiff::new(Region::Disk, terms)?;
    Ok(z - pair_kernel(mu, &kernel, opts)?.value / PI)
}

/// `Re ∬ ψ |φ|/φ`, the derivative at `t = 0` of `t ↦ ‖φ + tψ‖₁`.
pub fn l1_directional_derivative(
    phi: &QuadDiff,
    psi: &QuadDiff,
    opts: QuadratureOptions,
) -> Result<QuadratureReport> {
    if phi.domain() != psi.domain() {
        return Err(Error::DomainMismatch("φ and ψ live on different domains".into()));
    }
    if phi.is_trivially_zero() {
        return Err(precondition("φ vanishes identically"));
    }
    let mut singular = phi.singular_points();
    singular.extend(psi.singular_points());
    let r = integrate(
        phi.domain(),
        |z| {
            let p = phi.eval(z);
            let n = p.norm();
            if n == 0.0 {
                C::new(0.0, 0.0)
            } else {
                C::new((psi.eval(z) * n / p).re, 0.0)
            }
        },
        &singular,
        opts,
    )?;
    Ok(r)
}
