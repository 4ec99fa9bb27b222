//! Integrable holomorphic quadratic differentials on the disk or its
//! exterior, Beltrami coefficients, and the pairing between them.

mod a1;
mod beltrami;
pub mod quadrature;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
pub use a1::{a1sq_from_vector, alpha_d, omega_coefficients, AlphaEstimate, AlphaOptions};
pub use beltrami::{pairing, teich_beltrami, BeltramiField, GridField};
pub use quadrature::{integrate, integrate_many, Mesh, QuadratureOptions, QuadratureReport, Region};

type C = Complex64;

/// Location of the second pole of a `ρ` basis element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub enum PolePoint {
    Finite(C),
    Infinity,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawPoint {
    Finite(C),
    Named(String),
}

impl TryFrom<RawPoint> for PolePoint {
    type Error = String;

    fn try_from(raw: RawPoint) -> std::result::Result<Self, String> {
        match raw {
            RawPoint::Finite(c) => Ok(PolePoint::Finite(c)),
            RawPoint::Named(s) if s == "inf" => Ok(PolePoint::Infinity),
            RawPoint::Named(s) => Err(format!("expected [re, im] or \"inf\", got {s:?}")),
        }
    }
}

impl From<PolePoint> for RawPoint {
    fn from(p: PolePoint) -> Self {
        match p {
            PolePoint::Finite(c) => RawPoint::Finite(c),
            PolePoint::Infinity => RawPoint::Named("inf".into()),
        }
    }
}

fn one() -> C {
    C::new(1.0, 0.0)
}

fn one_u32() -> u32 {
    1
}

/// One summand of a quadratic differential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Term {
    /// `c z^p`
    Monomial { c: C, p: i32 },
    /// `c / (z - a)^order`
    Pole {
        c: C,
        a: C,
        #[serde(default = "one_u32")]
        order: u32,
    },
    /// `c (e - 1)/((z - 1)(z - e))`, or `-c/(z - 1)` for `e = ∞`.
    PoleBasis {
        #[serde(default = "one")]
        c: C,
        e: PolePoint,
    },
}

impl Term {
    pub fn eval(&self, z: C) -> C {
        match *self {
            Term::Monomial { c, p } => c * z.powi(p),
            Term::Pole { c, a, order } => c / (z - a).powi(order as i32),
            Term::PoleBasis { c, e: PolePoint::Finite(e) } => c * (e - 1.0) / ((z - 1.0) * (z - e)),
            Term::PoleBasis { c, e: PolePoint::Infinity } => -c / (z - 1.0),
        }
    }

    fn coefficient_scale(&self) -> f64 {
        match *self {
            Term::Monomial { c, .. } | Term::Pole { c, .. } | Term::PoleBasis { c, .. } => c.norm(),
        }
    }

    fn is_finite(&self) -> bool {
        let ok = |c: C| c.re.is_finite() && c.im.is_finite();
        match *self {
            Term::Monomial { c, .. } => ok(c),
            Term::Pole { c, a, .. } => ok(c) && ok(a),
            Term::PoleBasis { c, e: PolePoint::Finite(e) } => ok(c) && ok(e),
            Term::PoleBasis { c, .. } => ok(c),
        }
    }
}

/// `ψ = Σ terms` on `domain`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQuadDiff")]
pub struct QuadDiff {
    domain: Region,
    terms: Vec<Term>,
}

#[derive(Deserialize)]
struct RawQuadDiff {
    domain: Region,
    terms: Vec<Term>,
}

impl TryFrom<RawQuadDiff> for QuadDiff {
    type Error = Error;

    fn try_from(raw: RawQuadDiff) -> Result<Self> {
        QuadDiff::new(raw.domain, raw.terms)
    }
}

/// Slack for deciding whether a point lies on the closed domain.
const ON_DOMAIN: f64 = 1e-12;

impl QuadDiff {
    /// Validates that every term is finite and that the sum is integrable.
    pub fn new(domain: Region, terms: Vec<Term>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| !t.is_finite()) {
            return Err(Error::Input(format!("non-finite parameter in {t:?}")));
        }
        for t in &terms {
            if let Term::PoleBasis { e: PolePoint::Finite(e), .. } = t {
                if (*e - 1.0).norm() == 0.0 {
                    return Err(precondition("ρ basis point e = 1 is degenerate"));
                }
            }
            if let Term::Pole { order: 0, .. } = t {
                return Err(Error::Input("pole order must be at least 1".into()));
            }
        }
        let q = Self { domain, terms };
        q.check_integrable()?;
        Ok(q)
    }

    fn check_integrable(&self) -> Result<()> {
        for t in &self.terms {
            if t.coefficient_scale() == 0.0 {
                continue;
            }
            match (self.domain, t) {
                (Region::Disk, Term::Monomial { p, .. }) if *p <= -2 => {
                    return Err(Error::NonIntegrable(format!("z^{p} near 0")));
                }
                (Region::Disk, Term::Pole { a, order, .. })
                    if *order >= 2 && a.norm() <= 1.0 + ON_DOMAIN =>
                {
                    return Err(Error::NonIntegrable(format!("pole of order {order} at {a}")));
                }
                (Region::Exterior, Term::Pole { a, order, .. })
                    if *order >= 2 && a.norm() >= 1.0 - ON_DOMAIN =>
                {
                    return Err(Error::NonIntegrable(format!("pole of order {order} at {a}")));
                }
                _ => {}
            }
        }
        if self.domain == Region::Exterior {
            // needs ψ = O(z^-3) at ∞
            let scale = self.terms.iter().map(Term::coefficient_scale).fold(0.0, f64::max);
            for (p, c) in self.expansion_at_infinity() {
                if c.norm() > 1e-12 * scale.max(1.0) {
                    return Err(Error::NonIntegrable(format!(
                        "coefficient {c} of z^{p} at infinity"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Coefficients of powers `>= -2` in the expansion at ∞.
    fn expansion_at_infinity(&self) -> Vec<(i32, C)> {
        let top = self
            .terms
            .iter()
            .filter_map(|t| match t {
                Term::Monomial { p, .. } => Some(*p),
                _ => None,
            })
            .fold(-1, i32::max);
        let mut coeffs = vec![C::new(0.0, 0.0); (top + 3) as usize];
        let mut add = |p: i32, c: C| {
            if p >= -2 {
                coeffs[(p + 2) as usize] += c;
            }
        };
        for t in &self.terms {
            match *t {
                Term::Monomial { c, p } => add(p, c),
                Term::Pole { c, a, order: 1 } => {
                    add(-1, c);
                    add(-2, c * a);
                }
                Term::Pole { c, order: 2, .. } => add(-2, c),
                Term::Pole { .. } => {}
                Term::PoleBasis { c, e: PolePoint::Finite(e) } => add(-2, c * (e - 1.0)),
                Term::PoleBasis { c, e: PolePoint::Infinity } => {
                    add(-1, -c);
                    add(-2, -c);
                }
            }
        }
        coeffs.into_iter().enumerate().map(|(i, c)| (i as i32 - 2, c)).collect()
    }

    pub fn domain(&self) -> Region {
        self.domain
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn eval(&self, z: C) -> C {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    /// `c z^p` on the domain.
    pub fn monomial(domain: Region, c: C, p: i32) -> Result<Self> {
        Self::new(domain, vec![Term::Monomial { c, p }])
    }

    pub fn zero(domain: Region) -> Self {
        Self { domain, terms: Vec::new() }
    }

    /// True when no term carries a nonzero coefficient.
    pub fn is_trivially_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coefficient_scale() == 0.0)
    }

    pub fn scale(&self, s: C) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match *t {
                Term::Monomial { c, p } => Term::Monomial { c: c * s, p },
                Term::Pole { c, a, order } => Term::Pole { c: c * s, a, order },
                Term::PoleBasis { c, e } => Term::PoleBasis { c: c * s, e },
            })
            .collect();
        Self { domain: self.domain, terms }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch("quadratic differentials on different domains".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(self.domain, terms)
    }

    /// `self + Σ s_k b_k`.
    pub fn combine(&self, coeffs: &[C], basis: &[QuadDiff]) -> Result<Self> {
        let mut out = self.clone();
        for (s, b) in coeffs.iter().zip(basis) {
            out = out.add(&b.scale(*s))?;
        }
        Ok(out)
    }

    /// Points of the closed domain where the integrand may be singular.
    pub fn singular_points(&self) -> Vec<C> {
        let near = |a: C| match self.domain {
            Region::Disk => a.norm() <= 1.0 + ON_DOMAIN,
            Region::Exterior => a.norm() >= 1.0 - ON_DOMAIN,
        };
        let mut out = Vec::new();
        for t in &self.terms {
            match *t {
                Term::Monomial { p, .. } if p < 0 && self.domain == Region::Disk => out.push(C::new(0.0, 0.0)),
                Term::Monomial { .. } => {}
                Term::Pole { a, .. } => {
                    if near(a) {
                        out.push(a)
                    }
                }
                Term::PoleBasis { e, .. } => {
                    out.push(C::new(1.0, 0.0));
                    if let PolePoint::Finite(e) = e {
                        if near(e) {
                            out.push(e);
                        }
                    }
                }
            }
        }
        out
    }
}

/// `∬ |ψ|` over the domain of `ψ`.
pub fn l1_norm(psi: &QuadDiff, opts: QuadratureOptions) -> Result<QuadratureReport> {
    integrate(psi.domain, |z| psi.eval(z).norm().into(), &psi.singular_points(), opts)
}
