//! Truncated Laurent series with complex coefficients.
//!
//! A series carries an explicit window `lo..=hi` of retained powers of `z`.
//! Interior series (class S, expansion at the origin) are exact below `lo`
//! and truncated above `hi`; exterior series (class Σ, expansion at ∞) are
//! exact above `hi` and truncated below `lo`. Arithmetic propagates the
//! window so that truncation error never shows up as a coefficient.

mod catalog;
mod power;

pub(crate) use power::PowerSeries;

pub use catalog::{homotopy, koebe_qc, sqrt_transform, univalent_catalog, CatalogMap};

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C = Complex64;

/// Default number of retained powers.
pub const DEFAULT_TRUNCATION: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// Expansion in `z` around 0.
    Interior,
    /// Expansion in `1/z` around ∞.
    Exterior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries")]
pub struct LaurentSeries {
    domain: Domain,
    lo: i32,
    hi: i32,
    coeffs: Vec<C>,
}

#[derive(Deserialize)]
struct RawSeries {
    domain: Domain,
    lo: i32,
    hi: i32,
    coeffs: Vec<C>,
}

impl TryFrom<RawSeries> for LaurentSeries {
    type Error = Error;

    fn try_from(raw: RawSeries) -> Result<Self> {
        let expected = (raw.hi - raw.lo + 1).max(0) as usize;
        if raw.coeffs.len() != expected {
            return Err(Error::Input(format!(
                "series window {}..={} needs {} coefficients, found {}",
                raw.lo,
                raw.hi,
                expected,
                raw.coeffs.len()
            )));
        }
        if raw.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Input("non-finite coefficient".into()));
        }
        Ok(Self { domain: raw.domain, lo: raw.lo, hi: raw.hi, coeffs: raw.coeffs })
    }
}

#[allow(clippy::should_implement_trait)]
impl LaurentSeries {
    /// Series with coefficients for powers `lo, lo+1, ...`.
    pub fn new(domain: Domain, lo: i32, coeffs: Vec<C>) -> Self {
        let hi = lo + coeffs.len() as i32 - 1;
        Self { domain, lo, hi, coeffs }
    }

    /// `z + b[0] + b[1]/z + ... ` retaining powers down to `z^-trunc`.
    pub fn sigma(b: &[C], trunc: usize) -> Self {
        assert!(b.len() <= trunc + 1, "more coefficients than the truncation retains");
        let lo = -(trunc as i32);
        let mut coeffs = vec![C::new(0.0, 0.0); trunc + 2];
        // index of power p is p - lo
        coeffs[(1 - lo) as usize] = C::new(1.0, 0.0);
        for (n, bn) in b.iter().enumerate() {
            coeffs[(-(n as i32) - lo) as usize] = *bn;
        }
        Self::new(Domain::Exterior, lo, coeffs)
    }

    /// `z + a[0] z^2 + a[1] z^3 + ...` retaining powers up to `z^trunc`.
    pub fn class_s(a: &[C], trunc: usize) -> Self {
        assert!(a.len() < trunc, "more coefficients than the truncation retains");
        let mut coeffs = vec![C::new(0.0, 0.0); trunc];
        coeffs[0] = C::new(1.0, 0.0);
        for (i, ai) in a.iter().enumerate() {
            coeffs[i + 1] = *ai;
        }
        Self::new(Domain::Interior, 1, coeffs)
    }

    /// The identity map `z` in the requested domain.
    pub fn identity(domain: Domain, trunc: usize) -> Self {
        match domain {
            Domain::Exterior => Self::sigma(&[], trunc),
            Domain::Interior => Self::class_s(&[], trunc),
        }
    }

    /// `c z^p` with the window of a series of the given truncation.
    pub fn monomial(domain: Domain, c: C, p: i32, trunc: usize) -> Self {
        let (lo, hi) = match domain {
            Domain::Exterior => (-(trunc as i32), p.max(-(trunc as i32))),
            Domain::Interior => (p.min(trunc as i32), trunc as i32),
        };
        let mut s = Self::new(domain, lo, vec![C::new(0.0, 0.0); (hi - lo + 1).max(0) as usize]);
        if p >= lo && p <= hi {
            s.coeffs[(p - lo) as usize] = c;
        }
        s
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.hi
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Whether the coefficient of `z^p` is determined by the series.
    pub fn is_known(&self, p: i32) -> bool {
        match self.domain {
            Domain::Exterior => p >= self.lo,
            Domain::Interior => p <= self.hi,
        }
    }

    /// Coefficient of `z^p`; zero outside the retained window.
    pub fn coeff(&self, p: i32) -> C {
        if p < self.lo || p > self.hi {
            C::new(0.0, 0.0)
        } else {
            self.coeffs[(p - self.lo) as usize]
        }
    }

    /// Truncation index: lowest known power for exterior series, highest for
    /// interior ones.
    pub fn order(&self) -> i32 {
        match self.domain {
            Domain::Exterior => self.lo,
            Domain::Interior => self.hi,
        }
    }

    pub(crate) fn to_power(&self) -> PowerSeries {
        match self.domain {
            Domain::Interior => PowerSeries::new(self.lo, self.coeffs.clone()),
            Domain::Exterior => {
                PowerSeries::new(-self.hi, self.coeffs.iter().rev().copied().collect())
            }
        }
    }

    pub(crate) fn from_power(domain: Domain, p: PowerSeries) -> Self {
        match domain {
            Domain::Interior => Self::new(domain, p.val, p.coeffs),
            Domain::Exterior => {
                let lo = 1 - p.prec();
                let coeffs: Vec<C> = p.coeffs.into_iter().rev().collect();
                Self::new(domain, lo, coeffs)
            }
        }
    }

    fn check_domain(&self, other: &Self) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch(format!(
                "{:?} series combined with {:?} series",
                self.domain, other.domain
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_domain(other)?;
        Ok(Self::from_power(self.domain, self.to_power().add(&other.to_power())))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_domain(other)?;
        Ok(Self::from_power(self.domain, self.to_power().mul(&other.to_power())))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_domain(other)?;
        let inv = other.to_power().recip()?;
        Ok(Self::from_power(self.domain, self.to_power().mul(&inv)))
    }

    pub fn recip(&self) -> Result<Self> {
        Ok(Self::from_power(self.domain, self.to_power().recip()?))
    }

    pub fn scale(&self, c: C) -> Self {
        Self { coeffs: self.coeffs.iter().map(|x| x * c).collect(), ..self.clone() }
    }

    /// Add an exact constant.
    pub fn add_constant(&self, c: C) -> Result<Self> {
        let p = self.to_power();
        if p.prec() <= 0 {
            return Err(Error::InsufficientTruncation(
                "constant term lies in the truncated range".into(),
            ));
        }
        Ok(Self::from_power(self.domain, p.add(&PowerSeries::constant(c, p.prec()))))
    }

    /// Derivative in `z`.
    pub fn derivative(&self) -> Self {
        let coeffs: Vec<C> = (self.lo..=self.hi).map(|p| self.coeff(p) * p as f64).collect();
        match self.domain {
            // d/dz z^p = p z^(p-1); window shifts down by one. The unknown
            // tail below lo stays below lo - 1.
            Domain::Exterior | Domain::Interior => Self::new(self.domain, self.lo - 1, coeffs),
        }
        .trim_interior_constant()
    }

    fn trim_interior_constant(mut self) -> Self {
        // An interior series starting at power 0 loses its constant:
        // d/dz of z^0 contributes a zero coefficient at z^-1, drop it.
        if self.domain == Domain::Interior && self.lo == -1 && self.coeffs.first() == Some(&C::new(0.0, 0.0)) {
            self.coeffs.remove(0);
            self.lo = 0;
        }
        self
    }

    /// Substitute `z -> z^k` for `k >= 1`.
    pub fn compose_monomial(&self, k: u32) -> Self {
        assert!(k >= 1);
        let k = k as i32;
        let (lo, hi) = match self.domain {
            Domain::Exterior => (k * self.lo - (k - 1), k * self.hi),
            Domain::Interior => (k * self.lo, k * self.hi + (k - 1)),
        };
        let mut coeffs = vec![C::new(0.0, 0.0); (hi - lo + 1).max(0) as usize];
        for p in self.lo..=self.hi {
            coeffs[(k * p - lo) as usize] = self.coeff(p);
        }
        Self::new(self.domain, lo, coeffs)
    }

    /// Substitute `z -> s z` (coefficient of `z^p` scales by `s^p`).
    pub fn rescale_argument(&self, s: C) -> Self {
        let coeffs = (self.lo..=self.hi).map(|p| self.coeff(p) * s.powi(p)).collect();
        Self::new(self.domain, self.lo, coeffs)
    }

    /// Evaluate the retained terms at `z` (Horner in the expansion variable).
    pub fn eval(&self, z: C) -> C {
        match self.domain {
            Domain::Interior => {
                let mut acc = C::new(0.0, 0.0);
                for c in self.coeffs.iter().rev() {
                    acc = acc * z + c;
                }
                acc * z.powi(self.lo)
            }
            Domain::Exterior => {
                let w = C::new(1.0, 0.0) / z;
                let mut acc = C::new(0.0, 0.0);
                for c in self.coeffs.iter() {
                    acc = acc * w + c;
                }
                acc * z.powi(self.hi)
            }
        }
    }

    /// Magnitude of the last `count` retained terms at radius `r`: a cheap
    /// indicator of whether the truncated tail is negligible there.
    pub fn tail_magnitude(&self, r: f64, count: usize) -> f64 {
        let n = self.coeffs.len();
        let range: Vec<i32> = match self.domain {
            Domain::Exterior => (self.lo..self.lo + count.min(n) as i32).collect(),
            Domain::Interior => (self.hi + 1 - count.min(n) as i32..=self.hi).collect(),
        };
        range.into_iter().map(|p| self.coeff(p).norm() * r.powi(p)).fold(0.0, f64::max)
    }

    /// Whether this is a normalized class-Σ expansion `z + b0 + b1/z + ...`.
    pub fn is_class_sigma(&self) -> bool {
        self.domain == Domain::Exterior
            && self.hi == 1
            && (self.coeff(1) - C::new(1.0, 0.0)).norm() == 0.0
    }

    /// Whether this is a normalized class-S expansion `z + a2 z^2 + ...`.
    pub fn is_class_s(&self) -> bool {
        self.domain == Domain::Interior
            && self.lo == 1
            && (self.coeff(1) - C::new(1.0, 0.0)).norm() == 0.0
    }

    /// `b_n`, the coefficient of `z^-n`, for a class-Σ series.
    pub fn b(&self, n: i32) -> C {
        self.coeff(-n)
    }

    /// Maximum coefficient discrepancy over the common known window.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let (lo, hi) = match self.domain {
            Domain::Exterior => (self.lo.max(other.lo), self.hi.max(other.hi)),
            Domain::Interior => (self.lo.min(other.lo), self.hi.min(other.hi)),
        };
        (lo..=hi).map(|p| (self.coeff(p) - other.coeff(p)).norm()).fold(0.0, f64::max)
    }

    /// Map a class-S series to class Σ by `F(z) = 1/f(1/z)`.
    pub fn to_sigma(&self) -> Result<Self> {
        if self.domain != Domain::Interior {
            return Err(Error::DomainMismatch("to_sigma expects an interior series".into()));
        }
        // f(1/z) has the same coefficients read in w = 1/z.
        let p = self.to_power().recip()?;
        Ok(Self::from_power(Domain::Exterior, p))
    }

    /// Restrict the window to at most `order` retained powers on the
    /// truncated side.
    pub fn truncate(&self, order: i32) -> Self {
        match self.domain {
            Domain::Exterior if order > self.lo => {
                let coeffs = (order..=self.hi).map(|p| self.coeff(p)).collect();
                Self::new(self.domain, order, coeffs)
            }
            Domain::Interior if order < self.hi => {
                let coeffs = (self.lo..=order).map(|p| self.coeff(p)).collect();
                Self::new(self.domain, self.lo, coeffs)
            }
            _ => self.clone(),
        }
    }
}

/// Formal `log(1 + u)`, vanishing with `u`.
pub fn log1p_series(u: &LaurentSeries) -> Result<LaurentSeries> {
    let p = u.to_power().normalized();
    if p.coeffs.is_empty() && p.val >= 0 {
        // u is exactly zero to the known precision
        return Ok(LaurentSeries::from_power(u.domain, PowerSeries::constant(C::new(0.0, 0.0), p.prec())));
    }
    if p.val < 0 {
        return Err(Error::InvalidExpansion(
            "u grows at the expansion point; log(1+u) has no formal branch".into(),
        ));
    }
    let one = PowerSeries::constant(C::new(1.0, 0.0), p.prec());
    let g = one.add(&p);
    if g.coeff(0).norm() == 0.0 {
        return Err(Error::SingularLog);
    }
    Ok(LaurentSeries::from_power(u.domain, g.ln()?))
}

/// Formal exponential of a series without growing terms.
pub fn exp_series(u: &LaurentSeries) -> Result<LaurentSeries> {
    Ok(LaurentSeries::from_power(u.domain, u.to_power().exp()?))
}

/// `a^r` for rational `r`, principal power of the leading coefficient.
pub fn pow_series(a: &LaurentSeries, r: Rational64) -> Result<LaurentSeries> {
    let p = a.to_power().pow(r).map_err(|e| match e {
        // report the leading power in z rather than in the expansion variable
        Error::NonIntegralPower(r, v) => Error::NonIntegralPower(
            r,
            if a.domain == Domain::Exterior { -v } else { v },
        ),
        other => other,
    })?;
    Ok(LaurentSeries::from_power(a.domain, p))
}
