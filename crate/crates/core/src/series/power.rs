//! Formal power series in a single expansion variable `w` with tracked
//! absolute precision. `LaurentSeries` converts to this form for every
//! multiplicative operation: `w = z` for interior series and `w = 1/z` for
//! exterior ones, so "more terms" always means larger exponents of `w`.

use num_complex::Complex64;
use num_rational::Rational64;

use crate::error::{Error, Result};

type C = Complex64;

/// `w^val * (c_0 + c_1 w + ...) + O(w^prec)` with `prec = val + coeffs.len()`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct PowerSeries {
    pub val: i32,
    pub coeffs: Vec<C>,
}

impl PowerSeries {
    pub fn new(val: i32, coeffs: Vec<C>) -> Self {
        Self { val, coeffs }
    }

    /// Exact constant `c`, known up to (exclusive) exponent `prec`.
    pub fn constant(c: C, prec: i32) -> Self {
        let len = prec.max(0) as usize;
        let mut coeffs = vec![C::new(0.0, 0.0); len];
        if len > 0 {
            coeffs[0] = c;
        }
        Self { val: 0, coeffs }
    }

    pub fn prec(&self) -> i32 {
        self.val + self.coeffs.len() as i32
    }

    pub fn coeff(&self, e: i32) -> C {
        if e < self.val || e >= self.prec() {
            C::new(0.0, 0.0)
        } else {
            self.coeffs[(e - self.val) as usize]
        }
    }

    /// Strip exactly-zero leading coefficients. Precision is unchanged.
    pub fn normalized(mut self) -> Self {
        let lead = self.coeffs.iter().take_while(|c| **c == C::new(0.0, 0.0)).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.val += lead as i32;
        }
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let val = self.val.min(other.val);
        let prec = self.prec().min(other.prec());
        let coeffs = (val..prec).map(|e| self.coeff(e) + other.coeff(e)).collect();
        Self::new(val, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let a = self.clone().normalized();
        let b = other.clone().normalized();
        let val = a.val + b.val;
        let prec = (a.val + b.prec()).min(b.val + a.prec());
        let len = (prec - val).max(0) as usize;
        let mut out = vec![C::new(0.0, 0.0); len];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = C::new(0.0, 0.0);
            for j in 0..=i {
                if j < a.coeffs.len() && i - j < b.coeffs.len() {
                    acc += a.coeffs[j] * b.coeffs[i - j];
                }
            }
            *slot = acc;
        }
        Self::new(val, out)
    }

    fn leading(&self) -> Result<(Self, C)> {
        let a = self.clone().normalized();
        match a.coeffs.first() {
            Some(&c) => Ok((a, c)),
            None => Err(Error::InsufficientTruncation(
                "leading coefficient is not within the retained window".into(),
            )),
        }
    }

    pub fn recip(&self) -> Result<Self> {
        let (a, a0) = self.leading()?;
        let n = a.coeffs.len();
        let inv0 = C::new(1.0, 0.0) / a0;
        let mut r = vec![C::new(0.0, 0.0); n];
        r[0] = inv0;
        for i in 1..n {
            let mut acc = C::new(0.0, 0.0);
            for k in 1..=i {
                acc += a.coeffs[k] * r[i - k];
            }
            r[i] = -acc * inv0;
        }
        Ok(Self::new(-a.val, r))
    }

    /// Natural logarithm of a series with nonzero constant term, principal
    /// branch on the constant.
    pub fn ln(&self) -> Result<Self> {
        if self.val > 0 || self.prec() <= 0 {
            return Err(Error::InsufficientTruncation("constant term unknown".into()));
        }
        let (g, g0) = self.leading()?;
        if g.val != 0 {
            return Err(Error::InvalidExpansion(format!(
                "logarithm needs a nonzero constant term, leading exponent is {}",
                g.val
            )));
        }
        let n = g.coeffs.len();
        let mut l = vec![C::new(0.0, 0.0); n];
        l[0] = g0.ln();
        // g * L' = g'  =>  n L_n g_0 = n g_n - sum_{k=1}^{n-1} k L_k g_{n-k}
        for i in 1..n {
            let mut acc = g.coeffs[i] * i as f64;
            for k in 1..i {
                acc -= l[k] * g.coeffs[i - k] * k as f64;
            }
            l[i] = acc / (g0 * i as f64);
        }
        Ok(Self::new(0, l))
    }

    pub fn exp(&self) -> Result<Self> {
        if self.prec() <= 0 {
            return Err(Error::InsufficientTruncation("constant term unknown".into()));
        }
        if self.val < 0 {
            let a = self.clone().normalized();
            if a.val < 0 {
                return Err(Error::InvalidExpansion(
                    "exponential of a series with negative powers".into(),
                ));
            }
        }
        let n = self.prec() as usize;
        let u: Vec<C> = (0..n as i32).map(|e| self.coeff(e)).collect();
        let mut out = vec![C::new(0.0, 0.0); n];
        out[0] = u[0].exp();
        for i in 1..n {
            let mut acc = C::new(0.0, 0.0);
            for k in 1..=i {
                acc += u[k] * out[i - k] * k as f64;
            }
            out[i] = acc / i as f64;
        }
        Ok(Self::new(0, out))
    }

    /// `self^r` with the principal power of the leading coefficient.
    pub fn pow(&self, r: Rational64) -> Result<Self> {
        let (a, a0) = self.leading()?;
        let scaled = Rational64::from_integer(a.val as i64) * r;
        if !scaled.is_integer() {
            return Err(Error::NonIntegralPower(r.to_string(), a.val));
        }
        let rf = *r.numer() as f64 / *r.denom() as f64;
        let n = a.coeffs.len();
        let g: Vec<C> = a.coeffs.iter().map(|c| c / a0).collect();
        let mut p = vec![C::new(0.0, 0.0); n];
        p[0] = C::new(1.0, 0.0);
        // J.C.P. Miller recurrence for g^r with g_0 = 1
        for i in 1..n {
            let mut acc = C::new(0.0, 0.0);
            for k in 1..=i {
                let w = (rf + 1.0) * k as f64 - i as f64;
                if w != 0.0 {
                    acc += g[k] * p[i - k] * w;
                }
            }
            p[i] = acc / i as f64;
        }
        let lead = if a0 == C::new(1.0, 0.0) { a0 } else { (a0.ln() * rf).exp() };
        let val = *scaled.numer() as i32;
        Ok(Self::new(val, p.into_iter().map(|c| c * lead).collect()))
    }
}
