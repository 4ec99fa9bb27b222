//! Grunsky coefficients, the weighted Grunsky matrix and its norm.
//!
//! For `f(z) = z + b0 + b1/z + ...` the difference quotient
//! `(f(z) - f(ζ))/(z - ζ)` is a power series `P(u, v)` in `u = 1/z`,
//! `v = 1/ζ` with constant term 1 and `[u^i v^j] P = -b_{i+j-1}` for
//! `i, j >= 1`. The coefficients `α_mn` are read off `-log P`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::linalg::sigma_max;
use crate::series::LaurentSeries;

type C = Complex64;

/// Convergence threshold between the norm at `N` and at `N/2`.
pub const CONVERGENCE_TOL: f64 = 1e-6;

/// Weighted Grunsky matrix `β_mn = √(mn) α_mn`, `1 <= m, n <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrunskyMatrix {
    n: usize,
    alpha: DMatrix<C>,
    beta: DMatrix<C>,
}

impl GrunskyMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    /// `α_mn` with 1-based indices.
    pub fn alpha(&self, m: usize, n: usize) -> C {
        self.alpha[(m - 1, n - 1)]
    }

    /// `β_mn` with 1-based indices.
    pub fn beta(&self, m: usize, n: usize) -> C {
        self.beta[(m - 1, n - 1)]
    }

    pub fn weighted(&self) -> &DMatrix<C> {
        &self.beta
    }

    /// Leading `k x k` block, the matrix of the same map at truncation `k`.
    pub fn leading(&self, k: usize) -> GrunskyMatrix {
        let k = k.min(self.n);
        GrunskyMatrix {
            n: k,
            alpha: self.alpha.view((0, 0), (k, k)).into_owned(),
            beta: self.beta.view((0, 0), (k, k)).into_owned(),
        }
    }

    pub fn dump(&self) -> MatrixDump {
        let mut entries = Vec::with_capacity(self.n * self.n);
        for m in 0..self.n {
            for n in 0..self.n {
                entries.push(self.beta[(m, n)]);
            }
        }
        MatrixDump { n: self.n, entries }
    }
}

/// JSON form of the weighted matrix, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDump {
    #[serde(rename = "N")]
    pub n: usize,
    pub entries: Vec<C>,
}

/// Compute `α_mn` for `m, n <= N` from a class-Σ series.
///
/// Needs `b_1 .. b_{2N-1}`, i.e. the series must retain powers down to
/// `z^-(2N-1)`.
pub fn grunsky_coefficients(f: &LaurentSeries, n: usize) -> Result<GrunskyMatrix> {
    if !f.is_class_sigma() {
        return Err(Error::NotClassSigma(
            "expected z + b0 + b1/z + ... with unit leading coefficient".into(),
        ));
    }
    if n == 0 {
        return Err(precondition("Grunsky truncation must be positive"));
    }
    let needed = -(2 * n as i32 - 1);
    if !f.is_known(needed) {
        return Err(Error::InsufficientTruncation(format!(
            "N = {n} needs coefficients down to z^{needed}, series is known to z^{}",
            f.lo()
        )));
    }
    let dim = n + 1;
    // P(u, v): constant 1, [u^i v^j] = -b_{i+j-1}
    let mut p = vec![C::new(0.0, 0.0); dim * dim];
    p[0] = C::new(1.0, 0.0);
    for i in 1..dim {
        for j in 1..dim {
            p[i * dim + j] = -f.b((i + j - 1) as i32);
        }
    }
    // log P via the Euler operator: (i+j) L_ij = (i+j) P_ij - Σ (a+b) L_ab P_{i-a,j-b}
    // over (a,b) != (i,j), (a,b) <= (i,j). Computed for i <= j and mirrored,
    // so the result is exactly symmetric.
    let mut l = vec![C::new(0.0, 0.0); dim * dim];
    for total in 1..=(2 * n) {
        for i in 0..dim {
            if i > total {
                break;
            }
            let j = total - i;
            if j >= dim || i > j {
                continue;
            }
            let mut acc = p[i * dim + j] * total as f64;
            for a in 0..=i {
                for b in 0..=j {
                    if (a == i && b == j) || a + b == 0 {
                        continue;
                    }
                    let lab = l[a * dim + b];
                    if lab == C::new(0.0, 0.0) {
                        continue;
                    }
                    acc -= lab * p[(i - a) * dim + (j - b)] * (a + b) as f64;
                }
            }
            let v = acc / total as f64;
            l[i * dim + j] = v;
            l[j * dim + i] = v;
        }
    }
    let alpha = DMatrix::from_fn(n, n, |m, k| -l[(m + 1) * dim + (k + 1)]);
    let beta = DMatrix::from_fn(n, n, |m, k| alpha[(m, k)] * (((m + 1) * (k + 1)) as f64).sqrt());
    Ok(GrunskyMatrix { n, alpha, beta })
}

/// Norm estimate with the nested-truncation comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrunskyNorm {
    /// `σ_max` at the full truncation; a lower bound for `κ(f)`.
    pub value: f64,
    /// `σ_max` of the leading `N/2` block.
    pub half: f64,
    pub converged: bool,
}

/// Largest singular value of the weighted matrix. For complex symmetric
/// matrices this is the supremum of `|x^T B x|` over the unit sphere.
pub fn grunsky_norm(b: &GrunskyMatrix) -> GrunskyNorm {
    let value = sigma_max(&b.beta);
    let half = sigma_max(&b.leading(b.n / 2).beta);
    GrunskyNorm { value, half, converged: (value - half).abs() < CONVERGENCE_TOL }
}

/// `h_x = x^T B x = Σ √(mn) α_mn x_m x_n` for `||x|| <= 1`.
pub fn h_x_value(b: &GrunskyMatrix, x: &[C]) -> Result<C> {
    let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm > 1.0 + 1e-12 {
        return Err(precondition(format!("||x|| = {norm} exceeds 1")));
    }
    if x.len() > b.n {
        return Err(precondition(format!(
            "x has {} entries, matrix truncation is {}",
            x.len(),
            b.n
        )));
    }
    let k = x.len();
    let xv = DVector::from_column_slice(x);
    let block = b.beta.view((0, 0), (k, k));
    Ok((xv.transpose() * block * &xv)[(0, 0)])
}

/// Upper bound `k (k + α)/(1 + α k)` for the Grunsky norm in terms of the
/// Teichmüller norm `k` and the pairing quantity `α`.
pub fn kuhnau_bound(k: f64, alpha: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(precondition(format!("k = {k} must lie in [0, 1)")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(precondition(format!("alpha = {alpha} must lie in [0, 1]")));
    }
    Ok(k * (k + alpha) / (1.0 + alpha * k))
}
