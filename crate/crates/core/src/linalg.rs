use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

type C = Complex64;

/// Above this size the largest singular value comes from power iteration.
pub const DENSE_SVD_LIMIT: usize = 256;

/// Largest singular value of a square complex matrix.
pub fn sigma_max(m: &DMatrix<C>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.nrows() <= DENSE_SVD_LIMIT && m.ncols() <= DENSE_SVD_LIMIT {
        m.singular_values().iter().cloned().fold(0.0, f64::max)
    } else {
        power_sigma_max(m, 1e-13, 10_000)
    }
}

/// Power iteration on `M^H M`.
pub fn power_sigma_max(m: &DMatrix<C>, tol: f64, max_iter: usize) -> f64 {
    let n = m.ncols();
    // deterministic, non-degenerate start vector
    let mut v = DVector::from_fn(n, |i, _| C::new(1.0 / (1.0 + i as f64), 0.3 / (2.0 + i as f64)));
    v /= C::new(v.norm(), 0.0);
    let mut sigma = 0.0;
    for _ in 0..max_iter {
        let w = m.adjoint() * (m * &v);
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm.sqrt();
        v = w / C::new(norm, 0.0);
        if (next - sigma).abs() <= tol * next.max(1.0) {
            return next;
        }
        sigma = next;
    }
    sigma
}

/// Top right singular vector of a square complex matrix, from the dense SVD.
pub fn top_right_singular_vector(m: &DMatrix<C>) -> Option<(f64, DVector<C>)> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t?;
    let (idx, s) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
    let v: DVector<C> = v_t.row(idx).adjoint();
    Some((s, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_sigma() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![
            C::new(0.2, 0.0),
            C::new(0.0, -0.7),
            C::new(0.1, 0.1),
        ]));
        assert!((sigma_max(&m) - 0.7).abs() < 1e-14);
        assert!((power_sigma_max(&m, 1e-14, 10_000) - 0.7).abs() < 1e-10);
    }
}
