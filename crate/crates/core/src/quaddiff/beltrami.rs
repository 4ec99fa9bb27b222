use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::{gauss_legendre, integrate, neumaier, QuadratureOptions, QuadratureReport, Region};
use super::QuadDiff;
use crate::error::{precondition, Error, Result};

type C = Complex64;

/// A Beltrami coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BeltramiField {
    /// `k |ψ|/ψ` on the domain of `ψ`, zero where `ψ` vanishes.
    Teichmuller { k: f64, psi: QuadDiff },
    /// `c` on the unit disk, zero outside.
    Constant { c: C },
    /// Piecewise constant on the pixels of a square lattice.
    Grid(GridField),
}

impl BeltramiField {
    pub fn sup_norm(&self) -> f64 {
        match self {
            BeltramiField::Teichmuller { k, .. } => *k,
            BeltramiField::Constant { c } => c.norm(),
            BeltramiField::Grid(g) => g.sup_norm,
        }
    }

    pub fn eval(&self, z: C) -> C {
        match self {
            BeltramiField::Teichmuller { k, psi } => {
                if !psi.domain().contains(z) {
                    return C::new(0.0, 0.0);
                }
                teich_value(*k, psi.eval(z))
            }
            BeltramiField::Constant { c } => {
                if z.norm() < 1.0 {
                    *c
                } else {
                    C::new(0.0, 0.0)
                }
            }
            BeltramiField::Grid(g) => g.eval(z),
        }
    }

    /// Closed-form support region, if any.
    pub fn region(&self) -> Option<Region> {
        match self {
            BeltramiField::Teichmuller { psi, .. } => Some(psi.domain()),
            BeltramiField::Constant { .. } => Some(Region::Disk),
            BeltramiField::Grid(_) => None,
        }
    }

    /// `s μ` for real `s`, keeping the representation.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Ok(match self {
            BeltramiField::Teichmuller { k, psi } if s >= 0.0 => {
                BeltramiField::Teichmuller { k: k * s, psi: psi.clone() }
            }
            BeltramiField::Teichmuller { k, psi } => {
                BeltramiField::Teichmuller { k: -k * s, psi: psi.scale(C::new(-1.0, 0.0)) }
            }
            BeltramiField::Constant { c } => BeltramiField::Constant { c: c * s },
            BeltramiField::Grid(g) => BeltramiField::Grid(GridField::new(
                g.grid_size,
                g.spacing,
                g.origin,
                g.samples.iter().map(|v| v * s).collect(),
            )?),
        })
    }
}

fn teich_value(k: f64, v: C) -> C {
    let n = v.norm();
    if n == 0.0 {
        C::new(0.0, 0.0)
    } else {
        C::new(k * n, 0.0) / v
    }
}

/// Samples on an `n × n` lattice. Pixel `(row, col)` covers
/// `origin + spacing·[col, col+1] + i·spacing·[row, row+1]`; samples are
/// stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridField {
    pub grid_size: usize,
    pub spacing: f64,
    pub origin: C,
    pub samples: Vec<C>,
    pub sup_norm: f64,
}

#[derive(Deserialize)]
struct RawGrid {
    grid_size: usize,
    spacing: f64,
    origin: C,
    samples: Vec<C>,
    #[serde(default)]
    sup_norm: Option<f64>,
}

impl TryFrom<RawGrid> for GridField {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        let g = GridField::new(raw.grid_size, raw.spacing, raw.origin, raw.samples)?;
        if let Some(s) = raw.sup_norm {
            if (s - g.sup_norm).abs() > 1e-12 * s.max(1.0) {
                return Err(Error::Input(format!(
                    "recorded sup_norm {s} differs from samples ({})",
                    g.sup_norm
                )));
            }
        }
        Ok(g)
    }
}

impl GridField {
    pub fn new(grid_size: usize, spacing: f64, origin: C, samples: Vec<C>) -> Result<Self> {
        if grid_size == 0 || !(spacing > 0.0) {
            return Err(Error::Input("grid needs positive size and spacing".into()));
        }
        if samples.len() != grid_size * grid_size {
            return Err(Error::Input(format!(
                "expected {} samples, got {}",
                grid_size * grid_size,
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Input("non-finite sample".into()));
        }
        let sup_norm = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if sup_norm >= 1.0 {
            return Err(precondition(format!("sup norm {sup_norm} must be < 1")));
        }
        Ok(Self { grid_size, spacing, origin, samples, sup_norm })
    }

    /// Centred square window `[-half, half]^2` with `n` pixels per side,
    /// each sample the average of `f` over `sub × sub` sub-pixel points.
    pub fn sample<F>(n: usize, half: f64, sub: usize, f: F) -> Result<Self>
    where
        F: Fn(C) -> C + Sync,
    {
        let h = 2.0 * half / n as f64;
        let origin = C::new(-half, -half);
        let sub = sub.max(1);
        let samples: Vec<C> = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (row, col) = (idx / n, idx % n);
                let mut acc = C::new(0.0, 0.0);
                for i in 0..sub {
                    for j in 0..sub {
                        let x = origin.re + h * (col as f64 + (j as f64 + 0.5) / sub as f64);
                        let y = origin.im + h * (row as f64 + (i as f64 + 0.5) / sub as f64);
                        acc += f(C::new(x, y));
                    }
                }
                acc / (sub * sub) as f64
            })
            .collect();
        Self::new(n, h, origin, samples)
    }

    pub fn centre(&self, row: usize, col: usize) -> C {
        self.origin + C::new(self.spacing * (col as f64 + 0.5), self.spacing * (row as f64 + 0.5))
    }

    pub fn eval(&self, z: C) -> C {
        let x = (z.re - self.origin.re) / self.spacing;
        let y = (z.im - self.origin.im) / self.spacing;
        if x < 0.0 || y < 0.0 || x >= self.grid_size as f64 || y >= self.grid_size as f64 {
            return C::new(0.0, 0.0);
        }
        self.samples[y as usize * self.grid_size + x as usize]
    }

    /// Nonzero pixels as `(row, col, value)`.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize, C)> + '_ {
        let n = self.grid_size;
        self.samples
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() != 0.0)
            .map(move |(i, v)| (i / n, i % n, *v))
    }

    /// Half-diagonal of one pixel.
    pub fn pixel_radius(&self) -> f64 {
        self.spacing * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Whether every nonzero pixel meets `region`.
    pub fn supported_in(&self, region: Region) -> bool {
        let slack = self.pixel_radius();
        self.support().all(|(r, c, _)| {
            let z = self.centre(r, c).norm();
            match region {
                Region::Disk => z < 1.0 + slack,
                Region::Exterior => z > 1.0 - slack,
            }
        })
    }

    /// Distance from `z` to the nearest nonzero pixel centre.
    pub fn distance_to_support(&self, z: C) -> f64 {
        self.support()
            .map(|(r, c, _)| (self.centre(r, c) - z).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// `Σ_pixels μ_p ∬_p g` with a 3×3 Gauss rule on each pixel; the error
    /// estimate compares with the 2×2 rule.
    pub fn integrate_against<F>(&self, g: F) -> QuadratureReport
    where
        F: Fn(C) -> C + Sync,
    {
        let (x3, w3) = gauss_legendre(3);
        let (x2, w2) = gauss_legendre(2);
        let h = self.spacing;
        let support: Vec<_> = self.support().collect();
        let rule = |zc: C, x: &[f64], w: &[f64]| {
            let mut acc = C::new(0.0, 0.0);
            for (xi, wi) in x.iter().zip(w) {
                for (yj, wj) in x.iter().zip(w) {
                    acc += g(zc + C::new(0.5 * h * xi, 0.5 * h * yj)) * (wi * wj);
                }
            }
            acc * (0.25 * h * h)
        };
        let parts: Vec<(C, f64)> = support
            .par_iter()
            .map(|&(r, c, v)| {
                let zc = self.centre(r, c);
                let i3 = rule(zc, &x3, &w3);
                let i2 = rule(zc, &x2, &w2);
                (v * i3, (v * (i3 - i2)).norm())
            })
            .collect();
        QuadratureReport {
            value: neumaier(parts.iter().map(|p| p.0)),
            error: parts.iter().map(|p| p.1).sum(),
            cells: parts.len(),
            evaluations: 13 * parts.len(),
        }
    }
}

/// `k|ψ|/ψ`.
pub fn teich_beltrami(psi: &QuadDiff, k: f64) -> Result<BeltramiField> {
    if !(0.0..1.0).contains(&k) {
        return Err(precondition(format!("k = {k} must lie in [0, 1)")));
    }
    let probes = match psi.domain() {
        Region::Disk => [C::new(0.1, 0.2), C::new(-0.37, 0.05), C::new(0.0, -0.61), C::new(0.52, 0.44)],
        Region::Exterior => [C::new(1.3, 0.2), C::new(-2.1, 0.5), C::new(0.0, -1.7), C::new(3.2, 2.4)],
    };
    if psi.is_trivially_zero() || probes.iter().all(|&z| psi.eval(z).norm() == 0.0) {
        return Err(precondition("ψ vanishes identically"));
    }
    Ok(BeltramiField::Teichmuller { k, psi: psi.clone() })
}

/// `⟨μ, ψ⟩ = ∬ μ ψ dx dy`.
pub fn pairing(mu: &BeltramiField, psi: &QuadDiff, opts: QuadratureOptions) -> Result<QuadratureReport> {
    match mu {
        BeltramiField::Grid(g) => {
            if !g.supported_in(psi.domain()) {
                return Err(Error::DomainMismatch(format!(
                    "grid support leaves the {:?} domain of ψ",
                    psi.domain()
                )));
            }
            Ok(g.integrate_against(|z| psi.eval(z)))
        }
        BeltramiField::Constant { c } => {
            if psi.domain() != Region::Disk {
                return Err(Error::DomainMismatch("constant field lives on the disk".into()));
            }
            let r = integrate(Region::Disk, |z| psi.eval(z), &psi.singular_points(), opts)?;
            Ok(QuadratureReport { value: r.value * c, error: r.error * c.norm(), ..r })
        }
        BeltramiField::Teichmuller { k, psi: phi } => {
            if phi.domain() != psi.domain() {
                return Err(Error::DomainMismatch("μ and ψ live on different domains".into()));
            }
            let mut singular = psi.singular_points();
            singular.extend(phi.singular_points());
            integrate(psi.domain(), |z| teich_value(*k, phi.eval(z)) * psi.eval(z), &singular, opts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaddiff::{l1_norm, PolePoint, Term};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn opts() -> QuadratureOptions {
        QuadratureOptions::with_tol(1e-10)
    }

    #[test]
    fn zero_and_constant_fields() {
        let one = QuadDiff::monomial(Region::Disk, c(1.0, 0.0), 0).unwrap();
        let zero = BeltramiField::Constant { c: c(0.0, 0.0) };
        assert_eq!(pairing(&zero, &one, opts()).unwrap().value, c(0.0, 0.0));
        let mu = BeltramiField::Constant { c: c(0.2, -0.1) };
        let v = pairing(&mu, &one, opts()).unwrap().value;
        assert!((v - c(0.2, -0.1) * PI).norm() < 1e-12);
    }

    #[test]
    fn teichmuller_self_pairing() {
        let psi = QuadDiff::new(
            Region::Disk,
            vec![
                Term::Monomial { c: c(0.3, 0.1), p: 0 },
                Term::Monomial { c: c(1.0, -0.5), p: 2 },
                Term::PoleBasis { c: c(0.2, 0.0), e: PolePoint::Finite(c(0.0, 2.0)) },
            ],
        )
        .unwrap();
        let k = 0.35;
        let mu = teich_beltrami(&psi, k).unwrap();
        let p = pairing(&mu, &psi, opts()).unwrap();
        let l1 = l1_norm(&psi, opts()).unwrap();
        assert!((p.value - c(k * l1.value.re, 0.0)).norm() < 1e-8, "{p:?} vs {l1:?}");
    }

    #[test]
    fn teichmuller_modulus_identity() {
        let psi = QuadDiff::new(
            Region::Disk,
            vec![Term::Monomial { c: c(1.0, 0.0), p: 1 }, Term::Monomial { c: c(-0.2, 0.3), p: 0 }],
        )
        .unwrap();
        let mu = teich_beltrami(&psi, 0.6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100_000 {
            let z = C::from_polar(rng.random::<f64>().sqrt(), rng.random::<f64>() * 6.3);
            if psi.eval(z).norm() > 0.0 {
                assert!((mu.eval(z).norm() - 0.6).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn teichmuller_preconditions() {
        let one = QuadDiff::monomial(Region::Disk, c(2.0, 0.0), 0).unwrap();
        let mu = teich_beltrami(&one, 0.4).unwrap();
        assert!((mu.eval(c(0.1, 0.1)) - c(0.4, 0.0)).norm() < 1e-15);
        assert!(teich_beltrami(&one, 1.0).is_err());
        assert!(teich_beltrami(&QuadDiff::zero(Region::Disk), 0.3).is_err());
    }

    #[test]
    fn holder_bound_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let terms = (0..3)
                .map(|p| Term::Monomial { c: c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)), p })
                .collect();
            let psi = QuadDiff::new(Region::Disk, terms).unwrap();
            let k = rng.random_range(0.0..0.9);
            let phi = QuadDiff::new(
                Region::Disk,
                vec![Term::Pole { c: c(1.0, 0.0), a: c(rng.random_range(1.5..3.0), 0.5), order: 1 }],
            )
            .unwrap();
            let mu = teich_beltrami(&phi, k).unwrap();
            let p = pairing(&mu, &psi, opts()).unwrap();
            let l1 = l1_norm(&psi, opts()).unwrap();
            assert!(p.value.norm() <= k * l1.value.re + 1e-8);
        }
    }

    #[test]
    fn grid_pairing_constant_on_disk() {
        let g = GridField::sample(256, 2.0, 8, |z| if z.norm() < 1.0 { c(0.1, 0.0) } else { c(0.0, 0.0) })
            .unwrap();
        assert!(g.supported_in(Region::Disk));
        let one = QuadDiff::monomial(Region::Disk, c(1.0, 0.0), 0).unwrap();
        let v = pairing(&BeltramiField::Grid(g), &one, opts()).unwrap().value;
        assert!((v.re - 0.1 * PI).abs() < 2e-4, "{v}");
    }

    #[test]
    fn grid_json() {
        let g = GridField::new(2, 0.5, c(-0.5, -0.5), vec![c(0.1, 0.0); 4]).unwrap();
        let s = serde_json::to_string(&BeltramiField::Grid(g.clone())).unwrap();
        let back: BeltramiField = serde_json::from_str(&s).unwrap();
        assert_eq!(back, BeltramiField::Grid(g));
        assert!(GridField::new(2, 0.5, c(0.0, 0.0), vec![c(0.1, 0.0); 3]).is_err());
        assert!(GridField::new(1, 0.5, c(0.0, 0.0), vec![c(1.0, 0.0)]).is_err());
    }
}
