//! Small-dilatation Beltrami solver on a periodized square grid.
//!
//! Writes `f = z + Cφ` with `φ = f_z̄`, so that `f_z = 1 + Bφ` and the
//! Beltrami equation becomes `φ = μ + μ Bφ`. The Beurling transform `B` is
//! the Fourier multiplier `conj(k)/k`; the Cauchy transform is evaluated by
//! direct summation off the grid and by zero-padded FFT convolution on it.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::Normalization;
use crate::error::{precondition, Error, Result};
use crate::quaddiff::{BeltramiField, GridField, Region};
use crate::series::{Domain, LaurentSeries};

type C = Complex64;
const PI: f64 = std::f64::consts::PI;

/// Smallest accepted ratio of window side to support diameter.
pub const MIN_PADDING: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub normalization: Normalization,
    /// Pixels per side when a closed-form field has to be sampled.
    pub grid_size: usize,
    /// Window side as a multiple of the support diameter, for sampling.
    pub padding: f64,
    pub max_iter: usize,
    /// Stop when successive iterates differ by less than this (sup norm).
    pub tol: f64,
    /// Largest finite-difference Beltrami residual accepted on the interior
    /// of the support.
    pub residual_tol: f64,
    /// Number of negative powers kept in the circle fit.
    pub fit_terms: usize,
    pub fit_points: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            normalization: Normalization::Hydrodynamic,
            grid_size: 512,
            padding: 4.0,
            max_iter: 500,
            tol: 1e-12,
            residual_tol: 0.05,
            fit_terms: 16,
            fit_points: 128,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BeltramiSolution {
    pub mu: GridField,
    /// `f_z̄` on the grid.
    pub phi: Vec<C>,
    /// Additive constant enforcing the normalization.
    pub shift: C,
    /// `f` at the pixel centres.
    pub samples: Vec<C>,
    pub iterations: usize,
    /// Sup-norm change in the last Neumann step.
    pub increment: f64,
    /// Finite-difference `|f_z̄ - μ f_z|` away from the support boundary.
    pub residual: f64,
    pub fit_radius: f64,
    /// Laurent fit of `f` on `|z| = fit_radius`.
    pub fit: LaurentSeries,
    #[serde(skip)]
    support: Vec<(C, C)>,
}

/// Grid dump `{grid_size, spacing, origin, samples}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridDump {
    pub grid_size: usize,
    pub spacing: f64,
    pub origin: C,
    pub samples: Vec<C>,
}

impl BeltramiSolution {
    /// `f(z)` at any point by direct summation of the Cauchy transform.
    pub fn eval(&self, z: C) -> C {
        z + self.cauchy(z, 0) + self.shift
    }

    /// `f^(s)(z)` for `s >= 1`, or `f(z)` for `s = 0`.
    pub fn derivative(&self, z: C, s: u32) -> C {
        match s {
            0 => self.eval(z),
            1 => C::new(1.0, 0.0) + self.cauchy(z, 1),
            _ => self.cauchy(z, s),
        }
    }

    /// `d^s/dz^s (1/π) Σ φ_p A_p / (z - ζ_p)`.
    fn cauchy(&self, z: C, s: u32) -> C {
        let fact: f64 = (1..=s).map(|k| k as f64).product();
        let sign = if s.is_multiple_of(2) { 1.0 } else { -1.0 };
        let sum: C = self.support.iter().map(|&(zeta, w)| w / (z - zeta).powi(s as i32 + 1)).sum();
        sum * (sign * fact / PI)
    }

    /// `b_n` of the fitted exterior expansion.
    pub fn b(&self, n: i32) -> C {
        self.fit.coeff(-n)
    }

    pub fn dump(&self) -> GridDump {
        GridDump {
            grid_size: self.mu.grid_size,
            spacing: self.mu.spacing,
            origin: self.mu.origin,
            samples: self.samples.clone(),
        }
    }
}

/// Sample a closed-form field on a centred window, or pass a grid through.
pub fn to_grid(mu: &BeltramiField, opts: &SolverOptions) -> Result<GridField> {
    match mu {
        BeltramiField::Grid(g) => Ok(g.clone()),
        other => {
            if other.region() != Some(Region::Disk) {
                return Err(precondition("solver needs a compactly supported field"));
            }
            // support diameter 2
            let half = opts.padding;
            GridField::sample(opts.grid_size, half, 4, |z| other.eval(z))
        }
    }
}

pub fn solve_beltrami(mu: &BeltramiField, opts: &SolverOptions) -> Result<BeltramiSolution> {
    let grid = to_grid(mu, opts)?;
    let n = grid.grid_size;
    let h = grid.spacing;
    if grid.sup_norm >= 1.0 {
        return Err(precondition("‖μ‖ must be < 1"));
    }
    let pixels: Vec<(usize, usize)> = grid.support().map(|(r, c, _)| (r, c)).collect();
    if !pixels.is_empty() {
        let (rmin, rmax) = pixels.iter().fold((n, 0), |(a, b), p| (a.min(p.0), b.max(p.0)));
        let (cmin, cmax) = pixels.iter().fold((n, 0), |(a, b), p| (a.min(p.1), b.max(p.1)));
        let diameter = ((rmax - rmin + 1).max(cmax - cmin + 1)) as f64;
        if (n as f64) < MIN_PADDING * diameter {
            return Err(precondition(format!(
                "window of {n} pixels is less than {MIN_PADDING} x the support diameter ({diameter} pixels)"
            )));
        }
    }

    let fft = Fft2::new(n);
    let multiplier: Vec<C> = (0..n * n)
        .map(|idx| {
            let (row, col) = (idx / n, idx % n);
            let k1 = freq(col, n);
            let k2 = freq(row, n);
            if k1 == 0.0 && k2 == 0.0 {
                C::new(0.0, 0.0)
            } else {
                C::new(k1, -k2) / C::new(k1, k2)
            }
        })
        .collect();
    let beurling = |phi: &[C]| {
        let mut buf = phi.to_vec();
        fft.forward(&mut buf);
        buf.iter_mut().zip(&multiplier).for_each(|(b, m)| *b *= m);
        fft.inverse(&mut buf);
        buf
    };

    let mu_s = &grid.samples;
    let mut phi = mu_s.clone();
    let mut iterations = 0;
    let mut increment = f64::INFINITY;
    while iterations < opts.max_iter {
        iterations += 1;
        let b = beurling(&phi);
        let next: Vec<C> = mu_s.iter().zip(&b).map(|(m, bp)| m + m * bp).collect();
        increment = next.iter().zip(&phi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        phi = next;
        if increment < opts.tol {
            break;
        }
    }
    if increment >= opts.tol {
        return Err(Error::NonConvergence { iterations, residual: increment });
    }

    let support: Vec<(C, C)> = (0..n * n)
        .filter(|&i| phi[i].norm() != 0.0)
        .map(|i| (grid.centre(i / n, i % n), phi[i] * h * h))
        .collect();
    let mut sol = BeltramiSolution {
        mu: grid,
        phi,
        shift: C::new(0.0, 0.0),
        samples: Vec::new(),
        iterations,
        increment,
        residual: 0.0,
        fit_radius: 0.0,
        fit: LaurentSeries::identity(Domain::Exterior, 0),
        support,
    };
    if opts.normalization == Normalization::UnitPoint {
        sol.shift = C::new(1.0, 0.0) - sol.eval(C::new(1.0, 0.0));
    }
    sol.samples = cauchy_on_grid(&sol, &fft_padded(n));
    sol.residual = beltrami_residual(&sol);
    if sol.residual > opts.residual_tol {
        return Err(Error::NonConvergence { iterations, residual: sol.residual });
    }
    let radius = sol
        .support
        .iter()
        .map(|(z, _)| z.norm())
        .fold(0.0, f64::max)
        + sol.mu.pixel_radius();
    sol.fit_radius = 1.5 * radius.max(sol.mu.pixel_radius());
    sol.fit = circle_fit(|z| sol.eval(z), sol.fit_radius, opts.fit_terms, opts.fit_points);
    Ok(sol)
}

fn freq(i: usize, n: usize) -> f64 {
    if i < n.div_ceil(2) {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

/// Laurent coefficients of `f` on `|z| = r` for powers `1, 0, ..., -terms`,
/// by the trapezoidal rule.
pub fn circle_fit<F: Fn(C) -> C + Sync>(f: F, r: f64, terms: usize, points: usize) -> LaurentSeries {
    let zs: Vec<C> = (0..points)
        .map(|k| C::from_polar(r, std::f64::consts::TAU * k as f64 / points as f64))
        .collect();
    let vals: Vec<C> = zs.par_iter().map(|&z| f(z)).collect();
    let lo = -(terms as i32);
    let coeffs = (lo..=1)
        .map(|p| {
            let s: C = zs.iter().zip(&vals).map(|(z, v)| v * z.powi(-p)).sum();
            s / points as f64
        })
        .collect();
    LaurentSeries::new(Domain::Exterior, lo, coeffs)
}

/// `f` at the pixel centres via linear convolution with the pixel Cauchy
/// kernel `h / (π (dx + i dy))`.
fn cauchy_on_grid(sol: &BeltramiSolution, fft: &Fft2) -> Vec<C> {
    let n = sol.mu.grid_size;
    let m = 2 * n;
    let h = sol.mu.spacing;
    let mut kernel = vec![C::new(0.0, 0.0); m * m];
    for row in 0..m {
        for col in 0..m {
            let dx = freq(col, m);
            let dy = freq(row, m);
            if dx != 0.0 || dy != 0.0 {
                kernel[row * m + col] = C::new(h / PI, 0.0) / C::new(dx, dy);
            }
        }
    }
    let mut data = vec![C::new(0.0, 0.0); m * m];
    for row in 0..n {
        for col in 0..n {
            data[row * m + col] = sol.phi[row * n + col];
        }
    }
    fft.forward(&mut kernel);
    fft.forward(&mut data);
    data.iter_mut().zip(&kernel).for_each(|(d, k)| *d *= k);
    fft.inverse(&mut data);
    (0..n * n)
        .map(|i| {
            let (row, col) = (i / n, i % n);
            sol.mu.centre(row, col) + data[row * m + col] + sol.shift
        })
        .collect()
}

/// Max of `|f_z̄ - μ f_z|` from centred differences, over pixels whose 5×5
/// neighbourhood lies in the support.
fn beltrami_residual(sol: &BeltramiSolution) -> f64 {
    let n = sol.mu.grid_size;
    let h = sol.mu.spacing;
    let mu = &sol.mu.samples;
    let f = &sol.samples;
    let inside = |r: usize, c: usize| (r.saturating_sub(2)..=(r + 2).min(n - 1))
        .all(|i| (c.saturating_sub(2)..=(c + 2).min(n - 1)).all(|j| mu[i * n + j].norm() != 0.0));
    (2..n.saturating_sub(2))
        .into_par_iter()
        .map(|r| {
            let mut worst: f64 = 0.0;
            for c in 2..n - 2 {
                if mu[r * n + c].norm() == 0.0 || !inside(r, c) {
                    continue;
                }
                let fx = (f[r * n + c + 1] - f[r * n + c - 1]) / (2.0 * h);
                let fy = (f[(r + 1) * n + c] - f[(r - 1) * n + c]) / (2.0 * h);
                let i = C::new(0.0, 1.0);
                let fz = (fx - i * fy) * 0.5;
                let fzb = (fx + i * fy) * 0.5;
                worst = worst.max((fzb - mu[r * n + c] * fz).norm());
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

fn fft_padded(n: usize) -> Fft2 {
    Fft2::new(2 * n)
}

/// Square 2-D FFT, rows then columns, unnormalized forward and `1/n²`
/// scaled inverse.
struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    fn forward(&self, data: &mut [C]) {
        self.apply(data, &self.fwd);
    }

    fn inverse(&self, data: &mut [C]) {
        self.apply(data, &self.inv);
        let s = 1.0 / (self.n * self.n) as f64;
        data.par_iter_mut().for_each(|v| *v *= s);
    }

    fn apply(&self, data: &mut [C], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        data.par_chunks_mut(n).for_each(|row| plan.process(row));
        let mut t = transpose(data, n);
        t.par_chunks_mut(n).for_each(|col| plan.process(col));
        data.copy_from_slice(&transpose(&t, n));
    }
}

fn transpose(data: &[C], n: usize) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(c, col)| {
        for (r, slot) in col.iter_mut().enumerate() {
            *slot = data[r * n + c];
        }
    });
    out
}
