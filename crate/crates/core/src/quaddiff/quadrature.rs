//! Adaptive polar quadrature on the unit disk and on its exterior.
//!
//! Cells are rectangles in `(r, θ)` integrated with a tensor Gauss–Legendre
//! rule. A cell's error estimate is the difference between its own rule and
//! the sum over its four children; the cell with the largest estimate is
//! split next. The exterior `|z| > 1` is handled through `w = 1/z`, which
//! contributes the weight `|w|^-4`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C = Complex64;

/// Integration region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// `|z| < 1`
    Disk,
    /// `|z| > 1`
    Exterior,
}

impl Region {
    pub fn contains(self, z: C) -> bool {
        match self {
            Region::Disk => z.norm() < 1.0,
            Region::Exterior => z.norm() > 1.0,
        }
    }

    /// Map from the polar parameter disk to the region, with the area weight
    /// at `w = r e^{iθ}` (including the polar Jacobian `r`).
    fn point(self, r: f64, theta: f64) -> (C, f64) {
        let w = C::from_polar(r, theta);
        match self {
            Region::Disk => (w, r),
            Region::Exterior => (w.inv(), r.powi(-3)),
        }
    }

    /// Polar parameter of a point of the region, for placing breakpoints.
    fn parameter(self, z: C) -> Option<(f64, f64)> {
        let w = match self {
            Region::Disk => z,
            Region::Exterior if z.norm() == 0.0 => return None,
            Region::Exterior => z.inv(),
        };
        let r = w.norm();
        if r > 1.0 + 1e-12 {
            return None;
        }
        Some((r.min(1.0), w.arg().rem_euclid(TAU)))
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const ORDER: usize = 4;

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

/// Tolerance and cell budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Absolute error target for each integrand component.
    pub tol: f64,
    /// Maximum number of leaf cells.
    pub max_cells: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_cells: 400_000 }
    }
}

impl QuadratureOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    pub value: C,
    pub error: f64,
    pub cells: usize,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Rect {
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
}

impl Rect {
    fn children(&self) -> [Rect; 4] {
        let rm = 0.5 * (self.r0 + self.r1);
        let tm = 0.5 * (self.t0 + self.t1);
        [
            Rect { r0: self.r0, r1: rm, t0: self.t0, t1: tm },
            Rect { r0: rm, r1: self.r1, t0: self.t0, t1: tm },
            Rect { r0: self.r0, r1: rm, t0: tm, t1: self.t1 },
            Rect { r0: rm, r1: self.r1, t0: tm, t1: self.t1 },
        ]
    }

    fn splittable(&self) -> bool {
        self.r1 - self.r0 > 1e-13 && self.t1 - self.t0 > 1e-13
    }

    /// Quadrature nodes `(z, weight)` of the rule on this rectangle.
    fn nodes(&self, region: Region, out: &mut Vec<(C, f64)>) {
        let (x, w) = rule();
        let hr = 0.5 * (self.r1 - self.r0);
        let ht = 0.5 * (self.t1 - self.t0);
        let cr = 0.5 * (self.r1 + self.r0);
        let ct = 0.5 * (self.t1 + self.t0);
        for i in 0..ORDER {
            let r = cr + hr * x[i];
            for j in 0..ORDER {
                let t = ct + ht * x[j];
                let (z, jac) = region.point(r, t);
                out.push((z, w[i] * w[j] * hr * ht * jac));
            }
        }
    }
}

struct Cell {
    rect: Rect,
    fine: Vec<C>,
    /// Integrals over the four children, reused when the cell is split.
    parts: Vec<Vec<C>>,
    err: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Vector-valued adaptive integration. `f(z, out)` writes `dim` values.
struct Engine<'a, F> {
    region: Region,
    dim: usize,
    f: &'a F,
}

impl<F> Engine<'_, F>
where
    F: Fn(C, &mut [C]) + Sync,
{
    fn integrate_rect(&self, rect: &Rect, acc: &mut [C], buf: &mut Vec<(C, f64)>, tmp: &mut [C]) {
        buf.clear();
        rect.nodes(self.region, buf);
        acc.iter_mut().for_each(|a| *a = C::new(0.0, 0.0));
        for &(z, wt) in buf.iter() {
            (self.f)(z, tmp);
            for k in 0..self.dim {
                acc[k] += tmp[k] * wt;
            }
        }
    }

    /// Build a cell: its own rule against the sum over its children.
    fn make_cell(&self, rect: Rect, coarse: Option<Vec<C>>) -> Cell {
        let mut buf = Vec::with_capacity(ORDER * ORDER);
        let mut tmp = vec![C::new(0.0, 0.0); self.dim];
        let coarse = coarse.unwrap_or_else(|| {
            let mut c = vec![C::new(0.0, 0.0); self.dim];
            self.integrate_rect(&rect, &mut c, &mut buf, &mut tmp);
            c
        });
        let mut fine = vec![C::new(0.0, 0.0); self.dim];
        let mut parts = Vec::with_capacity(4);
        for child in rect.children() {
            let mut part = vec![C::new(0.0, 0.0); self.dim];
            self.integrate_rect(&child, &mut part, &mut buf, &mut tmp);
            for k in 0..self.dim {
                fine[k] += part[k];
            }
            parts.push(part);
        }
        let err = (0..self.dim).map(|k| (coarse[k] - fine[k]).norm()).fold(0.0, f64::max);
        Cell { rect, fine, parts, err }
    }

    fn split(&self, cell: &Cell) -> Vec<Cell> {
        cell.rect
            .children()
            .into_iter()
            .zip(cell.parts.iter())
            .map(|(r, p)| self.make_cell(r, Some(p.clone())))
            .collect()
    }

    fn run(&self, breaks: &Breakpoints, opts: QuadratureOptions) -> Result<(Vec<Cell>, f64, usize)> {
        let rects = breaks.rects();
        let mut heap: BinaryHeap<Cell> =
            rects.into_par_iter().map(|r| self.make_cell(r, None)).collect::<Vec<_>>().into();
        let mut frozen: Vec<Cell> = Vec::new();
        let evals_per_cell = 5 * ORDER * ORDER;
        let mut evaluations = heap.len() * evals_per_cell;
        let mut total: f64 = heap.iter().map(|c| c.err).sum();
        loop {
            if total <= opts.tol {
                // guard against drift in the running sum
                total = heap.iter().chain(frozen.iter()).map(|c| c.err).sum();
                if total <= opts.tol {
                    break;
                }
            }
            let leaves = heap.len() + frozen.len();
            if leaves >= opts.max_cells || heap.is_empty() {
                return Err(Error::QuadratureBudget { tol: opts.tol, estimate: total, cells: leaves });
            }
            let batch_len = (heap.len() / 8).clamp(1, 64);
            let mut batch = Vec::with_capacity(batch_len);
            while batch.len() < batch_len {
                match heap.pop() {
                    Some(c) if c.rect.splittable() => batch.push(c),
                    Some(c) => frozen.push(c),
                    None => break,
                }
            }
            let children: Vec<Cell> = batch.par_iter().flat_map_iter(|c| self.split(c)).collect();
            evaluations += children.len() * 4 * ORDER * ORDER;
            total -= batch.iter().map(|c| c.err).sum::<f64>();
            total += children.iter().map(|c| c.err).sum::<f64>();
            heap.extend(children);
            let frozen_err: f64 = frozen.iter().map(|c| c.err).sum();
            if frozen_err > opts.tol {
                return Err(Error::QuadratureBudget {
                    tol: opts.tol,
                    estimate: frozen_err,
                    cells: heap.len() + frozen.len(),
                });
            }
        }
        let mut cells = heap.into_vec();
        cells.extend(frozen);
        Ok((cells, total, evaluations))
    }
}

/// Initial subdivision, with extra breakpoints at known singular points so
/// they sit on cell corners.
#[derive(Debug, Clone)]
struct Breakpoints {
    radii: Vec<f64>,
    angles: Vec<f64>,
}

impl Breakpoints {
    fn new(region: Region, singular: &[C]) -> Self {
        let mut radii: Vec<f64> = (0..=4).map(|i| i as f64 / 4.0).collect();
        let mut angles: Vec<f64> = (0..=8).map(|i| TAU * i as f64 / 8.0).collect();
        for &a in singular {
            if let Some((r, t)) = region.parameter(a) {
                radii.push(r);
                angles.push(t);
            }
        }
        Self { radii: dedup(radii), angles: dedup(angles) }
    }

    fn rects(&self) -> Vec<Rect> {
        let mut out = Vec::new();
        for r in self.radii.windows(2) {
            for t in self.angles.windows(2) {
                out.push(Rect { r0: r[0], r1: r[1], t0: t[0], t1: t[1] });
            }
        }
        out
    }
}

fn dedup(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for x in v {
        if out.last().is_none_or(|&l| x - l > 1e-9) {
            out.push(x);
        } else if let Some(l) = out.last_mut() {
            // keep exact endpoints 0, 1 and 2π
            if x == 1.0 || x == TAU {
                *l = x;
            }
        }
    }
    out
}

/// Compensated (Neumaier) summation.
pub(crate) fn neumaier<I: IntoIterator<Item = C>>(it: I) -> C {
    let mut s = C::new(0.0, 0.0);
    let mut comp = C::new(0.0, 0.0);
    for x in it {
        let t = s + x;
        comp.re += if s.re.abs() >= x.re.abs() { (s.re - t.re) + x.re } else { (x.re - t.re) + s.re };
        comp.im += if s.im.abs() >= x.im.abs() { (s.im - t.im) + x.im } else { (x.im - t.im) + s.im };
        s = t;
    }
    s + comp
}

/// `∬_region f dA` to absolute tolerance `opts.tol`. `singular` lists points
/// where the integrand may blow up; they become cell corners.
pub fn integrate<F>(region: Region, f: F, singular: &[C], opts: QuadratureOptions) -> Result<QuadratureReport>
where
    F: Fn(C) -> C + Sync,
{
    let g = |z: C, out: &mut [C]| out[0] = f(z);
    let reports = integrate_many(region, 1, g, singular, opts)?;
    Ok(reports[0])
}

/// Several integrands on one adaptive mesh; the tolerance applies to each.
pub fn integrate_many<F>(
    region: Region,
    dim: usize,
    f: F,
    singular: &[C],
    opts: QuadratureOptions,
) -> Result<Vec<QuadratureReport>>
where
    F: Fn(C, &mut [C]) + Sync,
{
    let engine = Engine { region, dim, f: &f };
    let (cells, error, evaluations) = engine.run(&Breakpoints::new(region, singular), opts)?;
    Ok((0..dim)
        .map(|k| QuadratureReport {
            value: neumaier(cells.iter().map(|c| c.fine[k])),
            error,
            cells: cells.len(),
            evaluations,
        })
        .collect())
}

/// Fixed quadrature nodes in the region, produced by adaptive refinement and
/// reusable for integrands of similar shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mesh {
    pub region: Region,
    pub points: Vec<C>,
    pub weights: Vec<f64>,
    pub cells: usize,
}

impl Mesh {
    /// Refine for the integrands `f` and keep the nodes of the finest level.
    pub fn build<F>(region: Region, dim: usize, f: F, singular: &[C], opts: QuadratureOptions) -> Result<Mesh>
    where
        F: Fn(C, &mut [C]) + Sync,
    {
        let engine = Engine { region, dim, f: &f };
        let (cells, _, _) = engine.run(&Breakpoints::new(region, singular), opts)?;
        let mut nodes = Vec::with_capacity(cells.len() * 4 * ORDER * ORDER);
        for c in &cells {
            for child in c.rect.children() {
                child.nodes(region, &mut nodes);
            }
        }
        let (points, weights) = nodes.into_iter().unzip();
        Ok(Mesh { region, points, weights, cells: cells.len() })
    }

    pub fn integrate<F: Fn(C) -> C + Sync>(&self, f: F) -> C {
        let parts: Vec<C> = self
            .points
            .par_chunks(4096)
            .zip(self.weights.par_chunks(4096))
            .map(|(p, w)| neumaier(p.iter().zip(w).map(|(&z, &wt)| f(z) * wt)))
            .collect();
        neumaier(parts)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
