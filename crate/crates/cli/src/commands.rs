use std::path::Path;

use qcvar::extremal::{
    coeff_bound, kkt_check, kn_bracket, l1_distance_to_span, rho_basis, ExtremalOptions, ExtremalSolution, KktReport,
};
use qcvar::grunsky::{grunsky_coefficients, grunsky_norm, MatrixDump};
use qcvar::metrics::{metric_sweep, radial_grid, MetricFamily, MetricSample};
use qcvar::quaddiff::{BeltramiField, PolePoint, QuadDiff, QuadratureOptions};
use qcvar::variation::{
    first_order_value, solve_beltrami, FunctionalSpec, GridDump, Normalization, SolverOptions,
};
use qcvar::{Complex64 as C, Domain, LaurentSeries};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{emit, num, Report};
use crate::CliError;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string(value).map_err(|e| CliError::input(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

#[derive(Serialize)]
pub struct GrunskyReport {
    #[serde(rename = "N")]
    n: usize,
    norm: f64,
    half_norm: f64,
    converged: bool,
    matrix: MatrixDump,
}

impl Report for GrunskyReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["N", "norm", "half_norm", "converged"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![self.n.to_string(), num(self.norm), num(self.half_norm), self.converged.to_string()]]
    }
}

pub fn grunsky(series: &Path, n: Option<usize>, exact: bool, cfg: &RunConfig) -> Result<(), CliError> {
    let mut f: LaurentSeries = read_json(series)?;
    let n = n.unwrap_or(cfg.truncation);
    let need = 1 - 2 * n as i32;
    if exact && f.domain() == Domain::Exterior && f.lo() > need {
        let mut coeffs = vec![C::new(0.0, 0.0); (f.lo() - need) as usize];
        coeffs.extend_from_slice(f.coeffs());
        f = LaurentSeries::new(Domain::Exterior, need, coeffs);
    }
    let g = grunsky_coefficients(&f, n)?;
    let norm = grunsky_norm(&g);
    let report = GrunskyReport { n, norm: norm.value, half_norm: norm.half, converged: norm.converged, matrix: g.dump() };
    emit(&report, cfg)
}

#[derive(Serialize)]
pub struct BoundRow {
    n: u32,
    k: f64,
    bound: f64,
    admissible: bool,
    kn_lower: Option<f64>,
    kn_upper: Option<f64>,
    kn_root: Option<f64>,
}

#[derive(Serialize)]
pub struct BoundTable {
    rows: Vec<BoundRow>,
}

impl Report for BoundTable {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["n", "k", "bound", "admissible", "kn_lower", "kn_upper", "kn_root"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    num(r.k),
                    num(r.bound),
                    r.admissible.to_string(),
                    opt(r.kn_lower),
                    opt(r.kn_upper),
                    opt(r.kn_root),
                ]
            })
            .collect()
    }
}

pub fn coeff_bounds(n_min: u32, n_max: u32, k: f64, cfg: &RunConfig) -> Result<(), CliError> {
    if n_min < 2 || n_max < n_min {
        return Err(CliError::domain(format!("need 2 <= n-min <= n-max, got {n_min}..{n_max}")));
    }
    let mut rows = Vec::new();
    for n in n_min..=n_max {
        let b = coeff_bound(n, k)?;
        let bracket = if n >= 3 { Some(kn_bracket(n)?) } else { None };
        if bracket.is_some_and(|b| !b.crossing_ok) {
            return Err(CliError::numerical(format!("k_n crossing check failed for n = {n}")));
        }
        rows.push(BoundRow {
            n,
            k,
            bound: b.bound,
            admissible: b.admissible,
            kn_lower: bracket.map(|b| b.lower),
            kn_upper: bracket.map(|b| b.upper),
            kn_root: bracket.map(|b| b.root),
        });
    }
    emit(&BoundTable { rows }, cfg)
}

#[derive(Serialize)]
pub struct ExtremalReport {
    #[serde(flatten)]
    solution: ExtremalSolution,
    kkt_check: KktReport,
}

impl Report for ExtremalReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["s", "xi_re", "xi_im", "kkt_residual", "d"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let d = num(self.solution.d);
        let mut rows: Vec<Vec<String>> = self
            .solution
            .xi
            .iter()
            .enumerate()
            .map(|(s, x)| vec![(s + 1).to_string(), num(x.re), num(x.im), num(self.kkt_check.residuals[s]), d.clone()])
            .collect();
        let last = self.kkt_check.residuals.last().copied().unwrap_or(0.0);
        rows.push(vec!["psi0".into(), String::new(), String::new(), num(last), d]);
        rows
    }
}

pub fn extremal(psi0: &Path, points: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    let psi0: QuadDiff = read_json(psi0)?;
    let points: Vec<PolePoint> = read_json(points)?;
    let basis = rho_basis(&points)?;
    let opts = ExtremalOptions { tol: cfg.tol, restarts: cfg.restarts, seed: cfg.seed, ..ExtremalOptions::default() };
    let solution = l1_distance_to_span(&psi0, &basis, &opts)?;
    let check = kkt_check(&solution, &psi0, &basis, opts.kkt_tol)?;
    let passed = check.passed;
    emit(&ExtremalReport { solution, kkt_check: check }, cfg)?;
    if !passed {
        return Err(CliError::numerical("independent KKT check failed"));
    }
    Ok(())
}

#[derive(Serialize)]
pub struct SweepReport {
    family: MetricFamily,
    #[serde(rename = "N")]
    n: usize,
    max_gap: f64,
    max_chain_violation: f64,
    samples: Vec<MetricSample>,
}

impl Report for SweepReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["t_re", "t_im", "lower", "upper", "gap"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.samples.iter().map(|s| vec![num(s.t.re), num(s.t.im), num(s.lower), num(s.upper), num(s.gap)]).collect()
    }
}

pub struct SweepArgs<'a> {
    pub family: &'a str,
    pub b: C,
    pub n: u32,
    pub r_max: f64,
    pub count: usize,
    pub angles: usize,
    pub t_file: Option<&'a Path>,
}

pub fn sweep(args: SweepArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let family = match args.family {
        "b1_map" => MetricFamily::B1Map { b: args.b },
        "koebe_qc" => MetricFamily::KoebeQc { n: args.n },
        other => return Err(CliError::input(format!("unknown family {other:?}; use b1_map or koebe_qc"))),
    };
    let grid: Vec<C> = match args.t_file {
        Some(p) => read_json(p)?,
        None => (0..args.angles)
            .flat_map(|a| radial_grid(args.r_max, args.count, std::f64::consts::TAU * a as f64 / args.angles as f64))
            .collect(),
    };
    let trunc = (2 * cfg.truncation + 8).max(4 * cfg.truncation);
    let s = metric_sweep(family, &grid, cfg.truncation, trunc)?;
    emit(
        &SweepReport {
            family,
            n: s.truncation,
            max_gap: s.max_gap,
            max_chain_violation: s.max_chain_violation,
            samples: s.samples,
        },
        cfg,
    )
}

fn load_field(field: Option<&Path>, constant: Option<C>) -> Result<BeltramiField, CliError> {
    match (field, constant) {
        (Some(p), None) => read_json(p),
        (None, Some(c)) => Ok(BeltramiField::Constant { c }),
        _ => Err(CliError::input("give exactly one of --field and --constant")),
    }
}

#[derive(Serialize)]
pub struct SolveReport {
    grid_size: usize,
    iterations: usize,
    increment: f64,
    residual: f64,
    shift: C,
    fit_radius: f64,
    /// `b_1, b_2, ...` of the fitted expansion.
    b: Vec<C>,
}

impl Report for SolveReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["n", "b_re", "b_im"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.b.iter().enumerate().map(|(i, v)| vec![(i + 1).to_string(), num(v.re), num(v.im)]).collect()
    }
}

pub fn beltrami_solve(
    field: Option<&Path>,
    constant: Option<C>,
    normalization: Normalization,
    dump: Option<&Path>,
    cfg: &RunConfig,
) -> Result<(), CliError> {
    let mu = load_field(field, constant)?;
    let opts = SolverOptions { normalization, grid_size: cfg.grid_size, ..SolverOptions::default() };
    let sol = solve_beltrami(&mu, &opts)?;
    if let Some(p) = dump {
        let d: GridDump = sol.dump();
        write_json(p, &d)?;
    }
    let b = (1..=opts.fit_terms as i32).map(|n| sol.b(n)).collect();
    emit(
        &SolveReport {
            grid_size: sol.mu.grid_size,
            iterations: sol.iterations,
            increment: sol.increment,
            residual: sol.residual,
            shift: sol.shift,
            fit_radius: sol.fit_radius,
            b,
        },
        cfg,
    )
}

#[derive(Serialize)]
pub struct VariationRow {
    eps: f64,
    first_order: C,
    solved: C,
    error: f64,
}

#[derive(Serialize)]
pub struct VariationReport {
    rows: Vec<VariationRow>,
    /// Log-log slope of the error against `eps`; 2 for a correct linearization.
    slope: Option<f64>,
}

impl Report for VariationReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["eps", "first_re", "first_im", "solved_re", "solved_im", "error"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![num(r.eps), num(r.first_order.re), num(r.first_order.im), num(r.solved.re), num(r.solved.im), num(r.error)]
            })
            .collect()
    }
}

pub fn variation_check(
    functional: &Path,
    field: Option<&Path>,
    constant: Option<C>,
    eps: &[f64],
    cfg: &RunConfig,
) -> Result<(), CliError> {
    let j: FunctionalSpec = read_json(functional)?;
    let mu = load_field(field, constant)?;
    if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0)) {
        return Err(CliError::domain("eps values must be positive"));
    }
    let opts = SolverOptions { normalization: j.normalization(), grid_size: cfg.grid_size, tol: 1e-14, ..SolverOptions::default() };
    let quad = QuadratureOptions::with_tol(cfg.tol);
    let mut rows = Vec::new();
    for &e in eps {
        let scaled = mu.scaled(e)?;
        let first_order = first_order_value(&j, &scaled, quad)?;
        let solved = j.evaluate(&solve_beltrami(&scaled, &opts)?);
        rows.push(VariationRow { eps: e, first_order, solved, error: (solved - first_order).norm() });
    }
    let slope = (rows.len() >= 2 && rows.iter().all(|r| r.error > 0.0)).then(|| {
        let x: Vec<f64> = rows.iter().map(|r| r.eps.ln()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.error.ln()).collect();
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let cov: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let var: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        cov / var
    });
    emit(&VariationReport { rows, slope }, cfg)
}
