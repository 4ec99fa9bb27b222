mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qcvar::variation::Normalization;
use qcvar::{Complex64 as C, ErrorKind};

use config::{Format, Overrides, RunConfig};

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self { code: 4, message: message.into() }
    }
}

impl From<qcvar::Error> for CliError {
    fn from(e: qcvar::Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Input => 2,
            ErrorKind::Domain => 3,
            ErrorKind::Numerical => 4,
        };
        Self { code, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(name = "qcvar", version, about = "Grunsky norms, quasiconformal variations and extremal problems")]
struct Cli {
    /// TOML file with run settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Grunsky truncation N.
    #[arg(long, global = true)]
    trunc: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Hydrodynamic,
    UnitPoint,
}

impl From<NormArg> for Normalization {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Hydrodynamic => Normalization::Hydrodynamic,
            NormArg::UnitPoint => Normalization::UnitPoint,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Grunsky matrix and norm of a class-Σ series.
    Grunsky {
        /// Series JSON: {domain, lo, hi, coeffs}.
        series: PathBuf,
        /// Matrix size; defaults to --trunc.
        #[arg(short = 'n', long)]
        size: Option<usize>,
        /// Treat coefficients below the given window as zero.
        #[arg(long)]
        exact: bool,
    },
    /// Coefficient bounds 2k/(n-1) and k_n brackets.
    CoeffBounds {
        #[arg(long, default_value_t = 2)]
        n_min: u32,
        #[arg(long, default_value_t = 8)]
        n_max: u32,
        #[arg(short, long)]
        k: f64,
    },
    /// L1 distance from ψ₀ to the span of ρ_s, with a KKT check.
    Extremal {
        /// Quadratic differential JSON: {domain, terms}.
        psi0: PathBuf,
        /// JSON array of points e_s, each [re, im] or "inf".
        points: PathBuf,
    },
    /// Grunsky and Teichmüller distance bounds along a family.
    MetricSweep {
        #[arg(long, default_value = "b1_map")]
        family: String,
        /// b for b1_map, as re,im.
        #[arg(long, value_parser = parse_complex, default_value = "0.6,0")]
        b: C,
        /// Symmetry order for koebe_qc.
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 0.9)]
        r_max: f64,
        /// Points per ray.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Number of rays.
        #[arg(long, default_value_t = 1)]
        angles: usize,
        /// JSON array of t values, replacing the radial grid.
        #[arg(long)]
        t_file: Option<PathBuf>,
    },
    /// Solve the Beltrami equation for a field supported in the disk.
    BeltramiSolve {
        /// Beltrami field JSON.
        #[arg(long)]
        field: Option<PathBuf>,
        /// Constant field on the disk, as re,im.
        #[arg(long, value_parser = parse_complex)]
        constant: Option<C>,
        #[arg(long, value_enum, default_value = "hydrodynamic")]
        normalization: NormArg,
        /// Write the grid dump of f here.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Compare the first-order value of a functional with full solves.
    VariationCheck {
        /// Functional JSON: {terms: [{point, order, weight}], normalization}.
        functional: PathBuf,
        #[arg(long)]
        field: Option<PathBuf>,
        #[arg(long, value_parser = parse_complex)]
        constant: Option<C>,
        #[arg(long, value_delimiter = ',', default_value = "0.02,0.01,0.005")]
        eps: Vec<f64>,
    },
}

fn parse_complex(s: &str) -> Result<C, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parse = |p: &str| p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(C::new(parse(re)?, 0.0)),
        [re, im] => Ok(C::new(parse(re)?, parse(im)?)),
        _ => Err(format!("expected re or re,im, got {s:?}")),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let flags = Overrides { truncation: cli.trunc, tol: cli.tol, seed: cli.seed, out: cli.out, format: cli.format };
    let cfg = RunConfig::load(cli.config.as_deref(), flags)?;
    match cli.command {
        Command::Grunsky { series, size, exact } => commands::grunsky(&series, size, exact, &cfg),
        Command::CoeffBounds { n_min, n_max, k } => commands::coeff_bounds(n_min, n_max, k, &cfg),
        Command::Extremal { psi0, points } => commands::extremal(&psi0, &points, &cfg),
        Command::MetricSweep { family, b, n, r_max, count, angles, t_file } => commands::sweep(
            commands::SweepArgs { family: &family, b, n, r_max, count, angles, t_file: t_file.as_deref() },
            &cfg,
        ),
        Command::BeltramiSolve { field, constant, normalization, dump } => {
            commands::beltrami_solve(field.as_deref(), constant, normalization.into(), dump.as_deref(), &cfg)
        }
        Command::VariationCheck { functional, field, constant, eps } => {
            commands::variation_check(&functional, field.as_deref(), constant, &eps, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
