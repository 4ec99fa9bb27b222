use std::io::Write;

use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::CliError;

/// A report that renders as JSON or as CSV rows.
pub trait Report: Serialize {
    fn csv_header(&self) -> Vec<&'static str>;
    fn csv_rows(&self) -> Vec<Vec<String>>;
}

pub fn emit<R: Report>(report: &R, cfg: &RunConfig) -> Result<(), CliError> {
    let bytes = match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| CliError::input(e.to_string()))?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(report.csv_header()).map_err(csv_err)?;
            for row in report.csv_rows() {
                w.write_record(&row).map_err(csv_err)?;
            }
            w.into_inner().map_err(|e| CliError::input(e.to_string()))?
        }
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::input(e.to_string())),
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::input(e.to_string())
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}
