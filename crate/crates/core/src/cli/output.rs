use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::quadrature::IntegralEstimate;

/// Shortest decimal string that reads back to the same `f64`.
///
/// Plain notation between `1e-5` and `1e16`, exponent notation outside; `-0` is
/// written as `0`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Comma-separated table with a fixed header, written with `\n` line ends.
pub struct Table {
    header: &'static str,
    body: String,
}

impl Table {
    pub fn new(header: &'static str) -> Self {
        Self {
            header,
            body: String::new(),
        }
    }

    /// Appends a row; `None` becomes an empty cell.
    pub fn row(&mut self, cells: &[Option<f64>]) {
        let line: Vec<String> = cells
            .iter()
            .map(|c| c.map(format_float).unwrap_or_default())
            .collect();
        self.body.push_str(&line.join(","));
        self.body.push('\n');
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(self.header.as_bytes())?;
        f.write_all(b"\n")?;
        f.write_all(self.body.as_bytes())
    }
}

/// Convergence record for one reported integral.
#[derive(Debug, Clone, Serialize)]
pub struct IntegralRecord {
    pub quantity: &'static str,
    pub at: BTreeMap<&'static str, f64>,
    pub value: f64,
    pub est_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl IntegralRecord {
    pub fn new(quantity: &'static str, at: &[(&'static str, f64)], e: &IntegralEstimate) -> Self {
        Self {
            quantity,
            at: at.iter().copied().collect(),
            value: e.value,
            est_error: e.est_error,
            evaluations: e.evaluations,
            converged: e.converged,
        }
    }
}

/// Densities in `(−abs_tol, 0)` are reported as zero; anything lower is kept and
/// counted separately.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct ClampCount {
    pub clamped: usize,
    pub negative: usize,
}

impl ClampCount {
    pub fn apply(&mut self, x: f64, abs_tol: f64) -> f64 {
        if x >= 0.0 {
            x
        } else if x > -abs_tol {
            self.clamped += 1;
            0.0
        } else {
            self.negative += 1;
            x
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: C,
    pub workers: usize,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    pub all_converged: bool,
    pub densities: ClampCount,
    pub integrals: Vec<IntegralRecord>,
}

pub fn write_json(path: &Path, value: &impl Serialize) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}
