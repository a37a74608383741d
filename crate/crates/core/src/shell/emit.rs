//! Report and CSV emission.
//!
//! Files written by a run, all UTF-8 with LF line endings:
//!
//! | file | columns |
//! |------|---------|
//! | `assignment.csv` | `p,theta0,...,thetaG` (or `p,mu` for bare eigenvalue data) |
//! | `primes.csv` | `p,mu,member_<c>` per threshold, flags `0`/`1` |
//! | `exceptional_<i>.csv` | `p,mu` for the members at `c_values[i]` |
//! | `dirichlet.csv` | `s,c_<c>` per threshold |
//! | `natural.csv` | `x,c_<c>` per threshold |
//! | `log_l.csv` | `kind,s,log_l,first_order,remainder,remainder_cap,tail_bound` |
//! | `report.json` | see [`REPORT_SCHEMA`] |
//!
//! Floats use the shortest decimal string that parses back to the same value.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::ShellError;
use crate::density::DensityEstimate;
use crate::verify::{
    BoundReport, DivergenceDiagnostic, Eigenvalues, LogLDecomposition, Mode, SatakeAssignment,
    Witness,
};

/// Bumped whenever the report layout changes.
pub const SCHEMA_VERSION: u32 = 1;

/// JSON Schema (draft 2020-12) for `report.json`.
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub tool: String,
    pub schema: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub members: usize,
    pub witnesses: Vec<Witness>,
    pub upper_dirichlet: f64,
    pub lower_dirichlet: f64,
    pub upper_natural: f64,
    pub lower_natural: f64,
    pub extrapolated: bool,
    pub nontrivial_range: Option<(f64, f64)>,
    pub divergence: Option<DivergenceDiagnostic>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub c: f64,
    pub mode: Mode,
    pub bound: f64,
    pub estimates: DensityEstimate,
    pub margin: f64,
    pub diagnostics: Diagnostics,
}

impl From<BoundReport> for BoundEntry {
    fn from(r: BoundReport) -> Self {
        let diagnostics = Diagnostics {
            members: r.members,
            witnesses: r.witnesses,
            upper_dirichlet: r.estimate.upper_dirichlet(),
            lower_dirichlet: r.estimate.lower_dirichlet(),
            upper_natural: r.estimate.upper_natural(),
            lower_natural: r.estimate.lower_natural(),
            extrapolated: r.extrapolated,
            nontrivial_range: r.nontrivial_range,
            divergence: r.divergence,
            notes: r.notes,
        };
        Self {
            c: r.c,
            mode: r.mode,
            bound: r.bound,
            estimates: r.estimate,
            margin: r.margin,
            diagnostics,
        }
    }
}

/// Everything written to `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    /// The configuration with every default and the resolved genus, prime
    /// bound and x-grid filled in.
    pub config: ExperimentConfig,
    pub bounds: Vec<BoundEntry>,
    pub log_l: Vec<LogLDecomposition>,
    pub notes: Vec<String>,
    pub versions: Versions,
}

impl Report {
    pub fn to_json(&self) -> Result<String, ShellError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ShellError + '_ {
    move |source| ShellError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, ShellError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> Result<(), ShellError> {
    w.flush().map_err(io_err(path))
}

pub fn write_assignment_csv(path: &Path, a: &SatakeAssignment) -> Result<(), ShellError> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["p".to_string()];
    header.extend((0..=a.genus()).map(|i| format!("theta{i}")));
    w.write_record(&header)?;
    for (p, t) in a.iter() {
        let mut row = vec![p.to_string()];
        row.extend(t.angles().iter().map(|&x| fmt_f64(x)));
        w.write_record(&row)?;
    }
    finish(w, path)
}

pub fn write_mu_csv(path: &Path, e: &Eigenvalues) -> Result<(), ShellError> {
    let mut w = csv_writer(path)?;
    w.write_record(["p", "mu"])?;
    for (p, mu) in e.table.primes().iter().zip(&e.mu) {
        w.write_record([p.to_string(), fmt_f64(*mu)])?;
    }
    finish(w, path)
}

#[derive(Serialize)]
struct JsonAssignmentRecord<'a> {
    p: u64,
    theta: &'a [f64],
}

/// The JSON counterpart of [`write_assignment_csv`], readable by `ingest`.
pub fn write_assignment_json(path: &Path, a: &SatakeAssignment) -> Result<(), ShellError> {
    let records: Vec<_> = a
        .iter()
        .map(|(p, t)| JsonAssignmentRecord {
            p,
            theta: t.angles(),
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&records)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// `p,mu` and one membership flag per threshold.
pub fn write_primes_csv(
    path: &Path,
    e: &Eigenvalues,
    c_values: &[f64],
    mode: Mode,
) -> Result<(), ShellError> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["p".to_string(), "mu".to_string()];
    header.extend(c_values.iter().map(|c| format!("member_{}", fmt_f64(*c))));
    w.write_record(&header)?;
    for (p, &mu) in e.table.primes().iter().zip(&e.mu) {
        let mut row = vec![p.to_string(), fmt_f64(mu)];
        row.extend(
            c_values
                .iter()
                .map(|&c| if mode.exceeds(mu, c) { "1" } else { "0" }.to_string()),
        );
        w.write_record(&row)?;
    }
    finish(w, path)
}

/// Members of the exceptional set at `c`; header only when the set is empty.
pub fn write_exceptional_csv(
    path: &Path,
    e: &Eigenvalues,
    c: f64,
    mode: Mode,
) -> Result<(), ShellError> {
    let mut w = csv_writer(path)?;
    w.write_record(["p", "mu"])?;
    for (p, &mu) in e.table.primes().iter().zip(&e.mu) {
        if mode.exceeds(mu, c) {
            w.write_record([p.to_string(), fmt_f64(mu)])?;
        }
    }
    finish(w, path)
}

/// One row per grid point, one column per threshold. `axis` is `"s"` or `"x"`.
pub fn write_ratio_csv(path: &Path, axis: &str, entries: &[BoundEntry]) -> Result<(), ShellError> {
    let mut w = csv_writer(path)?;
    let mut header = vec![axis.to_string()];
    header.extend(entries.iter().map(|b| format!("c_{}", fmt_f64(b.c))));
    w.write_record(&header)?;
    let Some(first) = entries.first() else {
        return finish(w, path);
    };
    let rows = if axis == "s" {
        first.estimates.s_grid.len()
    } else {
        first.estimates.x_grid.len()
    };
    for k in 0..rows {
        let mut row = Vec::with_capacity(entries.len() + 1);
        if axis == "s" {
            row.push(fmt_f64(first.estimates.s_grid[k]));
            row.extend(
                entries
                    .iter()
                    .map(|b| fmt_f64(b.estimates.dirichlet_ratios[k])),
            );
        } else {
            row.push(first.estimates.x_grid[k].to_string());
            row.extend(
                entries
                    .iter()
                    .map(|b| fmt_f64(b.estimates.natural_ratios[k])),
            );
        }
        w.write_record(&row)?;
    }
    finish(w, path)
}

pub fn write_log_l_csv(path: &Path, rows: &[LogLDecomposition]) -> Result<(), ShellError> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "kind",
        "s",
        "log_l",
        "first_order",
        "remainder",
        "remainder_cap",
        "tail_bound",
    ])?;
    for d in rows {
        w.write_record([
            d.kind.to_string(),
            fmt_f64(d.s),
            fmt_f64(d.log_l),
            fmt_f64(d.first_order),
            fmt_f64(d.remainder),
            fmt_f64(d.remainder_cap),
            fmt_f64(d.tail_bound),
        ])?;
    }
    finish(w, path)
}

pub fn write_report(path: &Path, report: &Report) -> Result<(), ShellError> {
    let text = report.to_json()?;
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(text.as_bytes()).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            0.0,
            -0.0,
        ] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(2.0), "2");
    }

    #[test]
    fn schema_is_json() {
        let v: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
        let required = v["required"].as_array().unwrap();
        for key in ["config", "bounds", "versions"] {
            assert!(required.iter().any(|k| k == key), "{key}");
        }
    }
}
