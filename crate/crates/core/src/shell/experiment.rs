//! The experiment runner: data, bounds per threshold, log-L decompositions,
//! then files.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use super::config::{ExperimentConfig, Source};
use super::emit::{self, BoundEntry, Report, Versions, SCHEMA_VERSION};
use super::ingest::{arrange, ingest, IngestedData};
use super::{ShellError, TOOL_VERSION};
use crate::density::sieve;
use crate::satake::FactorKind;
use crate::sim::build_assignment;
use crate::verify::{verify_theorem, Eigenvalues, LogLDecomposition, LogLSeries};

fn config_err(field: &str, message: impl Into<String>) -> ShellError {
    ShellError::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Builds or reads the per-prime data a configuration describes.
pub fn load_data(config: &ExperimentConfig) -> Result<IngestedData, ShellError> {
    match &config.source {
        Source::Sampler(spec) => {
            let bound = config
                .prime_bound
                .ok_or_else(|| config_err("prime_bound", "required with [sampler]"))?;
            let table = Arc::new(sieve(bound)?);
            Ok(IngestedData::Satake(build_assignment(spec, table)?))
        }
        Source::Input { path, format } => {
            let mut records = ingest(path, *format)?;
            if let Some(bound) = config.prime_bound {
                records.retain(|r| r.p <= bound);
            }
            Ok(arrange(records, config.genus)?)
        }
    }
}

/// A finished run held in memory.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub report: Report,
    pub data: IngestedData,
    pub eigenvalues: Eigenvalues,
}

/// Computes everything a run reports without touching the file system
/// beyond reading ingested data.
///
/// Negative margins are results, not failures: only I/O and validation
/// problems produce an error.
pub fn compute(config: &ExperimentConfig) -> Result<Experiment, ShellError> {
    let data = load_data(config)?;
    let eigen = data.eigenvalues()?;
    let bound = eigen.table.bound();

    let mut resolved = config.clone();
    resolved.genus = Some(data.genus());
    resolved.prime_bound = Some(bound);
    resolved.x_grid = config.x_grid_for(bound);
    if let Some(i) = resolved.x_grid.iter().position(|&x| x > bound) {
        return Err(config_err(
            &format!("x_grid[{i}]"),
            format!("cutoff exceeds the largest prime bound {bound}"),
        ));
    }
    resolved.output_dir = None;

    let bounds = resolved
        .c_values
        .iter()
        .map(|&c| {
            verify_theorem(&eigen, c, resolved.mode, &resolved.s_grid, &resolved.x_grid)
                .map(BoundEntry::from)
        })
        .collect::<crate::Result<Vec<_>>>()?;

    let mut notes = Vec::new();
    let log_l = match &data {
        IngestedData::Satake(a) => {
            let mut rows: Vec<LogLDecomposition> = Vec::new();
            for kind in [FactorKind::Std, FactorKind::Spin] {
                let series = LogLSeries::new(a, kind)?;
                for &s in &resolved.log_l_s {
                    rows.push(series.at(s)?);
                }
            }
            rows
        }
        IngestedData::MuOnly(_) => {
            notes.push("bare eigenvalue data: log L decompositions need Satake angles".to_string());
            Vec::new()
        }
    };

    let report = Report {
        config: resolved,
        bounds,
        log_l,
        notes,
        versions: Versions {
            tool: TOOL_VERSION.to_string(),
            schema: SCHEMA_VERSION,
        },
    };

    Ok(Experiment {
        report,
        data,
        eigenvalues: eigen,
    })
}

/// Writes `report.json` and the CSV series into `out_dir`.
pub fn write_outputs(run: &Experiment, out_dir: &Path) -> Result<(), ShellError> {
    let Experiment {
        report,
        data,
        eigenvalues: eigen,
    } = run;
    fs::create_dir_all(out_dir).map_err(|source| ShellError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let assignment_path = out_dir.join("assignment.csv");
    match &data {
        IngestedData::Satake(a) => emit::write_assignment_csv(&assignment_path, a)?,
        IngestedData::MuOnly(e) => emit::write_mu_csv(&assignment_path, e)?,
    }
    let c_values = &report.config.c_values;
    let mode = report.config.mode;
    emit::write_primes_csv(&out_dir.join("primes.csv"), eigen, c_values, mode)?;
    for (i, &c) in c_values.iter().enumerate() {
        emit::write_exceptional_csv(
            &out_dir.join(format!("exceptional_{i}.csv")),
            eigen,
            c,
            mode,
        )?;
    }
    emit::write_ratio_csv(&out_dir.join("dirichlet.csv"), "s", &report.bounds)?;
    emit::write_ratio_csv(&out_dir.join("natural.csv"), "x", &report.bounds)?;
    emit::write_log_l_csv(&out_dir.join("log_l.csv"), &report.log_l)?;
    emit::write_report(&out_dir.join("report.json"), report)
}

/// [`compute`] followed by [`write_outputs`].
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<Report, ShellError> {
    let run = compute(config)?;
    write_outputs(&run, out_dir)?;
    Ok(run.report)
}
