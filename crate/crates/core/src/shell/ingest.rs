//! Reading per-prime eigenvalue data from CSV or JSON.
//!
//! CSV: a header naming `p` and either `theta0..thetaG` (Satake angles in
//! radians) or `mu`, or both. Optional `abs0..absG` columns carry recorded
//! moduli and are checked for temperedness.
//!
//! JSON: an array of objects `{"p": 2, "theta": [...], "abs": [...], "mu": 1.0}`
//! with the same optional fields.

use std::collections::HashSet;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use super::config::InputFormat;
use crate::density::sieve;
use crate::satake::SatakeTuple;
use crate::verify::{Eigenvalues, SatakeAssignment};

/// Angles must satisfy the central constraint to this tolerance.
pub const TOL_INGEST_CONSTRAINT: f64 = 1e-8;
/// Recorded `mu` and `mu` recomputed from angles may differ by this much.
pub const TOL_INGEST_MU: f64 = 1e-6;

/// One prime's worth of ingested data.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueRecord {
    /// 1-based line (CSV) or record index (JSON) the data came from.
    pub line: usize,
    pub p: u64,
    pub angles: Option<Vec<f64>>,
    pub moduli: Option<Vec<f64>>,
    pub mu: Option<f64>,
}

impl EigenvalueRecord {
    /// The Satake tuple, when angles are present.
    pub fn tuple(&self) -> Option<SatakeTuple> {
        let angles = self.angles.as_ref()?;
        let t = SatakeTuple::new(angles.len().checked_sub(1)?, angles.clone()).ok()?;
        match &self.moduli {
            Some(m) => t.with_recorded_moduli(m.clone()).ok(),
            None => Some(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IngestErrorKind {
    /// Malformed file or row.
    Parse,
    /// Non-prime `p`, constraint violation, missing prime, ...
    Domain,
    /// Angles and `mu` both present but inconsistent.
    Ambiguity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestError {
    pub kind: IngestErrorKind,
    /// `"line 4"`, `"record 2"`, `"header"`, ...
    pub location: String,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            IngestErrorKind::Parse => "parse error",
            IngestErrorKind::Domain => "domain error",
            IngestErrorKind::Ambiguity => "ambiguity error",
        };
        write!(f, "{kind} at {}", self.location)?;
        if let Some(field) = &self.field {
            write!(f, ", field `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for IngestError {}

fn err(
    kind: IngestErrorKind,
    location: impl Into<String>,
    field: Option<&str>,
    message: impl Into<String>,
) -> IngestError {
    IngestError {
        kind,
        location: location.into(),
        field: field.map(str::to_string),
        message: message.into(),
    }
}

pub fn ingest(path: &Path, format: InputFormat) -> Result<Vec<EigenvalueRecord>, IngestError> {
    let mut text = String::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| {
            err(
                IngestErrorKind::Parse,
                path.display().to_string(),
                None,
                e.to_string(),
            )
        })?;
    ingest_str(&text, format)
}

pub fn ingest_str(text: &str, format: InputFormat) -> Result<Vec<EigenvalueRecord>, IngestError> {
    let records = match format {
        InputFormat::Csv => parse_csv(text)?,
        InputFormat::Json => parse_json(text)?,
    };
    validate_records(&records)?;
    Ok(records)
}

struct CsvLayout {
    p: usize,
    theta: Vec<usize>,
    abs: Vec<usize>,
    mu: Option<usize>,
}

fn indexed_columns(headers: &csv::StringRecord, prefix: &str) -> Result<Vec<usize>, IngestError> {
    let mut found: Vec<(usize, usize)> = Vec::new();
    for (col, name) in headers.iter().enumerate() {
        if let Some(rest) = name.strip_prefix(prefix) {
            let k: usize = rest.parse().map_err(|_| {
                err(
                    IngestErrorKind::Parse,
                    "header",
                    Some(name),
                    "unknown column",
                )
            })?;
            found.push((k, col));
        }
    }
    found.sort_unstable();
    for (expected, (k, _)) in found.iter().enumerate() {
        if *k != expected {
            return Err(err(
                IngestErrorKind::Parse,
                "header",
                Some(&format!("{prefix}{expected}")),
                "columns must run 0..G without gaps",
            ));
        }
    }
    Ok(found.into_iter().map(|(_, col)| col).collect())
}

fn csv_layout(headers: &csv::StringRecord) -> Result<CsvLayout, IngestError> {
    for name in headers.iter() {
        let known =
            name == "p" || name == "mu" || name.starts_with("theta") || name.starts_with("abs");
        if !known {
            return Err(err(
                IngestErrorKind::Parse,
                "header",
                Some(name),
                "unknown column",
            ));
        }
    }
    let p = headers.iter().position(|h| h == "p").ok_or_else(|| {
        err(
            IngestErrorKind::Parse,
            "header",
            Some("p"),
            "missing column",
        )
    })?;
    let theta = indexed_columns(headers, "theta")?;
    let abs = indexed_columns(headers, "abs")?;
    let mu = headers.iter().position(|h| h == "mu");
    if theta.is_empty() && mu.is_none() {
        return Err(err(
            IngestErrorKind::Parse,
            "header",
            None,
            "need theta0..thetaG or mu columns",
        ));
    }
    if theta.len() == 1 {
        return Err(err(
            IngestErrorKind::Parse,
            "header",
            Some("theta1"),
            "genus must be at least 1 (theta0 and theta1 required)",
        ));
    }
    if !abs.is_empty() && abs.len() != theta.len() {
        return Err(err(
            IngestErrorKind::Parse,
            "header",
            Some("abs"),
            "abs columns must match theta columns",
        ));
    }
    Ok(CsvLayout { p, theta, abs, mu })
}

fn parse_float(cell: &str, location: &str, field: &str) -> Result<f64, IngestError> {
    let v: f64 = cell.trim().parse().map_err(|_| {
        err(
            IngestErrorKind::Parse,
            location,
            Some(field),
            format!("`{cell}` is not a number"),
        )
    })?;
    if !v.is_finite() {
        return Err(err(
            IngestErrorKind::Parse,
            location,
            Some(field),
            "not finite",
        ));
    }
    Ok(v)
}

/// All-or-nothing optional group of cells.
fn parse_group(
    row: &csv::StringRecord,
    cols: &[usize],
    prefix: &str,
    location: &str,
) -> Result<Option<Vec<f64>>, IngestError> {
    if cols.is_empty() {
        return Ok(None);
    }
    let empty = cols.iter().filter(|&&c| row[c].trim().is_empty()).count();
    if empty == cols.len() {
        return Ok(None);
    }
    if empty != 0 {
        return Err(err(
            IngestErrorKind::Parse,
            location,
            Some(prefix),
            "some but not all columns are empty",
        ));
    }
    cols.iter()
        .enumerate()
        .map(|(k, &c)| parse_float(&row[c], location, &format!("{prefix}{k}")))
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn parse_csv(text: &str) -> Result<Vec<EigenvalueRecord>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| err(IngestErrorKind::Parse, "header", None, e.to_string()))?
        .clone();
    let layout = csv_layout(&headers)?;
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            err(
                IngestErrorKind::Parse,
                format!("line {line}"),
                None,
                e.to_string(),
            )
        })?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        let location = format!("line {line}");
        let p: u64 = row[layout.p].trim().parse().map_err(|_| {
            err(
                IngestErrorKind::Parse,
                &location,
                Some("p"),
                format!("`{}` is not a positive integer", &row[layout.p]),
            )
        })?;
        let angles = parse_group(&row, &layout.theta, "theta", &location)?;
        let moduli = parse_group(&row, &layout.abs, "abs", &location)?;
        let mu = match layout.mu {
            Some(c) if !row[c].trim().is_empty() => Some(parse_float(&row[c], &location, "mu")?),
            _ => None,
        };
        if angles.is_none() && mu.is_none() {
            return Err(err(
                IngestErrorKind::Parse,
                &location,
                None,
                "row has neither angles nor mu",
            ));
        }
        if moduli.is_some() && angles.is_none() {
            return Err(err(
                IngestErrorKind::Parse,
                &location,
                Some("abs"),
                "moduli without angles",
            ));
        }
        out.push(EigenvalueRecord {
            line,
            p,
            angles,
            moduli,
            mu,
        });
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRecord {
    p: u64,
    #[serde(default)]
    theta: Option<Vec<f64>>,
    #[serde(default)]
    abs: Option<Vec<f64>>,
    #[serde(default)]
    mu: Option<f64>,
}

fn parse_json(text: &str) -> Result<Vec<EigenvalueRecord>, IngestError> {
    let raw: Vec<JsonRecord> = serde_json::from_str(text).map_err(|e| {
        err(
            IngestErrorKind::Parse,
            format!("line {} column {}", e.line(), e.column()),
            None,
            e.to_string(),
        )
    })?;
    let mut out = Vec::with_capacity(raw.len());
    for (i, r) in raw.into_iter().enumerate() {
        let location = format!("record {i}");
        if r.theta.is_none() && r.mu.is_none() {
            return Err(err(
                IngestErrorKind::Parse,
                location,
                None,
                "neither theta nor mu",
            ));
        }
        if let Some(theta) = &r.theta {
            if theta.len() < 2 {
                return Err(err(
                    IngestErrorKind::Parse,
                    location,
                    Some("theta"),
                    "need at least theta0 and theta1",
                ));
            }
            if r.abs.as_ref().is_some_and(|a| a.len() != theta.len()) {
                return Err(err(
                    IngestErrorKind::Parse,
                    location,
                    Some("abs"),
                    "length differs from theta",
                ));
            }
        } else if r.abs.is_some() {
            return Err(err(
                IngestErrorKind::Parse,
                location,
                Some("abs"),
                "moduli without angles",
            ));
        }
        out.push(EigenvalueRecord {
            line: i,
            p: r.p,
            angles: r.theta,
            moduli: r.abs,
            mu: r.mu,
        });
    }
    Ok(out)
}

fn location_of(r: &EigenvalueRecord, json_like: bool) -> String {
    if json_like {
        format!("record {}", r.line)
    } else {
        format!("line {}", r.line)
    }
}

fn validate_records(records: &[EigenvalueRecord]) -> Result<(), IngestError> {
    let Some(max_p) = records.iter().map(|r| r.p).max() else {
        return Ok(());
    };
    // CSV line numbers start at 2 (after the header); JSON indices at 0
    let json_like = records.first().is_some_and(|r| r.line == 0);
    let table = if max_p >= 2 {
        Some(
            sieve(max_p)
                .map_err(|e| err(IngestErrorKind::Domain, "data", Some("p"), e.to_string()))?,
        )
    } else {
        None
    };
    let genus = records
        .iter()
        .find_map(|r| r.angles.as_ref().map(|a| a.len() - 1));
    let mut seen = HashSet::new();
    for r in records {
        let location = location_of(r, json_like);
        if !table.as_ref().is_some_and(|t| t.contains(r.p)) {
            return Err(err(
                IngestErrorKind::Domain,
                location,
                Some("p"),
                format!("{} is not prime", r.p),
            ));
        }
        if !seen.insert(r.p) {
            return Err(err(
                IngestErrorKind::Domain,
                location,
                Some("p"),
                format!("{} appears twice", r.p),
            ));
        }
        let Some(angles) = &r.angles else { continue };
        if Some(angles.len() - 1) != genus {
            return Err(err(
                IngestErrorKind::Domain,
                location,
                Some("theta"),
                "genus differs from earlier records",
            ));
        }
        let tuple = r.tuple().ok_or_else(|| {
            err(
                IngestErrorKind::Parse,
                &location,
                Some("theta"),
                "malformed angles",
            )
        })?;
        if let Some(v) = tuple.validate(TOL_INGEST_CONSTRAINT).into_iter().next() {
            let field = match v {
                crate::satake::Violation::CentralCharacter { .. } => "theta".to_string(),
                crate::satake::Violation::NotTempered { index, .. } => format!("abs{index}"),
            };
            return Err(err(
                IngestErrorKind::Domain,
                location,
                Some(&field),
                v.to_string(),
            ));
        }
        if let Some(mu) = r.mu {
            let from_angles = tuple
                .mu_with_tol(TOL_INGEST_CONSTRAINT * 16.0)
                .map_err(|e| {
                    err(
                        IngestErrorKind::Domain,
                        &location,
                        Some("theta"),
                        e.to_string(),
                    )
                })?;
            if (mu - from_angles).abs() > TOL_INGEST_MU {
                return Err(err(
                    IngestErrorKind::Ambiguity,
                    location,
                    Some("mu"),
                    format!("mu = {mu} but the angles give {from_angles}"),
                ));
            }
        }
    }
    Ok(())
}

/// Ingested data laid out over the primes up to the largest ingested prime.
#[derive(Debug, Clone)]
pub enum IngestedData {
    /// Every record carried angles.
    Satake(SatakeAssignment),
    /// At least one record had only `mu`; standard-side quantities are unavailable.
    MuOnly(Eigenvalues),
}

impl IngestedData {
    pub fn genus(&self) -> usize {
        match self {
            IngestedData::Satake(a) => a.genus(),
            IngestedData::MuOnly(e) => e.genus,
        }
    }

    pub fn eigenvalues(&self) -> crate::Result<Eigenvalues> {
        match self {
            IngestedData::Satake(a) => a.eigenvalues(),
            IngestedData::MuOnly(e) => Ok(e.clone()),
        }
    }
}

/// Arranges validated records by prime. The records must cover every prime
/// up to the largest one present.
///
/// `genus` is required for bare-`mu` data and otherwise must agree with
/// the angle count.
pub fn arrange(
    mut records: Vec<EigenvalueRecord>,
    genus: Option<usize>,
) -> Result<IngestedData, IngestError> {
    if records.is_empty() {
        return Err(err(IngestErrorKind::Domain, "data", None, "no records"));
    }
    records.sort_by_key(|r| r.p);
    let max_p = records.last().map(|r| r.p).unwrap_or(2);
    let table = Arc::new(
        sieve(max_p).map_err(|e| err(IngestErrorKind::Domain, "data", Some("p"), e.to_string()))?,
    );
    if let Some((q, _)) = table
        .primes()
        .iter()
        .zip(records.iter().map(|r| r.p).chain(std::iter::repeat(0)))
        .find(|(q, p)| q != &p)
    {
        return Err(err(
            IngestErrorKind::Domain,
            "data",
            Some("p"),
            format!("prime {q} is missing; records must cover every prime up to {max_p}"),
        ));
    }
    let angle_genus = records
        .iter()
        .find_map(|r| r.angles.as_ref().map(|a| a.len() - 1));
    let genus = match (genus, angle_genus) {
        (Some(g), Some(a)) if g != a => {
            return Err(err(
                IngestErrorKind::Domain,
                "data",
                Some("genus"),
                format!("configured genus {g} but the angles have genus {a}"),
            ))
        }
        (Some(g), _) => g,
        (None, Some(a)) => a,
        (None, None) => {
            return Err(err(
                IngestErrorKind::Domain,
                "data",
                Some("genus"),
                "bare mu data needs the genus in the configuration",
            ))
        }
    };
    let to_err = |e: crate::Error| err(IngestErrorKind::Domain, "data", None, e.to_string());

    if records.iter().all(|r| r.angles.is_some()) {
        let tuples = records
            .iter()
            .map(|r| r.tuple().expect("validated angles"))
            .collect();
        let assignment = SatakeAssignment::new(genus, table, tuples).map_err(to_err)?;
        return Ok(IngestedData::Satake(assignment));
    }
    let mu = records
        .iter()
        .map(|r| match r.mu {
            Some(m) => Ok(m),
            None => r
                .tuple()
                .expect("validated angles")
                .mu_with_tol(TOL_INGEST_CONSTRAINT * 16.0)
                .map_err(to_err),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Eigenvalues::from_mu(genus, table, mu)
        .map(IngestedData::MuOnly)
        .map_err(to_err)
}
