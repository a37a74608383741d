//! Experiment configuration files (TOML).
//!
//! ```toml
//! genus = 1
//! prime_bound = 1000000
//! mode = "abs"
//! c_values = [1.0, 1.2, 1.5, 1.9]
//! seed = 7
//!
//! [sampler]
//! kind = "sato_tate_g1"
//! ```
//!
//! `s_grid`, `x_grid` and `log_l_s` are optional. Every default is written
//! back into the report so a run can be reproduced from the report alone.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ShellError;
use crate::density::{default_s_grid, default_x_grid};
use crate::sim::{SamplerKind, SamplerSpec};
use crate::verify::Mode;

/// `s` values at which the log-L decomposition is reported by default.
pub const DEFAULT_LOG_L_S: [f64; 3] = [1.01, 1.1, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    Json,
}

impl InputFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(InputFormat::Csv),
            "json" => Some(InputFormat::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    pub kind: SamplerKind,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub multipliers: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Option<InputFormat>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

/// The file as written by the user.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub genus: Option<usize>,
    pub prime_bound: Option<u64>,
    pub mode: Mode,
    pub c_values: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    pub s_grid: Option<Vec<f64>>,
    pub x_grid: Option<Vec<u64>>,
    pub log_l_s: Option<Vec<f64>>,
    pub sampler: Option<SamplerSection>,
    pub input: Option<InputSection>,
    #[serde(default)]
    pub output: OutputSection,
}

/// Where the per-prime data comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Sampler(SamplerSpec),
    Input { path: PathBuf, format: InputFormat },
}

/// A validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// `None` for ingested data until the file has been read.
    pub genus: Option<usize>,
    /// `None` for ingested data: the bound is the largest ingested prime.
    pub prime_bound: Option<u64>,
    pub mode: Mode,
    pub c_values: Vec<f64>,
    pub seed: u64,
    pub s_grid: Vec<f64>,
    /// Empty means decades up to the resolved bound.
    pub x_grid: Vec<u64>,
    pub log_l_s: Vec<f64>,
    pub source: Source,
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
}

fn field_err(field: &str, message: impl Into<String>) -> ShellError {
    ShellError::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ShellError> {
        let text = std::fs::read_to_string(path).map_err(|source| ShellError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::parse(&text)?;
        // relative paths are resolved against the config file
        let base = path.parent().unwrap_or(Path::new(""));
        if let Source::Input { path: input, .. } = &mut cfg.source {
            if input.is_relative() {
                *input = base.join(&*input);
            }
        }
        if let Some(dir) = &mut cfg.output_dir {
            if dir.is_relative() {
                *dir = base.join(&*dir);
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, ShellError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| {
                    let before = &text[..s.start.min(text.len())];
                    let line = before.matches('\n').count() + 1;
                    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                    format!("line {line} column {col}")
                })
                .unwrap_or_else(|| "config".to_string());
            field_err(&field, e.message().to_string())
        })?;
        Self::from_raw(raw)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self, ShellError> {
        if raw.c_values.is_empty() {
            return Err(field_err("c_values", "must list at least one threshold"));
        }
        if let Some((i, c)) = raw
            .c_values
            .iter()
            .enumerate()
            .find(|(_, c)| !(**c > 0.0 && c.is_finite()))
        {
            return Err(field_err(
                &format!("c_values[{i}]"),
                format!("{c} is not > 0"),
            ));
        }
        let s_grid = raw.s_grid.unwrap_or_else(default_s_grid);
        check_s_list("s_grid", &s_grid)?;
        let log_l_s = raw.log_l_s.unwrap_or_else(|| DEFAULT_LOG_L_S.to_vec());
        check_s_list("log_l_s", &log_l_s)?;
        if let Some(g) = raw.genus {
            if g == 0 {
                return Err(field_err("genus", "must be at least 1"));
            }
        }

        let source = match (raw.sampler, raw.input) {
            (Some(_), Some(_)) => {
                return Err(field_err(
                    "sampler",
                    "give either [sampler] or [input], not both",
                ))
            }
            (None, None) => return Err(field_err("sampler", "missing [sampler] or [input]")),
            (Some(s), None) => {
                let genus = raw
                    .genus
                    .ok_or_else(|| field_err("genus", "required with [sampler]"))?;
                let spec = SamplerSpec {
                    kind: s.kind,
                    genus,
                    c: s.c,
                    multipliers: s.multipliers,
                    seed: raw.seed,
                };
                spec.validate()
                    .map_err(|e| field_err("sampler", e.to_string()))?;
                if raw.prime_bound.is_none() {
                    return Err(field_err("prime_bound", "required with [sampler]"));
                }
                Source::Sampler(spec)
            }
            (None, Some(input)) => {
                let format = match input.format {
                    Some(f) => f,
                    None => InputFormat::from_path(&input.path).ok_or_else(|| {
                        field_err("input.format", "cannot infer format from extension")
                    })?,
                };
                Source::Input {
                    path: input.path,
                    format,
                }
            }
        };

        if let Some(x) = raw.prime_bound {
            if x < 2 {
                return Err(field_err("prime_bound", format!("{x} is below 2")));
            }
        }
        let x_grid = raw.x_grid.unwrap_or_default();
        if let Some(i) = x_grid.iter().position(|&x| x < 2) {
            return Err(field_err(&format!("x_grid[{i}]"), "cutoffs must be >= 2"));
        }
        if let Some(bound) = raw.prime_bound {
            if let Some(i) = x_grid.iter().position(|&x| x > bound) {
                return Err(field_err(
                    &format!("x_grid[{i}]"),
                    format!("cutoff exceeds prime_bound {bound}"),
                ));
            }
        }

        Ok(Self {
            genus: raw.genus,
            prime_bound: raw.prime_bound,
            mode: raw.mode,
            c_values: raw.c_values,
            seed: raw.seed,
            s_grid,
            x_grid,
            log_l_s,
            source,
            output_dir: raw.output.dir,
        })
    }

    /// Replaces the seed, including the sampler's copy.
    pub fn override_seed(&mut self, seed: u64) {
        self.seed = seed;
        if let Source::Sampler(spec) = &mut self.source {
            spec.seed = seed;
        }
    }

    /// The x-grid to use once the prime bound is known.
    pub fn x_grid_for(&self, bound: u64) -> Vec<u64> {
        if self.x_grid.is_empty() {
            default_x_grid(bound)
        } else {
            self.x_grid.clone()
        }
    }
}

fn check_s_list(field: &str, values: &[f64]) -> Result<(), ShellError> {
    if values.is_empty() {
        return Err(field_err(field, "must not be empty"));
    }
    match values.iter().position(|s| !(*s > 1.0 && s.is_finite())) {
        Some(i) => Err(field_err(
            &format!("{field}[{i}]"),
            format!("{} is not > 1", values[i]),
        )),
        None => Ok(()),
    }
}
