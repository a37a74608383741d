//! Satake-parameter local L-factors, Dirichlet coefficient bounds and
//! prime-density estimators for studying how often normalized Hecke
//! eigenvalues of Siegel eigenforms are large.
//!
//! Modules, bottom-up:
//!
//! - [`satake`]: Satake tuples, the eigenvalue relation, local factors.
//! - [`series`]: Dirichlet expansion of local factors, coefficient bounds,
//!   truncated logarithms.
//! - [`density`]: prime tables, subsets, Dirichlet and natural density ratios.
//! - [`verify`]: exceedance inequality, exceptional sets, bound harnesses.
//! - [`sim`]: synthetic Satake assignments.
//! - [`shell`]: experiment configuration, ingestion and report emission.

pub mod density;
pub mod error;
pub mod numeric;
pub mod satake;
pub mod series;
pub mod shell;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
pub use satake::{Branch, FactorKind, LocalFactor, SatakeTuple};
