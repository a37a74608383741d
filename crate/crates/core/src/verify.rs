//! Exceedance inequality, exceptional sets and the density-bound harnesses.
//!
//! The density bounds hold in the limit for forms whose standard (resp.
//! spin) L-function has no pole at `s = 1`. At finite truncation the
//! harnesses report estimates, margins and a pole diagnostic. A negative
//! margin is a finding about the input, never an assertion failure.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{
    density_profile, lfunc_density_bound, prime_zeta, weighted_l_slice, DensityEstimate,
    PrimeSubset, PrimeTable,
};
use crate::error::{Error, Result};
use crate::numeric::par_sum;
use crate::satake::{Branch, FactorKind, SatakeTuple, TOL_CONSTRAINT};
use crate::series::{first_order_remainder_cap, log_local_from_traces, power_sums, DEFAULT_R_CUT};

/// Equality tolerance used throughout this module.
pub const TOL_EQ: f64 = 1e-9;

/// Pole-order estimates above this flag the input as having a pole at 1.
pub const POLE_ORDER_THRESHOLD: f64 = 0.5;

/// At most this many members of an exceptional set are echoed in a report.
pub const MAX_WITNESSES: usize = 16;

/// A Satake tuple for every prime of a table: the local data of a "virtual form".
#[derive(Debug, Clone, PartialEq)]
pub struct SatakeAssignment {
    genus: usize,
    table: Arc<PrimeTable>,
    tuples: Vec<SatakeTuple>,
}

impl SatakeAssignment {
    /// Checks that there is one valid tuple of the given genus per table prime.
    pub fn new(genus: usize, table: Arc<PrimeTable>, tuples: Vec<SatakeTuple>) -> Result<Self> {
        if genus == 0 {
            return Err(Error::ZeroGenus);
        }
        if tuples.len() != table.len() {
            return Err(Error::ShapeMismatch {
                expected: table.len(),
                got: tuples.len(),
            });
        }
        for t in &tuples {
            if t.genus() != genus {
                return Err(Error::GenusMismatch {
                    expected: genus,
                    got: t.genus(),
                });
            }
            if let Some(v) = t.validate(TOL_CONSTRAINT).into_iter().next() {
                return Err(Error::Domain {
                    name: "tuple",
                    value: match v {
                        crate::satake::Violation::CentralCharacter { residual, .. } => residual,
                        crate::satake::Violation::NotTempered { modulus, .. } => modulus,
                    },
                    expected: "a tempered tuple satisfying the central constraint",
                });
            }
        }
        Ok(Self {
            genus,
            table,
            tuples,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn table(&self) -> &Arc<PrimeTable> {
        &self.table
    }

    pub fn tuples(&self) -> &[SatakeTuple] {
        &self.tuples
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &SatakeTuple)> {
        self.table.primes().iter().copied().zip(&self.tuples)
    }

    /// `mu(p)` and `rho(p)` for every prime.
    pub fn eigenvalues(&self) -> Result<Eigenvalues> {
        let mu = self
            .tuples
            .par_iter()
            .map(SatakeTuple::mu)
            .collect::<Result<Vec<_>>>()?;
        let rho = self.tuples.par_iter().map(SatakeTuple::std_trace).collect();
        Ok(Eigenvalues {
            genus: self.genus,
            table: Arc::clone(&self.table),
            mu,
            rho: Some(rho),
        })
    }
}

/// Per-prime `mu(p)` and, when the Satake angles are known, `rho(p)`.
///
/// Data ingested as bare eigenvalues has no `rho`: the standard-side
/// quantities are not recoverable from `mu` alone.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenvalues {
    pub genus: usize,
    pub table: Arc<PrimeTable>,
    pub mu: Vec<f64>,
    pub rho: Option<Vec<f64>>,
}

impl Eigenvalues {
    pub fn from_mu(genus: usize, table: Arc<PrimeTable>, mu: Vec<f64>) -> Result<Self> {
        if genus == 0 {
            return Err(Error::ZeroGenus);
        }
        if mu.len() != table.len() {
            return Err(Error::WeightLength {
                expected: table.len(),
                got: mu.len(),
            });
        }
        Ok(Self {
            genus,
            table,
            mu,
            rho: None,
        })
    }
}

/// `|mu(p)| >= c` or `mu(p) >= c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Abs,
    Signed,
}

impl Mode {
    pub fn exceeds(self, mu: f64, c: f64) -> bool {
        match self {
            Mode::Abs => mu.abs() >= c,
            Mode::Signed => mu >= c,
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Abs => "abs",
            Mode::Signed => "signed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaIneqCheck {
    /// `|mu| >= c`
    pub applicable: bool,
    /// `1 + sum_i (a_i + a_i^{-1})`
    pub lhs: f64,
    /// `g c^{2/g} - 2g + 1`
    pub rhs: f64,
}

impl LemmaIneqCheck {
    /// Inapplicable checks hold vacuously.
    pub fn holds(&self) -> bool {
        !self.applicable || self.lhs >= self.rhs - TOL_EQ
    }
}

pub fn lemma_ineq_check(t: &SatakeTuple, c: f64) -> Result<LemmaIneqCheck> {
    check_c(c)?;
    let g = t.genus() as f64;
    let mu = t.mu()?;
    Ok(LemmaIneqCheck {
        applicable: mu.abs() >= c,
        lhs: t.std_trace(),
        rhs: g * c.powf(2.0 / g) - 2.0 * g + 1.0,
    })
}

/// The equal-angle tuple with `|mu| = c` on which the exceedance inequality
/// is an equality: `a_i = e^{i phi}`, `cos phi = c^{2/g}/2 - 1`,
/// `a_0 = e^{-i g phi / 2}` so that `mu >= 0`.
pub fn extremal_tuple(genus: usize, c: f64) -> Result<SatakeTuple> {
    if genus == 0 {
        return Err(Error::ZeroGenus);
    }
    let top = 2f64.powi(genus as i32);
    if !(c > 0.0 && c <= top) {
        return Err(Error::Domain {
            name: "c",
            value: c,
            expected: "0 < c <= 2^g",
        });
    }
    // cos(phi) = c^{2/g}/2 - 1 is equivalent to cos(phi/2) = c^{1/g}/2,
    // which stays well conditioned as phi approaches pi
    let half_cos = (c.powf(1.0 / genus as f64) / 2.0).clamp(0.0, 1.0);
    let phi = 2.0 * half_cos.acos();
    SatakeTuple::from_free_angles(genus, &vec![phi; genus], Branch::Plus)
}

/// `(2 - 1/g) c^{-2/g}`, the density bound for `|mu(p)| >= c`.
pub fn theorem1_bound(genus: usize, c: f64) -> f64 {
    let g = genus as f64;
    (2.0 - 1.0 / g) / c.powf(2.0 / g)
}

/// `4 / (c + 4)`, the genus-2 density bound for `mu(p) >= c`.
pub fn theorem2_bound(c: f64) -> f64 {
    4.0 / (c + 4.0)
}

/// `c` range `[(2 - 1/g)^{g/2}, 2^g]` where [`theorem1_bound`] is below 1.
pub fn theorem1_nontrivial_range(genus: usize) -> (f64, f64) {
    let g = genus as f64;
    ((2.0 - 1.0 / g).powf(g / 2.0), 2f64.powi(genus as i32))
}

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "c",
            value: c,
            expected: "finite c > 0",
        })
    }
}

pub fn exceptional_set(data: &Eigenvalues, c: f64, mode: Mode) -> Result<PrimeSubset> {
    check_c(c)?;
    let flags: Vec<bool> = data.mu.iter().map(|&m| mode.exceeds(m, c)).collect();
    PrimeSubset::from_flags(Arc::clone(&data.table), &flags)
}

/// Growth of `R(s)` (or `T(s)`) along the s-grid, relative to the prime
/// zeta function truncated at the same bound.
///
/// For a weight with mean `m` the ratio tends to `m`; a value well above 0
/// means the weighted series behaves like the logarithm of a function with
/// a pole at 1, which the density bounds exclude.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceDiagnostic {
    /// `"R"` (standard side) or `"T"` (spin side).
    pub series: String,
    pub s_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// `(series(s_min) - series(s_max)) / (P(s_min) - P(s_max))`.
    pub pole_order_estimate: f64,
    pub suspect_pole: bool,
}

fn divergence_diagnostic(
    table: &PrimeTable,
    name: &str,
    weights: &[f64],
    s_grid: &[f64],
) -> Result<DivergenceDiagnostic> {
    let values = s_grid
        .iter()
        .map(|&s| weighted_l_slice(table, weights, s))
        .collect::<Result<Vec<_>>>()?;
    let (i_min, i_max) = argmin_argmax(s_grid);
    let dp = prime_zeta(table, s_grid[i_min])? - prime_zeta(table, s_grid[i_max])?;
    let estimate = if dp > 0.0 {
        (values[i_min] - values[i_max]) / dp
    } else {
        0.0
    };
    Ok(DivergenceDiagnostic {
        series: name.to_string(),
        s_grid: s_grid.to_vec(),
        values,
        pole_order_estimate: estimate,
        suspect_pole: estimate > POLE_ORDER_THRESHOLD,
    })
}

fn argmin_argmax(xs: &[f64]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x < xs[lo] {
            lo = i;
        }
        if x > xs[hi] {
            hi = i;
        }
    }
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub p: u64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub c: f64,
    pub mode: Mode,
    pub genus: usize,
    pub bound: f64,
    pub estimate: DensityEstimate,
    /// `bound - max` of the Dirichlet ratios over the grid.
    pub margin: f64,
    pub members: usize,
    pub witnesses: Vec<Witness>,
    /// Signed mode outside genus 2.
    pub extrapolated: bool,
    /// `[(2 - 1/g)^{g/2}, 2^g]`, abs mode only.
    pub nontrivial_range: Option<(f64, f64)>,
    pub divergence: Option<DivergenceDiagnostic>,
    pub notes: Vec<String>,
}

pub fn verify_theorem(
    data: &Eigenvalues,
    c: f64,
    mode: Mode,
    s_grid: &[f64],
    x_grid: &[u64],
) -> Result<BoundReport> {
    let set = exceptional_set(data, c, mode)?;
    let estimate = density_profile(&set, s_grid, x_grid)?;
    let g = data.genus;
    let mut notes = Vec::new();

    let (bound, nontrivial_range, divergence) = match mode {
        Mode::Abs => {
            if g.is_multiple_of(4) {
                notes.push(format!(
                    "genus {g} is divisible by 4: the standard L-function may have a pole at 1"
                ));
            }
            let diag = match &data.rho {
                Some(rho) => Some(divergence_diagnostic(&data.table, "R", rho, s_grid)?),
                None => {
                    notes.push("no Satake angles: R(s) diagnostic unavailable".to_string());
                    None
                }
            };
            (
                theorem1_bound(g, c),
                Some(theorem1_nontrivial_range(g)),
                diag,
            )
        }
        Mode::Signed => {
            if g != 2 {
                notes.push(format!(
                    "signed-mode bound is established for genus 2 only; genus {g} is an extrapolation"
                ));
            }
            let diag = divergence_diagnostic(&data.table, "T", &data.mu, s_grid)?;
            (theorem2_bound(c), None, Some(diag))
        }
    };
    if divergence.as_ref().is_some_and(|d| d.suspect_pole) {
        notes.push(
            "weighted series grows like a pole at s = 1: the input violates the bound's hypotheses"
                .to_string(),
        );
    }

    let witnesses = set
        .member_indices()
        .take(MAX_WITNESSES)
        .map(|i| Witness {
            p: data.table.primes()[i],
            mu: data.mu[i],
        })
        .collect();
    let max_ratio = estimate.upper_dirichlet();
    Ok(BoundReport {
        c,
        mode,
        genus: g,
        bound,
        margin: bound - max_ratio,
        members: set.len(),
        witnesses,
        extrapolated: mode == Mode::Signed && g != 2,
        nontrivial_range,
        divergence,
        notes,
        estimate,
    })
}

/// `log L(s)` split into its first-order part and a remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLDecomposition {
    pub kind: FactorKind,
    pub s: f64,
    /// `sum_p log L_p(s)` truncated at the table bound.
    pub log_l: f64,
    /// `R(s)` for std, `T(s)` for spin.
    pub first_order: f64,
    pub remainder: f64,
    /// `sum_p D/2 p^{-2s} / (1 - p^{-s})`.
    pub remainder_cap: f64,
    /// `sum_p` of the per-prime truncation tail bounds.
    pub tail_bound: f64,
}

impl LogLDecomposition {
    pub fn within_cap(&self) -> bool {
        self.remainder.abs() <= self.remainder_cap
    }
}

/// Per-prime power sums of one local factor, reusable across `s`.
pub struct LogLSeries<'a> {
    assignment: &'a SatakeAssignment,
    kind: FactorKind,
    traces: Vec<Vec<f64>>,
}

impl<'a> LogLSeries<'a> {
    pub fn new(assignment: &'a SatakeAssignment, kind: FactorKind) -> Result<Self> {
        let traces = assignment
            .tuples
            .par_iter()
            .map(|t| power_sums(&t.local_factor(kind), DEFAULT_R_CUT))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            assignment,
            kind,
            traces,
        })
    }

    pub fn at(&self, s: f64) -> Result<LogLDecomposition> {
        let primes = self.assignment.table.primes();
        let degree = self.kind.degree(self.assignment.genus);
        let locals = (0..primes.len())
            .into_par_iter()
            .map(|i| log_local_from_traces(&self.traces[i], degree, primes[i], s))
            .collect::<Result<Vec<_>>>()?;
        let log_l = par_sum(locals.len(), |i| locals[i].value);
        let tail_bound = par_sum(locals.len(), |i| locals[i].tail_bound);
        let first_order = par_sum(primes.len(), |i| {
            self.traces[i][0] * (primes[i] as f64).powf(-s)
        });
        let remainder_cap = par_sum(primes.len(), |i| {
            first_order_remainder_cap(degree, primes[i], s)
        });
        Ok(LogLDecomposition {
            kind: self.kind,
            s,
            log_l,
            first_order,
            remainder: log_l - first_order,
            remainder_cap,
            tail_bound,
        })
    }
}

pub fn log_l_decomposition(
    assignment: &SatakeAssignment,
    kind: FactorKind,
    s: f64,
) -> Result<LogLDecomposition> {
    LogLSeries::new(assignment, kind)?.at(s)
}

/// Weight `+d` on primes `p = residue (mod modulus)` and `-c` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessSpec {
    pub c: f64,
    pub d: f64,
    pub modulus: u64,
    pub residue: u64,
}

impl SharpnessSpec {
    /// The `C = D` construction on `p = 1 (mod 3)`.
    pub fn balanced(c: f64) -> Self {
        Self {
            c,
            d: c,
            modulus: 3,
            residue: 1,
        }
    }
}

/// Reported bound on `max |L(s)|` below which the series counts as bounded.
pub const SHARPNESS_L_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub spec: SharpnessSpec,
    /// Upper bound of the weight, recorded but not used by the conclusion.
    pub e: f64,
    pub s_grid: Vec<f64>,
    pub l_values: Vec<f64>,
    pub max_abs_l: f64,
    pub l_threshold: f64,
    pub bounded: bool,
    /// `L` strictly increases as `s` decreases along the grid.
    pub monotone_growth: bool,
    pub density: DensityEstimate,
    /// `C / (C + D)`.
    pub bound: f64,
}

pub fn lfunc_sharpness_harness(
    spec: SharpnessSpec,
    table: Arc<PrimeTable>,
    s_grid: &[f64],
    x_grid: &[u64],
) -> Result<SharpnessReport> {
    let bound = lfunc_density_bound(spec.c, spec.d)?;
    if spec.modulus == 0 {
        return Err(Error::Domain {
            name: "modulus",
            value: 0.0,
            expected: "modulus >= 1",
        });
    }
    let set = PrimeSubset::residue_class(Arc::clone(&table), spec.modulus, spec.residue);
    let weights: Vec<f64> = (0..table.len())
        .map(|i| {
            if set.contains_index(i) {
                spec.d
            } else {
                -spec.c
            }
        })
        .collect();
    let l_values = s_grid
        .iter()
        .map(|&s| weighted_l_slice(&table, &weights, s))
        .collect::<Result<Vec<_>>>()?;
    let max_abs_l = l_values.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut order: Vec<usize> = (0..s_grid.len()).collect();
    order.sort_by(|&a, &b| s_grid[b].total_cmp(&s_grid[a]));
    let monotone_growth = order.windows(2).all(|w| l_values[w[1]] > l_values[w[0]]);

    Ok(SharpnessReport {
        spec,
        e: spec.d,
        s_grid: s_grid.to_vec(),
        max_abs_l,
        l_threshold: SHARPNESS_L_THRESHOLD,
        bounded: max_abs_l < SHARPNESS_L_THRESHOLD,
        monotone_growth,
        l_values,
        density: density_profile(&set, s_grid, x_grid)?,
        bound,
    })
}
