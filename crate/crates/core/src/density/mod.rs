//! Prime tables, prime subsets and truncated density estimators.
//!
//! The densities are limits (`s -> 1+`, `x -> infinity`) and cannot be
//! computed. What is computed are the ratios at explicit grid points over a
//! finite table, with the truncation `(X, s_min)` carried in every estimate.

mod sieve;

use std::sync::Arc;

use bitvec::prelude::*;
use serde::Serialize;

pub use sieve::{sieve, sieve_with_cap, PrimeTable, DEFAULT_SIEVE_CAP};

use crate::error::{Error, Result};
use crate::numeric::{par_sum, CompensatedSum};

/// A subset of the primes of one shared table.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeSubset {
    table: Arc<PrimeTable>,
    members: BitVec,
}

impl PrimeSubset {
    pub fn empty(table: Arc<PrimeTable>) -> Self {
        let n = table.len();
        Self {
            table,
            members: bitvec![0; n],
        }
    }

    pub fn all(table: Arc<PrimeTable>) -> Self {
        let n = table.len();
        Self {
            table,
            members: bitvec![1; n],
        }
    }

    pub fn from_predicate<F: Fn(u64) -> bool>(table: Arc<PrimeTable>, pred: F) -> Self {
        let members = table.primes().iter().map(|&p| pred(p)).collect();
        Self { table, members }
    }

    /// Builds a subset from one flag per table prime.
    pub fn from_flags(table: Arc<PrimeTable>, flags: &[bool]) -> Result<Self> {
        if flags.len() != table.len() {
            return Err(Error::WeightLength {
                expected: table.len(),
                got: flags.len(),
            });
        }
        let members = flags.iter().copied().collect();
        Ok(Self { table, members })
    }

    /// Primes `p = residue (mod modulus)`.
    pub fn residue_class(table: Arc<PrimeTable>, modulus: u64, residue: u64) -> Self {
        Self::from_predicate(table, |p| p % modulus == residue % modulus)
    }

    pub fn table(&self) -> &Arc<PrimeTable> {
        &self.table
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.members[i]
    }

    pub fn len(&self) -> usize {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members.not_any()
    }

    pub fn complement(&self) -> Self {
        Self {
            table: Arc::clone(&self.table),
            members: !self.members.clone(),
        }
    }

    /// Whether every member of `self` is a member of `other`.
    pub fn is_subset_of(&self, other: &PrimeSubset) -> bool {
        self.members
            .iter_ones()
            .all(|i| other.members.get(i).is_some_and(|b| *b))
    }

    /// Member primes, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        let primes = self.table.primes();
        self.members.iter_ones().map(move |i| primes[i])
    }

    pub fn member_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter_ones()
    }
}

fn check_s(s: f64) -> Result<()> {
    if s > 1.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "s",
            value: s,
            expected: "finite s > 1",
        })
    }
}

/// `sum_{p <= X} p^{-s}` over the whole table.
pub fn prime_zeta(table: &PrimeTable, s: f64) -> Result<f64> {
    check_s(s)?;
    let primes = table.primes();
    Ok(par_sum(primes.len(), |i| (primes[i] as f64).powf(-s)))
}

/// `sum_{p in S} p^{-s} / sum_{p} p^{-s}`, both truncated at the table bound.
pub fn dirichlet_ratio(set: &PrimeSubset, s: f64) -> Result<f64> {
    check_s(s)?;
    let primes = set.table.primes();
    let total = par_sum(primes.len(), |i| (primes[i] as f64).powf(-s));
    let part = par_sum(primes.len(), |i| {
        if set.members[i] {
            (primes[i] as f64).powf(-s)
        } else {
            0.0
        }
    });
    Ok(part / total)
}

/// `#{p in S : p <= x} / pi(x)`.
pub fn natural_ratio(set: &PrimeSubset, x: u64) -> Result<f64> {
    let bound = set.table.bound();
    if x < 2 || x > bound {
        return Err(Error::CutoffOutOfRange { cutoff: x, bound });
    }
    let n = set.table.count_up_to(x);
    let hits = set.members[..n].count_ones();
    Ok(hits as f64 / n as f64)
}

/// `{1 + 2^{-k} : k = 1..=7}`, descending towards 1.
pub fn default_s_grid() -> Vec<f64> {
    (1..=7).map(|k| 1.0 + 0.5f64.powi(k)).collect()
}

/// Powers of ten up to `bound`, then `bound` itself.
pub fn default_x_grid(bound: u64) -> Vec<u64> {
    let mut grid: Vec<u64> = std::iter::successors(Some(10u64), |x| x.checked_mul(10))
        .take_while(|&x| x <= bound)
        .collect();
    if grid.last() != Some(&bound) {
        grid.push(bound);
    }
    grid
}

/// Truncated Dirichlet and natural density ratios of one set over grids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub s_grid: Vec<f64>,
    pub x_grid: Vec<u64>,
    pub dirichlet_ratios: Vec<f64>,
    pub natural_ratios: Vec<f64>,
    /// Table bound `X` all sums were truncated at.
    pub prime_bound: u64,
    /// Smallest `s` used.
    pub s_min: f64,
}

impl DensityEstimate {
    /// Grid surrogate for the upper Dirichlet density.
    pub fn upper_dirichlet(&self) -> f64 {
        self.dirichlet_ratios
            .iter()
            .copied()
            .fold(f64::NAN, f64::max)
    }

    pub fn lower_dirichlet(&self) -> f64 {
        self.dirichlet_ratios
            .iter()
            .copied()
            .fold(f64::NAN, f64::min)
    }

    pub fn upper_natural(&self) -> f64 {
        self.natural_ratios.iter().copied().fold(f64::NAN, f64::max)
    }

    pub fn lower_natural(&self) -> f64 {
        self.natural_ratios.iter().copied().fold(f64::NAN, f64::min)
    }
}

pub fn density_profile(
    set: &PrimeSubset,
    s_grid: &[f64],
    x_grid: &[u64],
) -> Result<DensityEstimate> {
    if s_grid.is_empty() || x_grid.is_empty() {
        return Err(Error::Domain {
            name: "grid length",
            value: 0.0,
            expected: "non-empty s and x grids",
        });
    }
    let dirichlet_ratios = s_grid
        .iter()
        .map(|&s| dirichlet_ratio(set, s))
        .collect::<Result<Vec<_>>>()?;
    let natural_ratios = x_grid
        .iter()
        .map(|&x| natural_ratio(set, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityEstimate {
        s_grid: s_grid.to_vec(),
        x_grid: x_grid.to_vec(),
        dirichlet_ratios,
        natural_ratios,
        prime_bound: set.table.bound(),
        s_min: s_grid.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// Both sides of the partial-summation identity at a finite cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialSummation {
    /// `sum_{p in S, p <= x} p^{-s}`
    pub lhs: f64,
    /// `S(x) x^{-s} + s int_1^x S(t) t^{-s-1} dt`
    pub rhs: f64,
    pub gap: f64,
}

/// Evaluates the partial-summation identity with the integral of the step
/// function `S(t)` done exactly on each interval between consecutive members.
pub fn partial_summation_check(set: &PrimeSubset, x: u64, s: f64) -> Result<PartialSummation> {
    check_s(s)?;
    let bound = set.table.bound();
    if x < 1 || x > bound {
        return Err(Error::CutoffOutOfRange { cutoff: x, bound });
    }
    let members: Vec<f64> = set
        .primes()
        .take_while(|&p| p <= x)
        .map(|p| p as f64)
        .collect();
    let lhs: CompensatedSum = members.iter().map(|q| q.powf(-s)).collect();

    let xf = x as f64;
    let count = members.len();
    let mut rhs = CompensatedSum::new();
    rhs.add(count as f64 * xf.powf(-s));
    // on [q_j, q_{j+1}) the count is j, and s * int t^{-s-1} = q_j^{-s} - q_{j+1}^{-s}
    for (j, q) in members.iter().enumerate() {
        let upper = members.get(j + 1).copied().unwrap_or(xf);
        let step = (j + 1) as f64;
        rhs.add(step * q.powf(-s));
        rhs.add(-step * upper.powf(-s));
    }
    let (lhs, rhs) = (lhs.value(), rhs.value());
    Ok(PartialSummation {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}

/// `L(s) = sum_{p <= X} f(p) p^{-s}`.
pub fn weighted_l<F>(table: &PrimeTable, f: F, s: f64) -> Result<f64>
where
    F: Fn(u64) -> f64 + Sync,
{
    check_s(s)?;
    let primes = table.primes();
    Ok(par_sum(primes.len(), |i| {
        let p = primes[i];
        f(p) * (p as f64).powf(-s)
    }))
}

/// As [`weighted_l`] with one weight per table prime.
pub fn weighted_l_slice(table: &PrimeTable, weights: &[f64], s: f64) -> Result<f64> {
    check_s(s)?;
    if weights.len() != table.len() {
        return Err(Error::WeightLength {
            expected: table.len(),
            got: weights.len(),
        });
    }
    let primes = table.primes();
    Ok(par_sum(primes.len(), |i| {
        weights[i] * (primes[i] as f64).powf(-s)
    }))
}

/// `C / (C + D)`: the density bound for a set on which a weight bounded
/// below by `-C` is at least `D`, given a weighted L-series bounded at 1.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
pub fn lfunc_density_bound(c: f64, d: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::Domain {
            name: "C",
            value: c,
            expected: "C > 0",
        });
    }
    if !(d > 0.0) {
        return Err(Error::Domain {
            name: "D",
            value: d,
            expected: "D > 0",
        });
    }
    Ok(c / (c + d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(x: u64) -> Arc<PrimeTable> {
        Arc::new(sieve(x).unwrap())
    }

    #[test]
    fn full_and_empty_sets() {
        let t = table(10_000);
        let all = PrimeSubset::all(Arc::clone(&t));
        let none = PrimeSubset::empty(Arc::clone(&t));
        for s in [1.01, 1.5, 2.0] {
            assert_eq!(dirichlet_ratio(&all, s).unwrap(), 1.0);
            assert_eq!(dirichlet_ratio(&none, s).unwrap(), 0.0);
        }
        assert_eq!(natural_ratio(&all, 10_000).unwrap(), 1.0);
        assert_eq!(natural_ratio(&none, 100).unwrap(), 0.0);
        assert!(dirichlet_ratio(&all, 1.0).is_err());
    }

    #[test]
    fn singleton_natural_ratio() {
        let t = table(1_000_000);
        let two = PrimeSubset::from_predicate(Arc::clone(&t), |p| p == 2);
        assert_eq!(natural_ratio(&two, 1_000_000).unwrap(), 1.0 / 78_498.0);
        assert!(natural_ratio(&two, 1_000_001).is_err());
        assert!(natural_ratio(&two, 1).is_err());
    }

    #[test]
    fn one_mod_four_natural() {
        let t = table(1_000_000);
        let s = PrimeSubset::residue_class(t, 4, 1);
        let r = natural_ratio(&s, 1_000_000).unwrap();
        assert!((r - 0.5).abs() < 0.01, "{r}");
    }

    #[test]
    fn complement_sums_to_one() {
        let t = table(100_000);
        let s = PrimeSubset::residue_class(Arc::clone(&t), 3, 1);
        let c = s.complement();
        let grid = default_s_grid();
        let xs = default_x_grid(100_000);
        let a = density_profile(&s, &grid, &xs).unwrap();
        let b = density_profile(&c, &grid, &xs).unwrap();
        for (x, y) in a.dirichlet_ratios.iter().zip(&b.dirichlet_ratios) {
            assert!((x + y - 1.0).abs() <= 1e-12);
        }
        for (x, y) in a.natural_ratios.iter().zip(&b.natural_ratios) {
            assert!((x + y - 1.0).abs() <= 1e-12);
        }
        assert_eq!(a.s_min, 1.0078125);
        assert_eq!(a.prime_bound, 100_000);
    }

    #[test]
    fn default_grids() {
        assert_eq!(default_s_grid()[0], 1.5);
        assert_eq!(default_s_grid().len(), 7);
        assert_eq!(default_x_grid(1000), vec![10, 100, 1000]);
        assert_eq!(default_x_grid(2500), vec![10, 100, 1000, 2500]);
        assert_eq!(default_x_grid(2), vec![2]);
    }

    #[test]
    fn empty_grid_rejected() {
        let t = table(100);
        assert!(density_profile(&PrimeSubset::all(t), &[], &[10]).is_err());
    }

    #[test]
    fn partial_summation_small() {
        let t = table(100);
        let none = PrimeSubset::empty(Arc::clone(&t));
        let r = partial_summation_check(&none, 10, 2.0).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));

        let s = PrimeSubset::from_predicate(t, |p| p == 2 || p == 3);
        let r = partial_summation_check(&s, 10, 2.0).unwrap();
        assert!((r.lhs - (0.25 + 1.0 / 9.0)).abs() < 1e-15);
        assert!(r.gap <= 1e-12);
    }

    #[test]
    fn prime_zeta_two() {
        // P(2) = 0.4522474200410654985...; the tail beyond 10^6 is ~7e-8
        let t = table(1_000_000);
        let v = weighted_l(&t, |_| 1.0, 2.0).unwrap();
        assert!((v - 0.452_247_420_041_065_5).abs() < 1e-6, "{v}");
        assert_eq!(weighted_l(&t, |_| 0.0, 2.0).unwrap(), 0.0);
        assert_eq!(prime_zeta(&t, 2.0).unwrap(), v);
    }

    #[test]
    fn weighted_slice_length_checked() {
        let t = table(30);
        assert!(weighted_l_slice(&t, &[1.0; 3], 2.0).is_err());
        let a = weighted_l_slice(&t, &[1.0; 10], 2.0).unwrap();
        let b = weighted_l(&t, |_| 1.0, 2.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lfunc_bound_values() {
        assert_eq!(lfunc_density_bound(4.0, 4.0).unwrap(), 0.5);
        assert_eq!(lfunc_density_bound(3.0, 3.0).unwrap(), 0.5);
        // C = 2g - 1, D = g c^{2/g} - 2g + 1 with g = 2, c = 2
        assert_eq!(
            lfunc_density_bound(3.0, 2.0 * 2.0 - 4.0 + 1.0).unwrap(),
            0.75
        );
        assert!(lfunc_density_bound(0.0, 1.0).is_err());
        assert!(lfunc_density_bound(1.0, -1.0).is_err());
    }

    #[test]
    fn subset_relations() {
        let t = table(1000);
        let a = PrimeSubset::residue_class(Arc::clone(&t), 4, 1);
        let b = PrimeSubset::from_predicate(Arc::clone(&t), |p| p % 4 == 1 || p == 2);
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        assert_eq!(b.len(), a.len() + 1);
        assert_eq!(a.primes().next(), Some(5));
    }
}
