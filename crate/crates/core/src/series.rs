//! Dirichlet coefficients of the local factors and their logarithms.
//!
//! For one prime, a local factor `prod_j (1 - alpha_j X)^{-1}` expands as
//! `sum_r c_r X^r` where `c_r` is the complete homogeneous symmetric
//! polynomial of degree `r` in the inverse roots. For the spin factor
//! these are `m(p^r)`, for the standard factor `rho(p^r)`; neither depends
//! on `p` once the tuple is fixed.
//!
//! Coefficients grow like `C(r + d - 1, d - 1)` while the individual roots
//! only carry f64 precision, so both expansion routes run in double-double
//! arithmetic on the same f64 root values. They then agree to the final
//! rounding even where heavy cancellation occurs.

use num_complex::Complex;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::satake::{FactorKind, LocalFactor, SatakeTuple};

/// Imaginary residues up to this size (scaled by `max(1, |c_r|)` for
/// coefficients, absolute for power sums) are float noise and dropped.
pub const TOL_IMAG: f64 = 1e-9;

/// Default truncation order for [`log_local`].
pub const DEFAULT_R_CUT: usize = 64;

type Cdd = Complex<TwoFloat>;

fn cdd(re: f64, im: f64) -> Cdd {
    Complex::new(TwoFloat::from(re), TwoFloat::from(im))
}

/// Dirichlet coefficients `c_0, ..., c_depth` of one local factor.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeries {
    pub kind: FactorKind,
    pub genus: usize,
    pub coeffs: Vec<f64>,
}

impl CoeffSeries {
    pub fn depth(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn get(&self, r: usize) -> Option<f64> {
        self.coeffs.get(r).copied()
    }

    /// Checks the combinatorial bounds: `|c_r| <= C(r + 2^g - 1, 2^g - 1)`
    /// for spin and `|c_r - c_{r-1}| <= C(r + 2g - 1, 2g - 1)` for std.
    /// Returns the first `r` that violates its bound.
    pub fn first_bound_violation(&self) -> Result<Option<usize>> {
        for r in 0..self.coeffs.len() {
            let bound = coeff_bound(self.kind, self.genus, r as u64)? as f64;
            let value = match self.kind {
                FactorKind::Spin => self.coeffs[r],
                FactorKind::Std if r == 0 => self.coeffs[0],
                FactorKind::Std => self.coeffs[r] - self.coeffs[r - 1],
            };
            // slack of one part in 1e12 for rounding at the equality case
            if value.abs() > bound * (1.0 + 1e-12) {
                return Ok(Some(r));
            }
        }
        Ok(None)
    }
}

/// Power sums `tr_k = sum_j alpha_j^k` for `k = 1..=r_max`, computed in
/// double-double from the factor's f64 roots.
pub fn power_sums(f: &LocalFactor, r_max: usize) -> Result<Vec<f64>> {
    let roots: Vec<Cdd> = f.roots().iter().map(|z| cdd(z.re, z.im)).collect();
    let mut powers = roots.clone();
    let mut out = Vec::with_capacity(r_max);
    for k in 1..=r_max {
        if k > 1 {
            for (pw, root) in powers.iter_mut().zip(&roots) {
                *pw *= *root;
            }
        }
        let mut total = cdd(0.0, 0.0);
        for pw in &powers {
            total += *pw;
        }
        let im = f64::from(total.im);
        if im.abs() > TOL_IMAG || im.is_nan() {
            return Err(Error::NonReal {
                imag: im,
                tol: TOL_IMAG,
            });
        }
        out.push(f64::from(total.re));
    }
    Ok(out)
}

/// Expands a local factor to depth `r_max` by Newton's identities
/// `r c_r = sum_{k=1}^{r} tr_k c_{r-k}`.
pub fn expand(f: &LocalFactor, r_max: usize) -> Result<CoeffSeries> {
    if r_max == 0 {
        return Err(Error::Domain {
            name: "r_max",
            value: 0.0,
            expected: "r_max >= 1",
        });
    }
    let traces: Vec<TwoFloat> = power_sums(f, r_max)?
        .into_iter()
        .map(TwoFloat::from)
        .collect();
    let mut h: Vec<TwoFloat> = Vec::with_capacity(r_max + 1);
    h.push(TwoFloat::from(1.0));
    for r in 1..=r_max {
        let mut acc = TwoFloat::from(0.0);
        for k in 1..=r {
            acc += traces[k - 1] * h[r - k];
        }
        h.push(acc / TwoFloat::from(r as f64));
    }
    Ok(CoeffSeries {
        kind: f.kind(),
        genus: f.genus(),
        coeffs: h.into_iter().map(f64::from).collect(),
    })
}

/// Brute-force expansion: multiplies the truncated geometric series
/// `1 + alpha X + alpha^2 X^2 + ...` of every root by schoolbook
/// polynomial multiplication.
pub fn expand_oracle(f: &LocalFactor, r_max: usize) -> Result<CoeffSeries> {
    if r_max == 0 {
        return Err(Error::Domain {
            name: "r_max",
            value: 0.0,
            expected: "r_max >= 1",
        });
    }
    let zero = cdd(0.0, 0.0);
    let mut series = vec![zero; r_max + 1];
    series[0] = cdd(1.0, 0.0);
    for root in f.roots() {
        let alpha = cdd(root.re, root.im);
        let mut geometric = Vec::with_capacity(r_max + 1);
        geometric.push(cdd(1.0, 0.0));
        for k in 1..=r_max {
            geometric.push(geometric[k - 1] * alpha);
        }
        let mut product = vec![zero; r_max + 1];
        for (i, a) in series.iter().enumerate() {
            for (j, b) in geometric.iter().take(r_max + 1 - i).enumerate() {
                product[i + j] += *a * *b;
            }
        }
        series = product;
    }
    let mut coeffs = Vec::with_capacity(r_max + 1);
    for c in series {
        let re = f64::from(c.re);
        let im = f64::from(c.im);
        let tol = TOL_IMAG * re.abs().max(1.0);
        if im.abs() > tol || im.is_nan() {
            return Err(Error::NonReal { imag: im, tol });
        }
        coeffs.push(re);
    }
    Ok(CoeffSeries {
        kind: f.kind(),
        genus: f.genus(),
        coeffs,
    })
}

/// Exact `C(n, k)` in `u128`, erroring on overflow.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc * (n - k + i) / i is an integer; split the division so the
        // multiplication only overflows when the result itself would
        let num = (n - k) as u128 + i;
        let d = gcd(acc, i);
        let reduced = acc / d;
        let factor = num / (i / d);
        acc = reduced
            .checked_mul(factor)
            .ok_or(Error::BinomialOverflow { n, k })?;
    }
    Ok(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Upper bound on `|m(p^r)|` (spin) or `|rho(p^r) - rho(p^{r-1})|` (std):
/// the number of unit-modulus monomials in that coefficient.
pub fn coeff_bound(kind: FactorKind, genus: usize, r: u64) -> Result<u128> {
    let vars: u64 = match kind {
        FactorKind::Spin => {
            if genus >= 64 {
                return Err(Error::BinomialOverflow {
                    n: u64::MAX,
                    k: u64::MAX,
                });
            }
            1u64 << genus
        }
        FactorKind::Std => 2 * genus as u64,
    };
    let n = r.checked_add(vars - 1).ok_or(Error::BinomialOverflow {
        n: u64::MAX,
        k: vars - 1,
    })?;
    binomial(n, vars - 1)
}

/// `(m(p), rho(p))`, the first spin and standard coefficients.
pub fn first_coefficient_identities(t: &SatakeTuple) -> Result<(f64, f64)> {
    let m1 = expand(&t.local_factor(FactorKind::Spin), 1)?.coeffs[1];
    let rho1 = expand(&t.local_factor(FactorKind::Std), 1)?.coeffs[1];
    Ok((m1, rho1))
}

/// `tr_r = sum_j alpha_j^r` over the roots of one factor.
pub fn trace_power(t: &SatakeTuple, kind: FactorKind, r: u32) -> Result<f64> {
    let r = r as f64;
    let (re, im) = t.root_angles(kind).iter().fold((0.0, 0.0), |(re, im), &a| {
        let phase = (r * a).rem_euclid(std::f64::consts::TAU);
        (re + phase.cos(), im + phase.sin())
    });
    if im.abs() > TOL_IMAG || im.is_nan() {
        return Err(Error::NonReal {
            imag: im,
            tol: TOL_IMAG,
        });
    }
    Ok(re)
}

/// Truncated logarithm of one local factor with a rigorous tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLocal {
    pub value: f64,
    pub tail_bound: f64,
}

/// `log L_p(s) ~ sum_{r=1}^{r_cut} tr_r / (r p^{rs})`.
pub fn log_local(
    t: &SatakeTuple,
    kind: FactorKind,
    p: u64,
    s: f64,
    r_cut: usize,
) -> Result<LogLocal> {
    let traces = power_sums(&t.local_factor(kind), r_cut)?;
    log_local_from_traces(&traces, kind.degree(t.genus()), p, s)
}

#[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
pub(crate) fn log_local_from_traces(
    traces: &[f64],
    degree: usize,
    p: u64,
    s: f64,
) -> Result<LogLocal> {
    if !(s > 1.0) {
        return Err(Error::Domain {
            name: "s",
            value: s,
            expected: "s > 1",
        });
    }
    if p < 2 {
        return Err(Error::Domain {
            name: "p",
            value: p as f64,
            expected: "p >= 2",
        });
    }
    let x = (p as f64).powf(-s);
    let r_cut = traces.len();
    // Horner from the top: sum tr_r x^r / r
    let mut acc = 0.0;
    for r in (1..=r_cut).rev() {
        acc = acc * x + traces[r - 1] / r as f64;
    }
    let value = acc * x;
    let next = (r_cut + 1) as f64;
    let tail_bound = degree as f64 * x.powf(next) / (next * (1.0 - x));
    Ok(LogLocal { value, tail_bound })
}

/// Bound on `|log L_p(s) - c_1 p^{-s}|` from `|tr_r| <= degree`.
pub fn first_order_remainder_cap(degree: usize, p: u64, s: f64) -> f64 {
    let x = (p as f64).powf(-s);
    degree as f64 / 2.0 * x * x / (1.0 - x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::satake::Branch;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn ones(g: usize) -> SatakeTuple {
        SatakeTuple::identity(g).unwrap()
    }

    #[test]
    fn expand_small_closed_forms() {
        let spin = expand(&ones(1).local_factor(FactorKind::Spin), 5).unwrap();
        assert_eq!(spin.coeffs, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let std = expand(&ones(1).local_factor(FactorKind::Std), 3).unwrap();
        assert_eq!(std.coeffs, vec![1.0, 3.0, 6.0, 10.0]);
    }

    #[test]
    fn oracle_small_closed_forms() {
        let a = expand_oracle(&ones(1).local_factor(FactorKind::Spin), 5).unwrap();
        assert_eq!(a.coeffs, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = expand_oracle(&ones(2).local_factor(FactorKind::Spin), 2).unwrap();
        assert_eq!(b.coeffs, vec![1.0, 4.0, 10.0]);
    }

    #[test]
    fn zero_depth_rejected() {
        let f = ones(1).local_factor(FactorKind::Spin);
        assert!(expand(&f, 0).is_err());
        assert!(expand_oracle(&f, 0).is_err());
    }

    #[test]
    fn broken_tuple_reports_non_real() {
        let bad = SatakeTuple::new(2, vec![0.3, 0.1, 0.7]).unwrap();
        assert!(matches!(
            expand(&bad.local_factor(FactorKind::Spin), 4),
            Err(Error::NonReal { .. })
        ));
        assert!(matches!(
            expand_oracle(&bad.local_factor(FactorKind::Spin), 4),
            Err(Error::NonReal { .. })
        ));
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(coeff_bound(FactorKind::Spin, 2, 2).unwrap(), 10);
        assert_eq!(coeff_bound(FactorKind::Std, 2, 1).unwrap(), 4);
        assert_eq!(coeff_bound(FactorKind::Spin, 1, 7).unwrap(), 8);
        assert_eq!(coeff_bound(FactorKind::Std, 3, 0).unwrap(), 1);
    }

    #[test]
    fn binomial_exact_and_overflow() {
        assert_eq!(binomial(35, 15).unwrap(), 3_247_943_160);
        assert_eq!(binomial(5, 7).unwrap(), 0);
        // C(130, 65) ~ 9.5e37 still fits in u128 (max ~3.4e38)
        assert_eq!(
            binomial(130, 65).unwrap(),
            95067625827960698145584333020095113100
        );
        assert!(matches!(
            binomial(200, 100),
            Err(Error::BinomialOverflow { n: 200, k: 100 })
        ));
        assert!(coeff_bound(FactorKind::Spin, 7, 200).is_err());
        assert!(coeff_bound(FactorKind::Spin, 64, 1).is_err());
    }

    #[test]
    fn binomial_matches_pascal() {
        let mut row = vec![1u128];
        for n in 1..=90u64 {
            let mut next = vec![1u128; n as usize + 1];
            for k in 1..n as usize {
                next[k] = row[k - 1] + row[k];
            }
            row = next;
            for (k, v) in row.iter().enumerate() {
                assert_eq!(binomial(n, k as u64).unwrap(), *v);
            }
        }
    }

    #[test]
    fn first_coefficients_examples() {
        let (m1, rho1) = first_coefficient_identities(&ones(2)).unwrap();
        assert_eq!((m1, rho1), (4.0, 5.0));
        let th = PI / 3.0;
        let st = SatakeTuple::new(1, vec![th, -2.0 * th]).unwrap();
        let (m1, rho1) = first_coefficient_identities(&st).unwrap();
        assert!((m1 - 1.0).abs() < 1e-12);
        assert!(rho1.abs() < 1e-12);
    }

    #[test]
    fn trace_power_examples() {
        assert_eq!(trace_power(&ones(1), FactorKind::Std, 3).unwrap(), 3.0);
        for r in 1..10 {
            assert_eq!(trace_power(&ones(2), FactorKind::Spin, r).unwrap(), 4.0);
        }
    }

    #[test]
    fn log_local_closed_form() {
        let l = log_local(&ones(1), FactorKind::Std, 2, 2.0, 50).unwrap();
        let expected = -3.0 * (1.0f64 - 0.25).ln();
        assert!((l.value - expected).abs() < 1e-15);
        assert!((l.value - 0.863046).abs() < 1e-6);
        assert!(l.tail_bound < 1e-30);
    }

    #[test]
    fn log_local_rejects_bad_arguments() {
        assert!(log_local(&ones(1), FactorKind::Std, 2, 1.0, 8).is_err());
        assert!(log_local(&ones(1), FactorKind::Std, 1, 2.0, 8).is_err());
    }

    /// Independent oracle: `-sum_j log(1 - alpha_j p^{-s})` from the product form.
    fn direct_log(t: &SatakeTuple, kind: FactorKind, p: u64, s: f64) -> f64 {
        let x = (p as f64).powf(-s);
        t.local_factor(kind)
            .roots()
            .iter()
            .map(|a| -(Complex64::new(1.0, 0.0) - a * x).ln())
            .sum::<Complex64>()
            .re
    }

    fn tuple_strategy() -> impl Strategy<Value = SatakeTuple> {
        (1usize..=4)
            .prop_flat_map(|g| {
                (
                    Just(g),
                    prop::collection::vec(0.0f64..std::f64::consts::TAU, g),
                    any::<bool>(),
                )
            })
            .prop_map(|(g, free, bit)| {
                SatakeTuple::from_free_angles(g, &free, Branch::from_bit(bit)).unwrap()
            })
    }

    fn kind_strategy() -> impl Strategy<Value = FactorKind> {
        prop_oneof![Just(FactorKind::Spin), Just(FactorKind::Std)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn expand_matches_oracle(t in tuple_strategy(), kind in kind_strategy()) {
            let f = t.local_factor(kind);
            let a = expand(&f, 20).unwrap();
            let b = expand_oracle(&f, 20).unwrap();
            for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
                prop_assert!((x - y).abs() <= 1e-9 * y.abs().max(1.0), "{} vs {}", x, y);
            }
            prop_assert_eq!(a.coeffs[0], 1.0);
        }

        #[test]
        fn trace_bounded_and_consistent(t in tuple_strategy(), kind in kind_strategy(), r in 1u32..40) {
            let tr = trace_power(&t, kind, r).unwrap();
            let sums = power_sums(&t.local_factor(kind), r as usize).unwrap();
            prop_assert!((tr - sums[r as usize - 1]).abs() < 1e-9);
            prop_assert!(tr.abs() <= kind.degree(t.genus()) as f64 + 1e-12);
        }

        #[test]
        fn log_local_within_tail_of_direct(
            t in tuple_strategy(),
            kind in kind_strategy(),
            p in prop::sample::select(vec![2u64, 3, 5, 101]),
            s in prop::sample::select(vec![1.01f64, 1.1, 1.5, 2.0]),
        ) {
            let l = log_local(&t, kind, p, s, DEFAULT_R_CUT).unwrap();
            let direct = direct_log(&t, kind, p, s);
            prop_assert!((l.value - direct).abs() <= l.tail_bound + 1e-14);
            prop_assert!(l.tail_bound < 1e-18);
            let (m1, rho1) = first_coefficient_identities(&t).unwrap();
            let c1 = match kind { FactorKind::Spin => m1, FactorKind::Std => rho1 };
            let x = (p as f64).powf(-s);
            let cap = first_order_remainder_cap(kind.degree(t.genus()), p, s);
            prop_assert!((l.value - c1 * x).abs() <= cap + 1e-15);
        }
    }
}
