//! Segmented sieve of Eratosthenes over odd numbers.

use crate::error::{Error, Result};

/// Refuse tables above this bound unless the caller raises the cap.
pub const DEFAULT_SIEVE_CAP: u64 = 4_000_000_000;

/// Odd numbers covered per segment (32 KiB of flags).
const SEGMENT: usize = 1 << 15;

/// All primes up to a bound, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    bound: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Index of `p` in the table, if `p` is a tabulated prime.
    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.index_of(p).is_some()
    }

    /// `pi(x)` for `x` up to the bound.
    pub fn count_up_to(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }
}

pub fn sieve(bound: u64) -> Result<PrimeTable> {
    sieve_with_cap(bound, DEFAULT_SIEVE_CAP)
}

pub fn sieve_with_cap(bound: u64, cap: u64) -> Result<PrimeTable> {
    if bound < 2 {
        return Err(Error::Domain {
            name: "bound",
            value: bound as f64,
            expected: "bound >= 2",
        });
    }
    if bound > cap {
        return Err(Error::SieveCap { bound, cap });
    }

    let root = bound.isqrt();
    let base = small_odd_primes(root);

    let mut primes = Vec::with_capacity(estimate_count(bound));
    primes.push(2);

    // index i of a segment flags the odd number lo + 2i
    let mut composite = vec![false; SEGMENT];
    let mut lo: u64 = 3;
    while lo <= bound {
        let hi = (lo + 2 * SEGMENT as u64 - 2).min(bound);
        let len = ((hi - lo) / 2 + 1) as usize;
        composite[..len].fill(false);
        for &q in &base {
            if q * q > hi {
                break;
            }
            // first odd multiple of q in [lo, hi], starting no lower than q^2
            let mut m = (q * q).max(lo.div_ceil(q) * q);
            if m % 2 == 0 {
                m += q;
            }
            while m <= hi {
                composite[((m - lo) / 2) as usize] = true;
                m += 2 * q;
            }
        }
        primes.extend(
            composite[..len]
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| lo + 2 * i as u64),
        );
        lo = hi + 2;
    }
    Ok(PrimeTable { bound, primes })
}

/// Odd primes up to `n` by a plain sieve; used as the base of the segments.
fn small_odd_primes(n: u64) -> Vec<u64> {
    if n < 3 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    let mut i = 3;
    while i <= n {
        if !composite[i] {
            out.push(i as u64);
            let mut m = i * i;
            while m <= n {
                composite[m] = true;
                m += 2 * i;
            }
        }
        i += 2;
    }
    out
}

fn estimate_count(bound: u64) -> usize {
    let x = bound as f64;
    if x < 17.0 {
        return 8;
    }
    (1.26 * x / x.ln()) as usize
}
