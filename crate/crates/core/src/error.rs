use thiserror::Error;

/// Errors raised by the numerical kernels.
///
/// Failures that are data (a violated invariant found while validating a
/// tuple, a negative margin in a bound report) are not errors and are
/// returned as values instead.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("genus must be at least 1")]
    ZeroGenus,

    #[error("expected {expected} angles, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("non-finite angle at index {index}")]
    NonFiniteAngle { index: usize },

    #[error("result is not real: imaginary part {imag:e} exceeds tolerance {tol:e}")]
    NonReal { imag: f64, tol: f64 },

    #[error("binomial coefficient C({n}, {k}) overflows u128")]
    BinomialOverflow { n: u64, k: u64 },

    #[error("{name} = {value} is outside its domain: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("sieve bound {bound} exceeds the configured cap {cap}")]
    SieveCap { bound: u64, cap: u64 },

    #[error("cutoff {cutoff} is outside the prime table range [2, {bound}]")]
    CutoffOutOfRange { cutoff: u64, bound: u64 },

    #[error("weight slice has length {got}, prime table has {expected} primes")]
    WeightLength { expected: usize, got: usize },

    #[error("assignment genus {got} does not match expected genus {expected}")]
    GenusMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
