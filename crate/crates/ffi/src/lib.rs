//! C ABI for `satake-density`.
//!
//! Conventions:
//! - Every fallible function returns an [`SdStatus`]; results go through out
//!   pointers that are written only on success.
//! - Handles ([`SdPrimeTable`], [`SdAssignment`]) are opaque and must be
//!   released with their `_free` function. Freeing null is a no-op.
//! - After a non-OK status, [`sd_last_error_message`] describes the failure
//!   on the calling thread.
//! - Panics never cross the boundary; they surface as `SD_STATUS_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use satake_density::density::{dirichlet_ratio, natural_ratio, sieve, PrimeTable};
use satake_density::series::{coeff_bound, expand};
use satake_density::sim::{build_assignment, SamplerSpec};
use satake_density::verify::{
    exceptional_set, theorem1_bound, theorem2_bound, Mode, SatakeAssignment,
};
use satake_density::{Error, FactorKind, SatakeTuple};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Overflow = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdFactorKind {
    Spin = 0,
    Std = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdMode {
    Abs = 0,
    Signed = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdSamplerKind {
    UniformTorus = 0,
    SatoTateG1 = 1,
    ExtremalConstant = 2,
    AngleFamily = 3,
}

/// Opaque table of all primes up to a bound.
pub struct SdPrimeTable(Arc<PrimeTable>);

/// Opaque map from each table prime to a Satake tuple.
pub struct SdAssignment(SatakeAssignment);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn fail(status: SdStatus, message: impl Into<String>) -> SdStatus {
    set_error(message);
    status
}

fn status_of(err: &Error) -> SdStatus {
    match err {
        Error::BinomialOverflow { .. } => SdStatus::Overflow,
        Error::ShapeMismatch { .. }
        | Error::ZeroGenus
        | Error::NonFiniteAngle { .. }
        | Error::WeightLength { .. }
        | Error::GenusMismatch { .. } => SdStatus::InvalidArgument,
        _ => SdStatus::Domain,
    }
}

/// Runs `body`, converting errors and panics into a status.
fn guard<F>(body: F) -> SdStatus
where
    F: FnOnce() -> Result<(), SdStatus>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SdStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(SdStatus::Panic, "internal panic"),
    }
}

fn core<T>(r: satake_density::Result<T>) -> Result<T, SdStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), SdStatus> {
    if p.is_null() {
        Err(fail(SdStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

unsafe fn tuple_from(
    genus: usize,
    angles: *const f64,
    n_angles: usize,
) -> Result<SatakeTuple, SdStatus> {
    non_null(angles, "angles")?;
    let slice = std::slice::from_raw_parts(angles, n_angles);
    let t = core(SatakeTuple::new(genus, slice.to_vec()))?;
    if let Some(v) = t.validate(satake_density::satake::TOL_CONSTRAINT).first() {
        return Err(fail(SdStatus::Domain, v.to_string()));
    }
    Ok(t)
}

impl From<SdFactorKind> for FactorKind {
    fn from(k: SdFactorKind) -> Self {
        match k {
            SdFactorKind::Spin => FactorKind::Spin,
            SdFactorKind::Std => FactorKind::Std,
        }
    }
}

impl From<SdMode> for Mode {
    fn from(m: SdMode) -> Self {
        match m {
            SdMode::Abs => Mode::Abs,
            SdMode::Signed => Mode::Signed,
        }
    }
}

/// Message for the most recent failure on this thread, or "". The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Sieves all primes up to `bound` into a new table.
#[no_mangle]
pub unsafe extern "C" fn sd_sieve(bound: u64, out: *mut *mut SdPrimeTable) -> SdStatus {
    guard(|| {
        non_null(out, "out")?;
        let table = core(sieve(bound))?;
        *out = Box::into_raw(Box::new(SdPrimeTable(Arc::new(table))));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn sd_prime_table_free(table: *mut SdPrimeTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of primes in the table; 0 for null.
#[no_mangle]
pub unsafe extern "C" fn sd_prime_table_len(table: *const SdPrimeTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.len())
}

/// The bound the table was sieved to; 0 for null.
#[no_mangle]
pub unsafe extern "C" fn sd_prime_table_bound(table: *const SdPrimeTable) -> u64 {
    table.as_ref().map_or(0, |t| t.0.bound())
}

/// Copies the primes into `buf`, which must hold `sd_prime_table_len` values.
#[no_mangle]
pub unsafe extern "C" fn sd_prime_table_copy(
    table: *const SdPrimeTable,
    buf: *mut u64,
    cap: usize,
) -> SdStatus {
    guard(|| {
        non_null(table, "table")?;
        non_null(buf, "buf")?;
        let primes = (*table).0.primes();
        if cap < primes.len() {
            return Err(fail(
                SdStatus::BufferTooSmall,
                format!("buffer holds {cap}, table has {}", primes.len()),
            ));
        }
        std::ptr::copy_nonoverlapping(primes.as_ptr(), buf, primes.len());
        Ok(())
    })
}

/// `mu = a_0 prod (1 + a_i)` for the tuple with angles `theta_0..theta_g`.
#[no_mangle]
pub unsafe extern "C" fn sd_mu(
    genus: usize,
    angles: *const f64,
    n_angles: usize,
    out: *mut f64,
) -> SdStatus {
    guard(|| {
        non_null(out, "out")?;
        let t = tuple_from(genus, angles, n_angles)?;
        *out = core(t.mu())?;
        Ok(())
    })
}

/// Dirichlet coefficients `c_0..c_{r_max}` of one local factor into `out`,
/// which must hold `r_max + 1` values.
#[no_mangle]
pub unsafe extern "C" fn sd_expand(
    genus: usize,
    angles: *const f64,
    n_angles: usize,
    kind: SdFactorKind,
    r_max: usize,
    out: *mut f64,
    out_len: usize,
) -> SdStatus {
    guard(|| {
        non_null(out, "out")?;
        if out_len < r_max + 1 {
            return Err(fail(
                SdStatus::BufferTooSmall,
                format!("need {} values, buffer holds {out_len}", r_max + 1),
            ));
        }
        let t = tuple_from(genus, angles, n_angles)?;
        let series = core(expand(&t.local_factor(kind.into()), r_max))?;
        std::ptr::copy_nonoverlapping(series.coeffs.as_ptr(), out, series.coeffs.len());
        Ok(())
    })
}

/// The exact coefficient bound; `SD_STATUS_OVERFLOW` when it exceeds 64 bits.
#[no_mangle]
pub unsafe extern "C" fn sd_coeff_bound(
    kind: SdFactorKind,
    genus: usize,
    r: u64,
    out: *mut u64,
) -> SdStatus {
    guard(|| {
        non_null(out, "out")?;
        let b = core(coeff_bound(kind.into(), genus, r))?;
        *out = u64::try_from(b)
            .map_err(|_| fail(SdStatus::Overflow, format!("bound {b} exceeds 64 bits")))?;
        Ok(())
    })
}

/// `(2 - 1/g) c^{-2/g}`; NaN for `genus == 0`.
#[no_mangle]
pub extern "C" fn sd_theorem1_bound(genus: usize, c: f64) -> f64 {
    if genus == 0 {
        return f64::NAN;
    }
    theorem1_bound(genus, c)
}

/// `4 / (c + 4)`.
#[no_mangle]
pub extern "C" fn sd_theorem2_bound(c: f64) -> f64 {
    theorem2_bound(c)
}

/// Builds a synthetic assignment over `table`. `c` is used by
/// `EXTREMAL_CONSTANT` only; `seed` by the stochastic kinds.
#[no_mangle]
pub unsafe extern "C" fn sd_assignment_build(
    table: *const SdPrimeTable,
    kind: SdSamplerKind,
    genus: usize,
    c: f64,
    seed: u64,
    out: *mut *mut SdAssignment,
) -> SdStatus {
    guard(|| {
        non_null(table, "table")?;
        non_null(out, "out")?;
        let spec = match kind {
            SdSamplerKind::UniformTorus => SamplerSpec::uniform(genus, seed),
            SdSamplerKind::SatoTateG1 => SamplerSpec {
                genus,
                ..SamplerSpec::sato_tate(seed)
            },
            SdSamplerKind::ExtremalConstant => SamplerSpec::extremal(genus, c),
            SdSamplerKind::AngleFamily => SamplerSpec::angle_family(genus),
        };
        let a = core(build_assignment(&spec, Arc::clone(&(*table).0)))?;
        *out = Box::into_raw(Box::new(SdAssignment(a)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn sd_assignment_free(assignment: *mut SdAssignment) {
    if !assignment.is_null() {
        drop(Box::from_raw(assignment));
    }
}

/// Number of primes covered; 0 for null.
#[no_mangle]
pub unsafe extern "C" fn sd_assignment_len(assignment: *const SdAssignment) -> usize {
    assignment.as_ref().map_or(0, |a| a.0.tuples().len())
}

/// `mu(p)` for every table prime into `out`, which must hold
/// `sd_assignment_len` values.
#[no_mangle]
pub unsafe extern "C" fn sd_assignment_mu(
    assignment: *const SdAssignment,
    out: *mut f64,
    cap: usize,
) -> SdStatus {
    guard(|| {
        non_null(assignment, "assignment")?;
        non_null(out, "out")?;
        let e = core((*assignment).0.eigenvalues())?;
        if cap < e.mu.len() {
            return Err(fail(
                SdStatus::BufferTooSmall,
                format!("buffer holds {cap}, assignment has {}", e.mu.len()),
            ));
        }
        std::ptr::copy_nonoverlapping(e.mu.as_ptr(), out, e.mu.len());
        Ok(())
    })
}

/// Truncated Dirichlet ratio of the exceptional set `{p : mu(p) exceeds c}`.
#[no_mangle]
pub unsafe extern "C" fn sd_exceptional_dirichlet_ratio(
    assignment: *const SdAssignment,
    c: f64,
    mode: SdMode,
    s: f64,
    out: *mut f64,
) -> SdStatus {
    guard(|| {
        non_null(assignment, "assignment")?;
        non_null(out, "out")?;
        let e = core((*assignment).0.eigenvalues())?;
        let set = core(exceptional_set(&e, c, mode.into()))?;
        *out = core(dirichlet_ratio(&set, s))?;
        Ok(())
    })
}

/// Fraction of primes up to `x` in the exceptional set.
#[no_mangle]
pub unsafe extern "C" fn sd_exceptional_natural_ratio(
    assignment: *const SdAssignment,
    c: f64,
    mode: SdMode,
    x: u64,
    out: *mut f64,
) -> SdStatus {
    guard(|| {
        non_null(assignment, "assignment")?;
        non_null(out, "out")?;
        let e = core((*assignment).0.eigenvalues())?;
        let set = core(exceptional_set(&e, c, mode.into()))?;
        *out = core(natural_ratio(&set, x))?;
        Ok(())
    })
}
