use std::ffi::CStr;
use std::ptr;

use satake_density_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sd_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn sieve_and_copy() {
    let mut table = ptr::null_mut();
    unsafe {
        assert_eq!(sd_sieve(30, &mut table), SdStatus::Ok);
        assert_eq!(sd_prime_table_len(table), 10);
        assert_eq!(sd_prime_table_bound(table), 30);
        let mut buf = [0u64; 10];
        assert_eq!(
            sd_prime_table_copy(table, buf.as_mut_ptr(), 10),
            SdStatus::Ok
        );
        assert_eq!(buf, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(
            sd_prime_table_copy(table, buf.as_mut_ptr(), 9),
            SdStatus::BufferTooSmall
        );
        assert!(last_error().contains("buffer holds 9"));
        sd_prime_table_free(table);
        sd_prime_table_free(ptr::null_mut());
    }
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        assert_eq!(sd_sieve(30, ptr::null_mut()), SdStatus::NullPointer);
        assert!(last_error().contains("out"));
        let mut mu = 0.0;
        assert_eq!(sd_mu(1, ptr::null(), 2, &mut mu), SdStatus::NullPointer);
        assert_eq!(sd_prime_table_len(ptr::null()), 0);
    }
}

#[test]
fn mu_and_expand() {
    let third = std::f64::consts::PI / 3.0;
    let angles = [third, -2.0 * third];
    let mut mu = 0.0;
    unsafe {
        assert_eq!(sd_mu(1, angles.as_ptr(), 2, &mut mu), SdStatus::Ok);
        assert!((mu - 1.0).abs() < 1e-12);

        let ones = [0.0; 3];
        let mut c = [0.0; 3];
        let st = sd_expand(
            2,
            ones.as_ptr(),
            3,
            SdFactorKind::Spin,
            2,
            c.as_mut_ptr(),
            3,
        );
        assert_eq!(st, SdStatus::Ok);
        assert_eq!(c, [1.0, 4.0, 10.0]);
        let st = sd_expand(
            2,
            ones.as_ptr(),
            3,
            SdFactorKind::Spin,
            3,
            c.as_mut_ptr(),
            3,
        );
        assert_eq!(st, SdStatus::BufferTooSmall);

        // broken central constraint
        let bad = [0.1, 0.0, 0.0];
        assert_eq!(sd_mu(2, bad.as_ptr(), 3, &mut mu), SdStatus::Domain);
        // wrong number of angles
        assert_eq!(
            sd_mu(2, bad.as_ptr(), 2, &mut mu),
            SdStatus::InvalidArgument
        );
        assert_eq!(
            sd_mu(0, bad.as_ptr(), 1, &mut mu),
            SdStatus::InvalidArgument
        );
    }
}

#[test]
fn coefficient_bounds_and_overflow() {
    let mut b = 0u64;
    unsafe {
        assert_eq!(
            sd_coeff_bound(SdFactorKind::Spin, 2, 2, &mut b),
            SdStatus::Ok
        );
        assert_eq!(b, 10);
        assert_eq!(
            sd_coeff_bound(SdFactorKind::Std, 2, 1, &mut b),
            SdStatus::Ok
        );
        assert_eq!(b, 4);
        // C(r + 2^7 - 1, 2^7 - 1) passes 2^64 quickly
        assert_eq!(
            sd_coeff_bound(SdFactorKind::Spin, 7, 40, &mut b),
            SdStatus::Overflow
        );
        assert!(!last_error().is_empty());
    }
}

#[test]
fn theorem_bounds() {
    assert_eq!(sd_theorem1_bound(2, 2.0), 0.75);
    assert_eq!(sd_theorem1_bound(1, 1.0), 1.0);
    assert!(sd_theorem1_bound(0, 1.0).is_nan());
    assert_eq!(sd_theorem2_bound(4.0), 0.5);
}

#[test]
fn assignment_ratios() {
    let mut table = ptr::null_mut();
    let mut a = ptr::null_mut();
    unsafe {
        assert_eq!(sd_sieve(1000, &mut table), SdStatus::Ok);
        let st = sd_assignment_build(table, SdSamplerKind::ExtremalConstant, 2, 4.0, 0, &mut a);
        assert_eq!(st, SdStatus::Ok);
        // the table handle may be released before the assignment
        sd_prime_table_free(table);
        assert_eq!(sd_assignment_len(a), 168);
        let mut mu = vec![0.0; 168];
        assert_eq!(sd_assignment_mu(a, mu.as_mut_ptr(), 168), SdStatus::Ok);
        assert!(mu.iter().all(|&m| m == 4.0));

        let mut r = -1.0;
        assert_eq!(
            sd_exceptional_dirichlet_ratio(a, 4.0, SdMode::Abs, 1.5, &mut r),
            SdStatus::Ok
        );
        assert_eq!(r, 1.0);
        assert_eq!(
            sd_exceptional_natural_ratio(a, 4.1, SdMode::Signed, 1000, &mut r),
            SdStatus::Ok
        );
        assert_eq!(r, 0.0);
        assert_eq!(
            sd_exceptional_dirichlet_ratio(a, 4.0, SdMode::Abs, 0.5, &mut r),
            SdStatus::Domain
        );
        assert_eq!(
            sd_exceptional_natural_ratio(a, 1.0, SdMode::Abs, 5000, &mut r),
            SdStatus::Domain
        );
        sd_assignment_free(a);
    }
}

#[test]
fn stochastic_assignment_is_reproducible() {
    let mut table = ptr::null_mut();
    unsafe {
        assert_eq!(sd_sieve(5000, &mut table), SdStatus::Ok);
        let n = sd_prime_table_len(table);
        let mut runs = Vec::new();
        for _ in 0..2 {
            let mut a = ptr::null_mut();
            let st = sd_assignment_build(table, SdSamplerKind::SatoTateG1, 1, 0.0, 9, &mut a);
            assert_eq!(st, SdStatus::Ok);
            let mut mu = vec![0.0; n];
            assert_eq!(sd_assignment_mu(a, mu.as_mut_ptr(), n), SdStatus::Ok);
            sd_assignment_free(a);
            runs.push(mu);
        }
        assert_eq!(runs[0], runs[1]);
        let mut a = ptr::null_mut();
        let st = sd_assignment_build(table, SdSamplerKind::SatoTateG1, 2, 0.0, 9, &mut a);
        assert_eq!(st, SdStatus::InvalidArgument);
        sd_prime_table_free(table);
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(sd_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
