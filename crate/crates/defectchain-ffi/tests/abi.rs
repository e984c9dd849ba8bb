use std::ffi::CStr;
use std::ptr;

use defectchain_ffi::*;

fn last_error() -> String {
    let p = dc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn derived_category_matches_builtin() {
    unsafe {
        let mut derived = ptr::null_mut();
        let mut builtin = ptr::null_mut();
        assert_eq!(dc_category_derive(1, &mut derived), DcStatus::Ok);
        assert_eq!(dc_category_ising(1, &mut builtin), DcStatus::Ok);
        let mut same = false;
        assert_eq!(dc_category_same_data(derived, builtin, &mut same), DcStatus::Ok);
        assert!(same);
        let mut n = 0;
        assert_eq!(dc_category_n_labels(derived, &mut n), DcStatus::Ok);
        assert_eq!(n, 3);
        let mut v = usize::MAX;
        assert_eq!(dc_category_pentagon_violations(derived, &mut v), DcStatus::Ok);
        assert_eq!(v, 0);
        // F^{***}_{*;1,1} = -1/sqrt2
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(dc_category_fsymbol(derived, [2, 2, 2, 2, 1, 1].as_ptr(), &mut re, &mut im), DcStatus::Ok);
        assert!((re + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15 && im == 0.0);
        dc_category_free(derived);
        dc_category_free(builtin);
    }
}

#[test]
fn defect_chain_spectrum_equals_tfim() {
    unsafe {
        let mut cat = ptr::null_mut();
        assert_eq!(dc_category_derive(-1, &mut cat), DcStatus::Ok);
        let mut h = ptr::null_mut();
        assert_eq!(dc_defect_chain_new(cat, 9, DcBoundary::FixedStar, &mut h), DcStatus::Ok);
        let mut t = ptr::null_mut();
        assert_eq!(dc_tfim_new(4, DcTfimConvention::MatchDefectChain, &mut t), DcStatus::Ok);
        let mut values = Vec::new();
        for op in [h, t] {
            let mut dim = 0;
            assert_eq!(dc_operator_dim(op, &mut dim), DcStatus::Ok);
            assert_eq!(dim, 16);
            let mut s = ptr::null_mut();
            assert_eq!(dc_diagonalize_dense(op, &mut s), DcStatus::Ok);
            let mut len = 0;
            assert_eq!(dc_spectrum_len(s, &mut len), DcStatus::Ok);
            let mut buf = vec![0.0; len];
            assert_eq!(dc_spectrum_copy(s, buf.as_mut_ptr(), len), DcStatus::Ok);
            values.push(buf);
            dc_spectrum_free(s);
            dc_operator_free(op);
        }
        for (a, b) in values[0].iter().zip(&values[1]) {
            assert!((a - b).abs() < 1e-10);
        }
        dc_category_free(cat);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut cat = ptr::null_mut();
        assert_eq!(dc_category_vec_zp(0, &mut cat), DcStatus::InvalidArgument);
        assert!(cat.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(dc_category_ising(0, &mut cat), DcStatus::InvalidArgument);
        assert_eq!(dc_category_n_labels(ptr::null(), &mut 0), DcStatus::NullPointer);
        assert_eq!(dc_category_vec_zp(2, ptr::null_mut()), DcStatus::NullPointer);

        assert_eq!(dc_category_vec_zp(2, &mut cat), DcStatus::Ok);
        assert!(dc_last_error_message().is_null());
        let mut op = ptr::null_mut();
        // the defect chain needs a `*` label
        assert_ne!(dc_defect_chain_new(cat, 5, DcBoundary::FixedStar, &mut op), DcStatus::Ok);
        assert!(op.is_null());
        dc_category_free(cat);

        let mut t = ptr::null_mut();
        assert_eq!(dc_tfim_new(2, DcTfimConvention::PerSite, &mut t), DcStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(dc_diagonalize_dense(t, &mut s), DcStatus::Ok);
        let mut small = [0.0; 2];
        assert_eq!(dc_spectrum_copy(s, small.as_mut_ptr(), 2), DcStatus::InvalidArgument);
        dc_spectrum_free(s);
        dc_operator_free(t);

        let json = c"{\"labels\": [\"1\"]}";
        assert_eq!(dc_category_from_json(json.as_ptr(), &mut cat), DcStatus::InvalidArgument);
    }
}

#[test]
fn free_fermion_energy_two_sites() {
    let mut e = 0.0;
    assert_eq!(unsafe { dc_free_fermion_energy(1, &mut e) }, DcStatus::Ok);
    // -(1/sqrt2)(1 + 1)
    assert!((e + std::f64::consts::SQRT_2).abs() < 1e-14);
    assert_eq!(unsafe { dc_free_fermion_energy(0, &mut e) }, DcStatus::InvalidArgument);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(dc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
