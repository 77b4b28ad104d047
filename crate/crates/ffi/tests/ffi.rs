use std::ffi::{CStr, CString};
use std::ptr;

use finslerkit_ffi::*;

fn structure(spec: &str, dim: usize) -> *mut FkStructure {
    let spec = CString::new(spec).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { fk_structure_new(spec.as_ptr(), dim, &mut s) }, FkStatus::Ok);
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(fk_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn polar_spray_through_the_c_interface() {
    let s = structure("builtin:polar", 2);
    let (x, y) = ([2.0, 0.0], [1.0, 1.0]);
    let mut g = [0.0; 2];
    let mut n = [0.0; 4];
    let status = unsafe { fk_spray(s, x.as_ptr(), y.as_ptr(), g.as_mut_ptr(), n.as_mut_ptr()) };
    assert_eq!(status, FkStatus::Ok);
    assert!((g[0] + 1.0).abs() < 1e-12 && (g[1] - 0.5).abs() < 1e-12);
    // N = dG/dy with G = (-x1 y2^2 / 2, y1 y2 / x1)
    let expected = [0.0, -2.0, 0.5, 0.5];
    for (a, b) in n.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12);
    }
    let mut e = 0.0;
    assert_eq!(unsafe { fk_energy(s, x.as_ptr(), y.as_ptr(), &mut e) }, FkStatus::Ok);
    assert!((e - 2.5).abs() < 1e-12);
    let mut rho = 0.0;
    assert_eq!(unsafe { fk_volume_density(s, x.as_ptr(), y.as_ptr(), &mut rho) }, FkStatus::Ok);
    assert!((rho - 4.0).abs() < 1e-12);
    let mut dim = 0;
    assert_eq!(unsafe { fk_structure_dim(s, &mut dim) }, FkStatus::Ok);
    assert_eq!(dim, 2);
    unsafe { fk_structure_free(s) };
}

#[test]
fn errors_are_reported_with_codes() {
    let bad = CString::new("builtin:nowhere").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { fk_structure_new(bad.as_ptr(), 2, &mut s) }, FkStatus::InvalidInput);
    assert!(s.is_null());
    assert!(last_error().contains("nowhere"));

    assert_eq!(unsafe { fk_structure_new(ptr::null(), 2, &mut s) }, FkStatus::NullPointer);

    let s = structure("builtin:euclidean", 2);
    let zero = [0.0, 0.0];
    let mut e = 0.0;
    assert_eq!(unsafe { fk_energy(s, zero.as_ptr(), zero.as_ptr(), &mut e) }, FkStatus::Degenerate);
    unsafe { fk_structure_free(s) };

    let rank_one = structure("expr:sqrt(y1^2)", 2);
    let field = CString::new("builtin:radial").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { fk_field_new(field.as_ptr(), 2, &mut f) }, FkStatus::Ok);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { fk_classify_json(rank_one, f, 0, &mut json) }, FkStatus::Indeterminate);
    unsafe {
        fk_field_free(f);
        fk_structure_free(rank_one);
    }
}

#[test]
fn classification_and_identity_reports() {
    let s = structure("builtin:euclidean", 2);
    let spec = CString::new("builtin:rotation").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { fk_field_new(spec.as_ptr(), 2, &mut f) }, FkStatus::Ok);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { fk_classify_json(s, f, 3, &mut json) }, FkStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
    unsafe { fk_string_free(json) };
    assert!(text.contains("\"killing\": \"holds\""));
    assert!(text.contains("\"field\": \"builtin:rotation\""));

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { fk_identities_json(s, 3, &mut json) }, FkStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
    unsafe { fk_string_free(json) };
    assert!(text.contains("\"all_passed\": true"));
    unsafe {
        fk_field_free(f);
        fk_structure_free(s);
        fk_string_free(ptr::null_mut());
        fk_structure_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/finslerkit.h")).unwrap();
    for name in [
        "FK_STATUS_DEGENERATE",
        "typedef struct FkStructure FkStructure",
        "fk_structure_new",
        "fk_spray",
        "fk_classify_json",
        "fk_string_free",
        "fk_last_error",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
