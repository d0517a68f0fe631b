use std::ffi::{CStr, CString};
use std::ptr;

use conetensor_ffi::*;

const SQUARE: &str = r#"{"kind":"polygon","vertices":[["1/1","1/1"],["-1/1","1/1"],["-1/1","-1/1"],["1/1","-1/1"]]}"#;
const CLASSICAL3: &str = r#"{"kind":"classical","n":3}"#;

fn cone(json: &str) -> *mut CtCone {
    let text = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ct_cone_from_json(text.as_ptr(), &mut out) }, CtStatus::Ok);
    out
}

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    ct_string_free(p);
    s
}

unsafe fn last_error() -> String {
    CStr::from_ptr(ct_last_error_message()).to_str().unwrap().to_owned()
}

#[test]
fn certify_and_verify_round_trip() {
    unsafe {
        let sq = cone(SQUARE);
        let mut cert = ptr::null_mut();
        assert_eq!(ct_certify(sq, sq, 0, &mut cert), CtStatus::Ok);
        let mut value = ptr::null_mut();
        assert_eq!(ct_certificate_separation_value(cert, &mut value), CtStatus::Ok);
        assert_eq!(take_string(value), "-1/1");
        assert_eq!(ct_verify(cert, sq, sq, 0), CtStatus::Ok);

        let mut json = ptr::null_mut();
        assert_eq!(ct_certificate_to_json(cert, &mut json), CtStatus::Ok);
        let mut tampered: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        tampered["witness"][0][0] = "5/1".into();
        let text = CString::new(tampered.to_string()).unwrap();
        let mut bad = ptr::null_mut();
        assert_eq!(ct_certificate_from_json(text.as_ptr(), &mut bad), CtStatus::Ok);
        assert_eq!(ct_verify(bad, sq, sq, 0), CtStatus::Negative);
        assert_eq!(last_error(), "certificate invalid");

        ct_certificate_free(bad);
        ct_certificate_free(cert);
        ct_cone_free(sq);
    }
}

#[test]
fn classical_input_is_a_negative() {
    unsafe {
        let cl = cone(CLASSICAL3);
        let sq = cone(SQUARE);
        let mut flag = -1;
        assert_eq!(ct_cone_is_classical(cl, &mut flag), CtStatus::Ok);
        assert_eq!(flag, 1);
        let mut cert = ptr::null_mut();
        assert_eq!(ct_certify(cl, sq, 0, &mut cert), CtStatus::Negative);
        assert!(cert.is_null());
        assert_eq!(last_error(), "first cone is classical");
        ct_cone_free(cl);
        ct_cone_free(sq);
    }
}

#[test]
fn cone_queries() {
    unsafe {
        let sq = cone(SQUARE);
        let mut dim = 0;
        assert_eq!(ct_cone_ambient_dim(sq, &mut dim), CtStatus::Ok);
        assert_eq!(dim, 3);
        let mut dual = ptr::null_mut();
        assert_eq!(ct_cone_dual(sq, &mut dual), CtStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(ct_cone_to_json(dual, &mut json), CtStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(v["generators"].as_array().unwrap().len(), 4);
        ct_cone_free(dual);
        ct_cone_free(sq);
    }
}

#[test]
fn tensor_norms_json() {
    let square = CString::new(r#"{"ball":{"kind":"polytope","vertices":[["1/1","1/1"],["-1/1","1/1"],["-1/1","-1/1"],["1/1","-1/1"]]}}"#).unwrap();
    let z = CString::new(r#"[["1/1","1/1"],["1/1","-1/1"]]"#).unwrap();
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(ct_tensor_norms(square.as_ptr(), square.as_ptr(), z.as_ptr(), &mut out), CtStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(v["epsilon"], "1/1");
        assert_eq!(v["pi"], "2/1");
    }
}

#[test]
fn bad_arguments_are_reported() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(ct_cone_from_json(ptr::null(), &mut out), CtStatus::NullPointer);
        let bad = CString::new(r#"{"kind":"banana"}"#).unwrap();
        assert_eq!(ct_cone_from_json(bad.as_ptr(), &mut out), CtStatus::Error);
        assert!(!ct_last_error_message().is_null());
        let sq = cone(SQUARE);
        assert_eq!(ct_cone_ambient_dim(sq, ptr::null_mut()), CtStatus::NullPointer);
        ct_cone_free(sq);
        ct_cone_free(ptr::null_mut());
        ct_string_free(ptr::null_mut());
        assert!(CStr::from_ptr(ct_version()).to_str().unwrap().starts_with("0."));
    }
}

#[test]
fn header_declares_every_entry_point_and_compiles() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = std::fs::read_to_string(format!("{dir}/include/conetensor.h")).unwrap();
    let source = std::fs::read_to_string(format!("{dir}/src/lib.rs")).unwrap();
    for line in source.lines().filter(|l| l.contains("extern \"C\" fn ct_")) {
        let name = line.split("fn ").nth(1).unwrap().split('(').next().unwrap();
        assert!(header.contains(&format!("{name}(")), "{name} missing from the header");
    }
    // Compile check with the system C compiler when one is present.
    if let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", &format!("{dir}/include/conetensor.h")])
        .status()
    {
        assert!(status.success());
    }
}
