use std::ffi::CStr;
use std::ptr;

use qdt_ffi::*;

fn last_error() -> String {
    let p = qdt_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn bell() -> *mut QdtState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let dims = [2usize, 2];
    let re = [h, 0.0, 0.0, h];
    let mut out = ptr::null_mut();
    let st = unsafe { qdt_state_new(dims.as_ptr(), 2, re.as_ptr(), ptr::null(), 4, &mut out) };
    assert_eq!(st, QdtStatus::Ok);
    out
}

#[test]
fn bell_measurement() {
    let s = bell();
    let mut m = QdtMeasurement::default();
    let st = unsafe { qdt_entanglement_production(s, ptr::null(), 2.0, &mut m) };
    assert_eq!(st, QdtStatus::Ok);
    assert!((m.epsilon_formula - 1.0).abs() < 1e-12);
    assert!((m.epsilon_variational - 1.0).abs() < 1e-12);
    assert!(!m.degenerate && !m.negative_formula);
    assert!(qdt_last_error().is_null());

    let mut dims = [0usize; 4];
    assert_eq!(unsafe { qdt_state_mode_counts(s, dims.as_mut_ptr(), 4) }, 2);
    assert_eq!(&dims[..2], &[2, 2]);
    assert_eq!(unsafe { qdt_state_action_count(s) }, 2);
    unsafe { qdt_state_free(s) };
}

#[test]
fn subnorm_and_json() {
    let s = bell();
    let mut v = 0.0;
    let opts = QdtOptions { seed: 7, ..qdt_default_options() };
    assert_eq!(unsafe { qdt_subnorm_variational(s, &opts, &mut v) }, QdtStatus::Ok);
    assert!((v - 0.5).abs() < 1e-12);

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { qdt_entanglement_report_json(s, &opts, 10.0, &mut text) }, QdtStatus::Ok);
    let json: serde_json::Value =
        serde_json::from_str(unsafe { CStr::from_ptr(text) }.to_str().unwrap()).unwrap();
    assert_eq!(json["action_count"], 2);
    unsafe {
        qdt_string_free(text);
        qdt_state_free(s);
    }
}

#[test]
fn closed_forms() {
    let mut out = 0.0;
    assert_eq!(unsafe { qdt_maximal_entanglement(3, 4, 2.0, &mut out) }, QdtStatus::Ok);
    assert!((out - 4.0).abs() < 1e-12);

    let re = [0.8f64.sqrt(), 0.2f64.sqrt()];
    assert_eq!(
        unsafe { qdt_multimode_entanglement(re.as_ptr(), ptr::null(), 2, 3, 2.0, &mut out) },
        QdtStatus::Ok
    );
    assert!((out - 2.0 * 1.25f64.log2()).abs() < 1e-12);

    let mut st = ptr::null_mut();
    assert_eq!(unsafe { qdt_state_multimode(3, 2, re.as_ptr(), ptr::null(), &mut st) }, QdtStatus::Ok);
    let mut m = QdtMeasurement::default();
    assert_eq!(unsafe { qdt_entanglement_production(st, ptr::null(), 2.0, &mut m) }, QdtStatus::Ok);
    assert!((m.epsilon_variational - out).abs() < 1e-10);
    unsafe { qdt_state_free(st) };
}

#[test]
fn document_parsing() {
    let doc = include_str!("../../core/data/bell.qdt");
    let mut s = ptr::null_mut();
    let st = unsafe { qdt_state_from_document(doc.as_ptr().cast(), doc.len(), &mut s) };
    assert_eq!(st, QdtStatus::Ok);
    assert_eq!(unsafe { qdt_state_action_count(s) }, 2);
    unsafe { qdt_state_free(s) };

    let bad = "{ not json";
    let st = unsafe { qdt_state_from_document(bad.as_ptr().cast(), bad.len(), &mut s) };
    assert_eq!(st, QdtStatus::Parse);
    assert!(last_error().contains("line"));

    let wrong = r#"{"actions": [], "coefficients": []}"#;
    let st = unsafe { qdt_state_from_document(wrong.as_ptr().cast(), wrong.len(), &mut s) };
    assert_eq!(st, QdtStatus::Validation);
}

#[test]
fn error_codes() {
    let mut s = ptr::null_mut();
    let dims = [2usize, 2];
    let re = [0.0; 4];
    assert_eq!(
        unsafe { qdt_state_new(dims.as_ptr(), 2, re.as_ptr(), ptr::null(), 4, &mut s) },
        QdtStatus::Degenerate
    );
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { qdt_state_new(dims.as_ptr(), 2, re.as_ptr(), ptr::null(), 3, &mut s) },
        QdtStatus::Shape
    );
    let nan = [f64::NAN, 1.0, 0.0, 0.0];
    assert_eq!(
        unsafe { qdt_state_new(dims.as_ptr(), 2, nan.as_ptr(), ptr::null(), 4, &mut s) },
        QdtStatus::NonFinite
    );
    assert_eq!(
        unsafe { qdt_state_new(ptr::null(), 2, re.as_ptr(), ptr::null(), 4, &mut s) },
        QdtStatus::NullPointer
    );

    let b = bell();
    let mut m = QdtMeasurement::default();
    assert_eq!(unsafe { qdt_entanglement_production(b, ptr::null(), 1.0, &mut m) }, QdtStatus::InvalidOptions);
    let opts = QdtOptions { restarts: 0, ..qdt_default_options() };
    let mut v = 0.0;
    assert_eq!(unsafe { qdt_subnorm_variational(b, &opts, &mut v) }, QdtStatus::InvalidOptions);
    assert_eq!(unsafe { qdt_subnorm_variational(ptr::null(), &opts, &mut v) }, QdtStatus::NullPointer);
    assert_eq!(unsafe { qdt_maximal_entanglement(0, 2, 2.0, &mut v) }, QdtStatus::InvalidRing);
    unsafe {
        qdt_state_free(b);
        qdt_state_free(ptr::null_mut());
    }
}

#[test]
fn header_is_current() {
    let header = include_str!("../include/qdt.h");
    for name in [
        "qdt_state_new",
        "qdt_state_free",
        "qdt_entanglement_production",
        "qdt_last_error",
        "typedef struct QdtState QdtState",
        "QDT_STATUS_NUMERIC_FAILURE = 8",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
