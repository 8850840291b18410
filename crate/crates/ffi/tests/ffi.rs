use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use twisted_fourier_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(tf_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn system_element_round_trip() {
    unsafe {
        let mut sys: *mut TfSystem = ptr::null_mut();
        assert_eq!(tf_system_preset(cstr("matrix-line").as_ptr(), &mut sys), TfStatus::Ok);
        let len = tf_system_coefficient_len(sys);
        assert_eq!(len, 2 * (4 + 1));

        let mut max_violation = f64::NAN;
        let mut pass: c_int = -1;
        assert_eq!(tf_validate_system(sys, 2.0, 500, 1, &mut max_violation, &mut pass), TfStatus::Ok);
        assert_eq!(pass, 1);
        assert!(max_violation <= 1e-10);

        let mut f: *mut TfElement = ptr::null_mut();
        assert_eq!(tf_element_zero(sys, &mut f), TfStatus::Ok);
        let a: Vec<f64> = (0..len).map(|i| i as f64 * 0.1).collect();
        assert_eq!(tf_element_add_term(sys, f, cstr("(2)").as_ptr(), a.as_ptr(), len), TfStatus::Ok);
        assert_eq!(tf_element_support_len(f), 1);
        let mut back = vec![0.0; len];
        assert_eq!(tf_element_coefficient(sys, f, cstr("(2)").as_ptr(), back.as_mut_ptr(), len), TfStatus::Ok);
        assert_eq!(back, a);

        // (f* ⋆ f)(e) has norm ‖f‖_α²
        let mut fs: *mut TfElement = ptr::null_mut();
        let mut prod: *mut TfElement = ptr::null_mut();
        assert_eq!(tf_element_star(sys, f, &mut fs), TfStatus::Ok);
        assert_eq!(tf_element_mul(sys, fs, f, &mut prod), TfStatus::Ok);
        let (mut l1, mut alpha) = (0.0, 0.0);
        assert_eq!(tf_element_norms(sys, f, &mut l1, &mut alpha), TfStatus::Ok);
        let (mut pl1, mut _pa) = (0.0, 0.0);
        assert_eq!(tf_element_norms(sys, prod, &mut pl1, &mut _pa), TfStatus::Ok);
        assert!((pl1 - alpha * alpha).abs() < 1e-10);

        let radii = [1.0, 3.0];
        let (mut lower, mut upper) = (0.0, 0.0);
        assert_eq!(tf_opnorm_bounds(sys, f, radii.as_ptr(), 2, &mut lower, &mut upper), TfStatus::Ok);
        assert!(lower <= upper + 1e-9 && (upper - l1).abs() < 1e-12);

        tf_element_free(prod);
        tf_element_free(fs);
        tf_element_free(f);
        tf_system_free(sys);
    }
}

#[test]
fn errors_are_reported_not_raised() {
    unsafe {
        let mut sys: *mut TfSystem = ptr::null_mut();
        assert_eq!(tf_system_preset(cstr("no-such").as_ptr(), &mut sys), TfStatus::Config);
        assert!(last_error().contains("no-such"));
        assert!(sys.is_null());
        assert_eq!(tf_system_preset(ptr::null(), &mut sys), TfStatus::NullPointer);
        assert_eq!(tf_system_from_config(cstr("x = 1").as_ptr(), &mut sys), TfStatus::Config);

        assert_eq!(tf_system_preset(cstr("psl").as_ptr(), &mut sys), TfStatus::Ok);
        assert!(last_error().is_empty());
        let mut other: *mut TfSystem = ptr::null_mut();
        assert_eq!(tf_system_preset(cstr("matrix-line").as_ptr(), &mut other), TfStatus::Ok);
        let mut f: *mut TfElement = ptr::null_mut();
        assert_eq!(tf_element_unit(other, &mut f), TfStatus::Ok);
        let mut g: *mut TfElement = ptr::null_mut();
        assert_eq!(tf_element_star(sys, f, &mut g), TfStatus::ShapeMismatch);
        assert_eq!(tf_element_mul(sys, f, f, &mut g), TfStatus::ShapeMismatch);
        let mut short = [0.0; 1];
        assert_eq!(
            tf_element_coefficient(other, f, cstr("e").as_ptr(), short.as_mut_ptr(), 1),
            TfStatus::ShapeMismatch
        );
        tf_element_free(f);
        tf_system_free(other);
        tf_system_free(sys);
        tf_system_free(ptr::null_mut());
        tf_element_free(ptr::null_mut());
        tf_string_free(ptr::null_mut());
    }
}

#[test]
fn experiments_run_through_the_abi() {
    let cfg = cstr("experiment = \"validate\"\nseed = 5\n[system]\npreset = \"rotation-algebra\"\nperturb = { g = \"(1,0)\", h = \"(0,1)\", phase = 0.1 }\n");
    unsafe {
        let mut json: *mut c_char = ptr::null_mut();
        let mut code: c_int = -1;
        assert_eq!(tf_run_experiment(cfg.as_ptr(), 0, 0, &mut json, &mut code), TfStatus::Ok);
        assert_eq!(code, 2);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        tf_string_free(json);
        let report: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(report["pass"], false);
        assert!(report["results"]["witness"].is_array());

        // the override replaces the seed
        let mut json2: *mut c_char = ptr::null_mut();
        assert_eq!(tf_run_experiment(cfg.as_ptr(), 1, 77, &mut json2, &mut code), TfStatus::Ok);
        let report2: serde_json::Value = serde_json::from_str(CStr::from_ptr(json2).to_str().unwrap()).unwrap();
        tf_string_free(json2);
        assert_eq!(report2["seed"], 77);

        let bad = cstr("experiment = \"nope\"\nseed = 1");
        assert_eq!(tf_run_experiment(bad.as_ptr(), 0, 0, &mut json, &mut code), TfStatus::Config);
    }
}
