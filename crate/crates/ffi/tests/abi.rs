use std::ffi::{CStr, CString};
use std::ptr;

use isolab_ffi::*;

fn last_error() -> String {
    unsafe {
        CStr::from_ptr(isolab_last_error())
            .to_string_lossy()
            .into_owned()
    }
}

#[test]
fn expression_round_trip() {
    unsafe {
        let mut e = ptr::null_mut();
        let text = CString::new("z^3 - 2*z").unwrap();
        assert_eq!(isolab_expr_parse(text.as_ptr(), &mut e), IsolabStatus::Ok);
        let mut d = ptr::null_mut();
        assert_eq!(isolab_expr_derivative(e, &mut d), IsolabStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        // (1 + i)^3 - 2(1 + i) = -4
        assert_eq!(
            isolab_expr_eval(e, 1.0, 1.0, &mut re, &mut im),
            IsolabStatus::Ok
        );
        assert!((re + 4.0).abs() < 1e-14 && im.abs() < 1e-14);
        // 3 (1 + i)^2 - 2 = -2 + 6i
        assert_eq!(
            isolab_expr_eval(d, 1.0, 1.0, &mut re, &mut im),
            IsolabStatus::Ok
        );
        assert!((re + 2.0).abs() < 1e-14 && (im - 6.0).abs() < 1e-14);
        isolab_expr_free(d);
        isolab_expr_free(e);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut e = ptr::null_mut();
        let bad = CString::new("z +* 1").unwrap();
        assert_eq!(
            isolab_expr_parse(bad.as_ptr(), &mut e),
            IsolabStatus::Syntax
        );
        assert!(e.is_null());
        assert!(last_error().contains("offset"));

        let text = CString::new("1/z").unwrap();
        assert_eq!(isolab_expr_parse(text.as_ptr(), &mut e), IsolabStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(
            isolab_expr_eval(e, 0.0, 0.0, &mut re, &mut im),
            IsolabStatus::Pole
        );
        assert_eq!(
            isolab_expr_eval(e, 1.0, 0.0, ptr::null_mut(), &mut im),
            IsolabStatus::NullPointer
        );
        isolab_expr_free(e);
        isolab_expr_free(ptr::null_mut());

        assert_eq!(
            isolab_expr_parse(ptr::null(), &mut e),
            IsolabStatus::NullPointer
        );
    }
}

#[test]
fn inversion_through_the_abi() {
    // x ↦ (x - 3i)⁻¹
    let mut coeffs = [0.0; 16];
    coeffs[4] = 1.0;
    coeffs[8] = 1.0;
    coeffs[13] = -3.0;
    let mut out = [0.0; 3];
    unsafe {
        assert_eq!(
            isolab_mobius_apply(coeffs.as_ptr(), [1.0, 0.0, 0.0].as_ptr(), out.as_mut_ptr()),
            IsolabStatus::Ok
        );
        // (-2i)⁻¹ = i/2
        assert_eq!(out, [0.5, 0.0, 0.0]);
        assert_eq!(
            isolab_mobius_apply(coeffs.as_ptr(), [3.0, 0.0, 0.0].as_ptr(), out.as_mut_ptr()),
            IsolabStatus::Pole
        );
    }
}

const CONFIG: &str = r#"{
    "surface": {"catalog": "mercator-sphere"},
    "grid": {"u0": 0.2, "v0": 0.2, "du": 0.05, "dv": 0.05, "nu": 21, "nv": 21},
    "transform": "christoffel"
}"#;

#[test]
fn run_and_read_reports() {
    unsafe {
        let json = CString::new(CONFIG).unwrap();
        let mut config = ptr::null_mut();
        assert_eq!(
            isolab_config_parse(json.as_ptr(), &mut config),
            IsolabStatus::Ok
        );
        let mut run = ptr::null_mut();
        assert_eq!(isolab_run(config, &mut run), IsolabStatus::Ok);
        assert!(isolab_run_passed(run));
        let n = isolab_run_report_count(run);
        assert!(n >= 5);
        let mut names = Vec::new();
        for k in 0..n {
            let mut r = std::mem::zeroed::<IsolabReport>();
            assert_eq!(isolab_run_report(run, k, &mut r), IsolabStatus::Ok);
            assert!(r.pass && r.max <= r.tolerance && r.order_estimate.is_nan());
            names.push(
                CStr::from_ptr(isolab_run_report_name(run, k))
                    .to_str()
                    .unwrap()
                    .to_string(),
            );
        }
        assert!(names.iter().any(|n| n == "involution"));
        let mut r = std::mem::zeroed::<IsolabReport>();
        assert_eq!(isolab_run_report(run, n, &mut r), IsolabStatus::OutOfRange);
        assert!(isolab_run_report_name(run, n).is_null());

        let dual = CString::new("dual").unwrap();
        let mut len = 0;
        assert_eq!(
            isolab_run_surface(run, dual.as_ptr(), ptr::null_mut(), &mut len),
            IsolabStatus::Ok
        );
        assert_eq!(len, 3 * 21 * 21);
        let mut buf = vec![0.0; len];
        assert_eq!(
            isolab_run_surface(run, dual.as_ptr(), buf.as_mut_ptr(), &mut len),
            IsolabStatus::Ok
        );
        assert!(buf.iter().all(|x| x.is_finite()));
        let mut short = 3;
        assert_eq!(
            isolab_run_surface(run, dual.as_ptr(), buf.as_mut_ptr(), &mut short),
            IsolabStatus::OutOfRange
        );

        isolab_run_free(run);
        isolab_config_free(config);
    }
}

#[test]
fn config_errors() {
    unsafe {
        let mut config = ptr::null_mut();
        let bad = CString::new(CONFIG.replace(
            "\"transform\": \"christoffel\"",
            "\"transform\": {\"darboux\": {\"t\": 0.0, \"seed\": [0, 0, 1]}}",
        ))
        .unwrap();
        assert_eq!(
            isolab_config_parse(bad.as_ptr(), &mut config),
            IsolabStatus::Config
        );
        assert!(last_error().contains(".t"), "{}", last_error());
        let path = CString::new("/nonexistent/isolab.json").unwrap();
        assert_eq!(
            isolab_config_load(path.as_ptr(), &mut config),
            IsolabStatus::Io
        );
        assert!(config.is_null());
    }
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(isolab_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
