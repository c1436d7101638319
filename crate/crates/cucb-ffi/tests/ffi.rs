//! Exercises the C ABI through the exported extern functions, exactly as
//! a foreign caller would (modulo the FFI boundary itself).

use std::ffi::{c_int, CStr, CString};
use std::ptr;

use cucb_ffi::*;

const EXAMPLE_JSON: &[u8] =
    br#"{"outcomes": [[0.0],[1.0],[2.0]], "pmf": [0.3,0.35,0.35], "rewards": [[1,2,2],[1.5,0,1.5]]}"#;

fn model_from_json(json: &[u8]) -> *mut CucbModel {
    let json = CString::new(json).unwrap();
    let mut handle: *mut CucbModel = ptr::null_mut();
    let status = unsafe { cucb_model_from_json(json.as_ptr(), 0.0, &mut handle) };
    assert_eq!(status, CucbStatus::Ok);
    assert!(!handle.is_null());
    handle
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(cucb_last_error()).to_string_lossy().into_owned() }
}

#[test]
fn model_lifecycle_and_getters() {
    let m = model_from_json(EXAMPLE_JSON);
    unsafe {
        assert_eq!(cucb_model_num_arms(m), 2);
        assert_eq!(cucb_model_num_outcomes(m), 3);
        assert_eq!(cucb_model_reward_span(m), 1.5);
        let mut mean = 0.0;
        assert_eq!(cucb_model_mean(m, 0, &mut mean), CucbStatus::Ok);
        assert!((mean - 1.7).abs() < 1e-12);
        assert_eq!(cucb_model_mean(m, 9, &mut mean), CucbStatus::InvalidArgument);
        assert!(last_error().contains("arm 9"));
        cucb_model_free(m);
    }
}

#[test]
fn classification_buffers_are_filled() {
    let m = model_from_json(EXAMPLE_JSON);
    let mut k_star = usize::MAX;
    let mut gaps = [0.0f64; 4];
    let mut kinds = [-1 as c_int; 2];
    unsafe {
        let status = cucb_model_classify(m, &mut k_star, gaps.as_mut_ptr(), kinds.as_mut_ptr());
        assert_eq!(status, CucbStatus::Ok);
        cucb_model_free(m);
    }
    assert_eq!(k_star, 0);
    assert_eq!(kinds, [0, 2]);
    // gaps[l*K + k] = mu_k - phi_{l,k}; arm 1 vs optimal arm 0 is 0.2.
    assert!((gaps[2] - 0.2).abs() < 1e-12);
    assert_eq!(gaps[0], 0.0);
}

#[test]
fn scenario_constructor_and_lower_bound() {
    let name = CString::new("example2(1,0,0)").unwrap();
    let mut m: *mut CucbModel = ptr::null_mut();
    unsafe {
        assert_eq!(
            cucb_model_from_scenario(name.as_ptr(), 0, 0.0, &mut m),
            CucbStatus::Ok
        );
        let mut rate = -1.0;
        assert_eq!(cucb_model_lower_bound(m, &mut rate), CucbStatus::Ok);
        assert!((rate - 0.5 / 8.0f64.ln()).abs() < 1e-12);
        cucb_model_free(m);

        let bogus = CString::new("no-such-scenario").unwrap();
        assert_eq!(
            cucb_model_from_scenario(bogus.as_ptr(), 0, 0.0, &mut m),
            CucbStatus::InvalidArgument
        );
    }
}

#[test]
fn policy_select_update_cycle() {
    let m = model_from_json(EXAMPLE_JSON);
    let mut p: *mut CucbPolicy = ptr::null_mut();
    unsafe {
        assert_eq!(cucb_policy_new(m, 1, &mut p), CucbStatus::Ok);
        let mut arm = usize::MAX;
        // Round-robin initialization: arm 0 first, arm 1 second.
        assert_eq!(cucb_policy_select(p, &mut arm), CucbStatus::Ok);
        assert_eq!(arm, 0);
        assert_eq!(cucb_policy_update(p, 0, 2.0), CucbStatus::Ok);
        assert_eq!(cucb_policy_select(p, &mut arm), CucbStatus::Ok);
        assert_eq!(arm, 1);
        assert_eq!(cucb_policy_update(p, 1, 1.5), CucbStatus::Ok);
        assert_eq!(cucb_policy_round(p), 2);
        let mut pulls = 0u64;
        assert_eq!(cucb_policy_pulls(p, 0, &mut pulls), CucbStatus::Ok);
        assert_eq!(pulls, 1);
        // A reward the model can never produce is a hard error.
        assert_eq!(cucb_policy_update(p, 0, 42.0), CucbStatus::UnknownReward);
        assert!(last_error().contains("42"));
        cucb_policy_free(p);
        cucb_model_free(m);
    }
}

#[test]
fn episode_is_seed_deterministic() {
    let m = model_from_json(EXAMPLE_JSON);
    let mut regret_a = 0.0;
    let mut regret_b = 0.0;
    let mut pulls = [0u64; 2];
    unsafe {
        assert_eq!(
            cucb_run_episode(m, 1, 5000, 42, &mut regret_a, pulls.as_mut_ptr()),
            CucbStatus::Ok
        );
        assert_eq!(
            cucb_run_episode(m, 1, 5000, 42, &mut regret_b, ptr::null_mut()),
            CucbStatus::Ok
        );
        assert_eq!(cucb_run_episode(m, 7, 10, 0, &mut regret_a, ptr::null_mut()),
            CucbStatus::InvalidArgument);
        cucb_model_free(m);
    }
    assert_eq!(regret_a, regret_b);
    assert_eq!(pulls.iter().sum::<u64>(), 5000);
}

#[test]
fn bound_evaluators_match_library_values() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(cucb_bound_noncompetitive(1, 1, 1.0, &mut v), CucbStatus::Ok);
        assert_eq!(v, 2.0);
        assert_eq!(cucb_bound_competitive(1, 1, 1.0, 1.0, &mut v), CucbStatus::Ok);
        let expected = 1.0 + std::f64::consts::PI.powi(2) / 3.0 + (-0.5f64).exp();
        assert!((v - expected).abs() < 1e-12);
        assert_eq!(
            cucb_bound_competitive(1, 1, 0.0, 1.0, &mut v),
            CucbStatus::AnalysisError
        );
    }
    let wc = cucb_bound_worst_case(1, std::f64::consts::E, 1.0);
    assert!((wc - 6.0 * std::f64::consts::E.sqrt()).abs() < 1e-12);
}

#[test]
fn null_arguments_are_reported() {
    unsafe {
        let mut out = 0.0;
        assert_eq!(
            cucb_model_mean(ptr::null(), 0, &mut out),
            CucbStatus::NullArgument
        );
        let mut handle: *mut CucbModel = ptr::null_mut();
        assert_eq!(
            cucb_model_from_json(ptr::null(), 0.0, &mut handle),
            CucbStatus::NullArgument
        );
        let bad = CString::new("{not json").unwrap();
        assert_eq!(
            cucb_model_from_json(bad.as_ptr(), 0.0, &mut handle),
            CucbStatus::ModelError
        );
        assert!(!last_error().is_empty());
        // Free of null handles is a no-op.
        cucb_model_free(ptr::null_mut());
        cucb_policy_free(ptr::null_mut());
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(cucb_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
