use std::ffi::{CStr, CString};
use std::ptr;

use regretlab_ffi::*;

const TWO_POINT: &str = r#"{"components":[{"atom":{"at":-1.0,"w":0.5}},{"atom":{"at":1.0,"w":0.5}}]}"#;
const UNIFORM: &str = r#"{"components":[{"uniform":{"lo":-1.0,"hi":1.0,"w":1.0}}]}"#;

fn dist(json: &str) -> *mut RlDist {
    let s = CString::new(json).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { rl_dist_from_json(s.as_ptr(), &mut d) }, RlStatus::Ok);
    d
}

fn policy(json: &str) -> *mut RlPolicy {
    let s = CString::new(json).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { rl_policy_from_json(s.as_ptr(), &mut p) }, RlStatus::Ok);
    p
}

fn last_error() -> String {
    let p = rl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn dist_round_trip_and_queries() {
    let d = dist(TWO_POINT);
    let mut x = 0.0;
    unsafe {
        assert_eq!(rl_dist_prob_le(d, 0.0, &mut x), RlStatus::Ok);
        assert_eq!(x, 0.5);
        assert_eq!(rl_dist_mean(d, &mut x), RlStatus::Ok);
        assert_eq!(x, 0.0);
        let mut s = ptr::null_mut();
        assert_eq!(rl_dist_to_json(d, &mut s), RlStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        rl_string_free(s);
        let again = dist(&text);
        let mut y = 0.0;
        rl_dist_prob_le(again, 0.99, &mut y);
        assert_eq!(y, 0.5);
        rl_dist_free(again);
        rl_dist_free(d);
    }
}

#[test]
fn theta_of_equal_revenue() {
    let mut d = ptr::null_mut();
    let mut prof = RlOffsetProfile::default();
    unsafe {
        assert_eq!(rl_dist_equal_revenue(6f64.exp(), 4000, &mut d), RlStatus::Ok);
        assert_eq!(rl_theta(d, &mut prof), RlStatus::Ok);
        let mut greedy = 0.0;
        assert_eq!(rl_threshold_regret(d, 0.0, &mut greedy), RlStatus::Ok);
        assert!((greedy - 0.875).abs() < 2e-3);
        rl_dist_free(d);
    }
    assert!((prof.theta + 0.75).abs() < 2e-3);
    assert!((prof.regret - 0.21875).abs() < 2e-3);
}

#[test]
fn binary_policy_calls() {
    let d = dist(TWO_POINT);
    let p = policy(
        r#"{"binary":{"segments":[{"to":-1,"a":0,"b":0},{"from":-1,"to":1,"a":0.5,"b":0.5},{"from":1,"a":0,"b":1}]}}"#,
    );
    let (mut r, mut w, mut at) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(rl_binary_worstcase(d, p, &mut r, &mut w), RlStatus::Ok);
        assert_eq!(rl_binary_regret(d, p, w, &mut at), RlStatus::Ok);
        let mut rep = RlBoundReport::default();
        assert_eq!(rl_opt_lower_bound_binary(d, &mut rep), RlStatus::Ok);
        assert!((rep.bound - 3.0 / 32.0).abs() < 1e-12);
        assert!(rep.ratio_ok);
        rl_policy_free(p);
        rl_dist_free(d);
    }
    assert!((r - 0.25).abs() < 1e-12);
    assert!(at <= r + 1e-12);
}

#[test]
fn exact_and_mc_regret_agree() {
    let ds = [dist(TWO_POINT), dist(UNIFORM)];
    let ptrs: Vec<*const RlDist> = ds.iter().map(|&d| d as *const RlDist).collect();
    let values = [0.3, 0.0];
    let p = policy(r#"{"offset":{"thetas":[0.0,0.0]}}"#);
    let mut exact = 0.0;
    let mut est = RlRegretEstimate::default();
    unsafe {
        assert_eq!(rl_regret_exact(ptrs.as_ptr(), values.as_ptr(), 2, p, &mut exact), RlStatus::Ok);
        assert_eq!(rl_mc_regret(ptrs.as_ptr(), values.as_ptr(), 2, p, 40_000, 7, &mut est), RlStatus::Ok);
        rl_policy_free(p);
        for d in ds {
            rl_dist_free(d);
        }
    }
    assert!(!est.exact);
    assert_eq!(est.samples, 40_000);
    assert!((est.value - exact).abs() <= 4.0 * est.std_error);
}

#[test]
fn errors_are_reported() {
    let mut d = ptr::null_mut();
    let bad = CString::new(r#"{"components":[{"atom":{"at":0,"w":0.3}}]}"#).unwrap();
    unsafe {
        assert_eq!(rl_dist_from_json(bad.as_ptr(), &mut d), RlStatus::Parse);
        assert!(d.is_null());
        assert!(last_error().contains("weights"));

        let junk = CString::new("{").unwrap();
        assert_eq!(rl_dist_from_json(junk.as_ptr(), &mut d), RlStatus::Parse);
        assert_eq!(rl_dist_from_json(ptr::null(), &mut d), RlStatus::NullPointer);
        assert_eq!(rl_dist_from_json(junk.as_ptr(), ptr::null_mut()), RlStatus::NullPointer);

        let mut x = 0.0;
        assert_eq!(rl_dist_mean(ptr::null(), &mut x), RlStatus::NullPointer);
        assert_eq!(rl_dist_equal_revenue(0.5, 10, &mut d), RlStatus::InvalidArgument);

        let point = dist(r#"{"components":[{"atom":{"at":0.2,"w":1.0}}]}"#);
        let mut rep = RlBoundReport::default();
        assert_eq!(rl_opt_lower_bound_binary(point, &mut rep), RlStatus::Degenerate);

        let off = policy(r#"{"offset":{"thetas":[0.0]}}"#);
        let (mut r, mut w) = (0.0, 0.0);
        assert_eq!(rl_binary_worstcase(point, off, &mut r, &mut w), RlStatus::WrongPolicyKind);

        assert_eq!(rl_dist_mean(point, &mut x), RlStatus::Ok);
        assert!(rl_last_error_message().is_null());
        rl_policy_free(off);
        rl_dist_free(point);
        rl_dist_free(ptr::null_mut());
    }
}
