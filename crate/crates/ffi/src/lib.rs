//! C ABI over `regretlab`.
//!
//! Distributions and policies are opaque handles created from JSON and
//! released with their `_free` function. Every fallible call returns an
//! [`RlStatus`]; on failure [`rl_last_error_message`] describes the error
//! for the calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use regretlab::dist::MixtureDistribution;
use regretlab::lowerbound::{opt_lower_bound_binary, QuadConfig};
use regretlab::offset::{theta, threshold_regret};
use regretlab::policy::{BinaryRandomizedPolicy, OffsetPolicy, Policy};
use regretlab::regret::{binary_regret, binary_worstcase, mc_regret, regret_exact, EstimateKind, Instance};
use regretlab::Error;

/// Opaque noise distribution.
pub struct RlDist(MixtureDistribution);

/// Opaque policy: either an offset rule or a binary randomized rule.
pub struct RlPolicy(Policy);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Degenerate = 5,
    Quadrature = 6,
    TooLarge = 7,
    WrongPolicyKind = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RlOffsetProfile {
    pub theta: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub side_regret_pos: f64,
    pub side_regret_neg: f64,
    pub balance_gap: f64,
    /// Worst-case regret of the threshold at `theta`.
    pub regret: f64,
    pub degenerate_pos: bool,
    pub degenerate_neg: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RlBoundReport {
    pub bound: f64,
    pub quadrature_error: f64,
    pub offset_regret: f64,
    pub ratio: f64,
    pub ratio_ok: bool,
    pub k: u64,
    pub flipped: bool,
    pub theta: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RlRegretEstimate {
    pub value: f64,
    /// Zero for exact results.
    pub std_error: f64,
    pub samples: u64,
    pub exact: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(RlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Json(_) => RlStatus::Parse,
            Error::DegenerateProfile(_) | Error::EmptyIndexSet => RlStatus::Degenerate,
            Error::QuadratureFailed { .. } => RlStatus::Quadrature,
            Error::TooManyOutcomes { .. } => RlStatus::TooLarge,
            _ => RlStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: RlStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RlStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RlStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(RlStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|e| fail(RlStatus::InvalidUtf8, e.to_string()))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(RlStatus::NullPointer, format!("null {what}")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| fail(RlStatus::NullPointer, format!("null {what}")))
}

fn offset_of(p: &RlPolicy) -> Result<&OffsetPolicy, Failure> {
    match &p.0 {
        Policy::Offset(o) => Ok(o),
        Policy::Binary(_) => Err(fail(RlStatus::WrongPolicyKind, "expected an offset policy")),
    }
}

fn binary_of(p: &RlPolicy) -> Result<&BinaryRandomizedPolicy, Failure> {
    match &p.0 {
        Policy::Binary(b) => Ok(b),
        Policy::Offset(_) => Err(fail(RlStatus::WrongPolicyKind, "expected a binary policy")),
    }
}

unsafe fn noises_arg(noises: *const *const RlDist, n: usize) -> Result<Vec<MixtureDistribution>, Failure> {
    if n == 0 {
        return Err(fail(RlStatus::InvalidArgument, "need at least one noise"));
    }
    let ptrs = std::slice::from_raw_parts(ref_arg(noises, "noise array")?, n);
    ptrs.iter().map(|&p| Ok(ref_arg(p, "noise")?.0.clone())).collect()
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn rl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Parses a distribution from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_dist_from_json(json: *const c_char, out: *mut *mut RlDist) -> RlStatus {
    guard(|| {
        let out = out_arg(out, "output")?;
        let d: MixtureDistribution = serde_json::from_str(str_arg(json)?).map_err(Error::from)?;
        *out = Box::into_raw(Box::new(RlDist(d)));
        Ok(())
    })
}

/// Slab approximation of the equal-revenue noise with parameter `c > 1`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_dist_equal_revenue(c: f64, slabs: usize, out: *mut *mut RlDist) -> RlStatus {
    guard(|| {
        let out = out_arg(out, "output")?;
        *out = Box::into_raw(Box::new(RlDist(MixtureDistribution::equal_revenue(c, slabs)?)));
        Ok(())
    })
}

/// Canonical JSON of a distribution; release it with [`rl_string_free`].
///
/// # Safety
/// `d` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_dist_to_json(d: *const RlDist, out: *mut *mut c_char) -> RlStatus {
    guard(|| {
        let d = ref_arg(d, "distribution")?;
        let out = out_arg(out, "output")?;
        let s = serde_json::to_string(&d.0).map_err(Error::from)?;
        *out = CString::new(s).map_err(|e| fail(RlStatus::InvalidArgument, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or come from this library, and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `d` must be null or come from this library, and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rl_dist_free(d: *mut RlDist) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// `Pr[a <= x]`.
///
/// # Safety
/// `d` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_dist_prob_le(d: *const RlDist, x: f64, out: *mut f64) -> RlStatus {
    guard(|| {
        *out_arg(out, "output")? = ref_arg(d, "distribution")?.0.prob_le(x);
        Ok(())
    })
}

/// # Safety
/// `d` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_dist_mean(d: *const RlDist, out: *mut f64) -> RlStatus {
    guard(|| {
        *out_arg(out, "output")? = ref_arg(d, "distribution")?.0.mean();
        Ok(())
    })
}

/// Parses `{"offset": {...}}` or `{"binary": {...}}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_policy_from_json(json: *const c_char, out: *mut *mut RlPolicy) -> RlStatus {
    guard(|| {
        let out = out_arg(out, "output")?;
        let p: Policy = serde_json::from_str(str_arg(json)?).map_err(Error::from)?;
        *out = Box::into_raw(Box::new(RlPolicy(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or come from this library, and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rl_policy_free(p: *mut RlPolicy) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `d` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_theta(d: *const RlDist, out: *mut RlOffsetProfile) -> RlStatus {
    guard(|| {
        let p = theta(&ref_arg(d, "distribution")?.0);
        *out_arg(out, "output")? = RlOffsetProfile {
            theta: p.theta,
            v_plus: p.v_plus,
            v_minus: p.v_minus,
            side_regret_pos: p.side_regret_pos,
            side_regret_neg: p.side_regret_neg,
            balance_gap: p.balance_gap,
            regret: p.regret(),
            degenerate_pos: p.degenerate_pos,
            degenerate_neg: p.degenerate_neg,
        };
        Ok(())
    })
}

/// Worst-case regret of "pick iff s >= t" against a noiseless zero.
///
/// # Safety
/// `d` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_threshold_regret(d: *const RlDist, t: f64, out: *mut f64) -> RlStatus {
    guard(|| {
        *out_arg(out, "output")? = threshold_regret(&ref_arg(d, "distribution")?.0, t);
        Ok(())
    })
}

/// Regret of a binary policy at value `v`.
///
/// # Safety
/// `d` and `p` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_binary_regret(d: *const RlDist, p: *const RlPolicy, v: f64, out: *mut f64) -> RlStatus {
    guard(|| {
        let pol = binary_of(ref_arg(p, "policy")?)?;
        *out_arg(out, "output")? = binary_regret(&ref_arg(d, "distribution")?.0, pol, v);
        Ok(())
    })
}

/// Supremum over `v` of the binary regret, and a value attaining it.
///
/// # Safety
/// `d` and `p` must come from this library; the outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn rl_binary_worstcase(
    d: *const RlDist,
    p: *const RlPolicy,
    regret: *mut f64,
    worst_v: *mut f64,
) -> RlStatus {
    guard(|| {
        let pol = binary_of(ref_arg(p, "policy")?)?;
        let (r, w) = (out_arg(regret, "regret")?, out_arg(worst_v, "worst_v")?);
        let res = binary_worstcase(&ref_arg(d, "distribution")?.0, pol);
        *r = res.regret;
        *w = res.worst_v;
        Ok(())
    })
}

/// Certified lower bound on the optimal binary worst-case regret.
///
/// # Safety
/// `d` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_opt_lower_bound_binary(d: *const RlDist, out: *mut RlBoundReport) -> RlStatus {
    guard(|| {
        let out = out_arg(out, "output")?;
        let r = opt_lower_bound_binary(&ref_arg(d, "distribution")?.0, &QuadConfig::default())?;
        *out = RlBoundReport {
            bound: r.bound,
            quadrature_error: r.quadrature_error,
            offset_regret: r.offset_regret,
            ratio: r.ratio,
            ratio_ok: r.ratio_ok,
            k: r.k,
            flipped: r.flipped,
            theta: r.theta,
        };
        Ok(())
    })
}

/// Exact regret of an offset policy at `values`.
///
/// # Safety
/// `noises` and `values` must point to `n` elements; `p` must come from
/// this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_regret_exact(
    noises: *const *const RlDist,
    values: *const f64,
    n: usize,
    p: *const RlPolicy,
    out: *mut f64,
) -> RlStatus {
    guard(|| {
        let noises = noises_arg(noises, n)?;
        let values = std::slice::from_raw_parts(ref_arg(values, "values")?, n);
        let pol = offset_of(ref_arg(p, "policy")?)?;
        *out_arg(out, "output")? = regret_exact(&noises, values, pol)?;
        Ok(())
    })
}

/// Seeded Monte Carlo regret of an offset policy at `values`.
///
/// # Safety
/// `noises` and `values` must point to `n` elements; `p` must come from
/// this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_mc_regret(
    noises: *const *const RlDist,
    values: *const f64,
    n: usize,
    p: *const RlPolicy,
    samples: u64,
    seed: u64,
    out: *mut RlRegretEstimate,
) -> RlStatus {
    guard(|| {
        let noises = noises_arg(noises, n)?;
        let values = std::slice::from_raw_parts(ref_arg(values, "values")?, n).to_vec();
        let pol = offset_of(ref_arg(p, "policy")?)?;
        let out = out_arg(out, "output")?;
        let inst = Instance::new(noises, Some(values))?;
        let est = mc_regret(&inst, pol, samples, seed)?;
        *out = RlRegretEstimate {
            value: est.value,
            std_error: est.std_error,
            samples: est.samples,
            exact: est.kind == EstimateKind::Exact,
        };
        Ok(())
    })
}
