//! C ABI over the correlated-bandit toolkit.
//!
//! Conventions:
//! - Handles (`cucb_model`, `cucb_policy`) are opaque; create them with the
//!   `*_new`/`*_from_*` constructors and release them with the matching
//!   `*_free`. Handles are not thread-safe; share them only with external
//!   synchronization.
//! - Every fallible call returns a `cucb_status`; `CUCB_STATUS_OK` is zero.
//!   On failure, `cucb_last_error()` returns a thread-local message valid
//!   until the next failing call on the same thread.
//! - Arm and outcome indices are zero-based.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::sync::Arc;

use cucb::analysis::{
    bound_competitive as lib_bound_competitive, bound_noncompetitive as lib_bound_noncompetitive,
    bound_worst_case as lib_bound_worst_case, lower_bound as lib_lower_bound, AnalysisError,
    BoundParams,
};
use cucb::model::{model_from_json, LatentModel, ModelError};
use cucb::policy::{build_policy, BanditPolicy, PolicyKind};
use cucb::pseudo::{build_table, classify, PseudoError, PseudoRewardTable, DEFAULT_QUANTUM};
use cucb::scenarios::{self, ScenarioError};
use cucb::sim::{run_episode as lib_run_episode, SimError};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CucbStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument was out of range (bad arm index, bad policy kind, ...).
    InvalidArgument = 2,
    /// The model could not be built or loaded.
    ModelError = 3,
    /// A reward value matched no entry of the pseudo-reward table.
    UnknownReward = 4,
    /// The model has no unique optimal arm.
    NoUniqueOptimum = 5,
    /// A bound or lower-bound construction failed.
    AnalysisError = 6,
    /// A string argument was not valid UTF-8.
    Utf8Error = 7,
}

/// Policy identifiers accepted by `cucb_policy_new` and
/// `cucb_run_episode`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CucbPolicyKind {
    Ucb1 = 0,
    Cucb = 1,
}

/// Opaque: a latent model together with its precomputed pseudo-reward
/// table.
pub struct CucbModel {
    model: LatentModel,
    table: Arc<PseudoRewardTable>,
}

/// Opaque: one policy instance (UCB1 or C-UCB) with its empirical state.
pub struct CucbPolicy {
    inner: Box<dyn BanditPolicy + Send>,
    arms: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: CucbStatus, message: impl Into<String>) -> CucbStatus {
    let message = message.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).unwrap_or_default();
    });
    status
}

fn fail_model(e: ModelError) -> CucbStatus {
    fail(CucbStatus::ModelError, e.to_string())
}

fn fail_pseudo(e: PseudoError) -> CucbStatus {
    match e {
        PseudoError::UnknownReward { .. } => fail(CucbStatus::UnknownReward, e.to_string()),
        PseudoError::NonUniqueOptimum => fail(CucbStatus::NoUniqueOptimum, e.to_string()),
    }
}

fn fail_analysis(e: AnalysisError) -> CucbStatus {
    match e {
        AnalysisError::Pseudo(inner) => fail_pseudo(inner),
        other => fail(CucbStatus::AnalysisError, other.to_string()),
    }
}

fn fail_scenario(e: ScenarioError) -> CucbStatus {
    match e {
        ScenarioError::Model(inner) => fail_model(inner),
        other => fail(CucbStatus::InvalidArgument, other.to_string()),
    }
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread; never free
/// it.
#[no_mangle]
pub extern "C" fn cucb_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cucb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, CucbStatus> {
    if ptr.is_null() {
        return Err(fail(CucbStatus::NullArgument, "string argument is null"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(CucbStatus::Utf8Error, "string argument is not valid UTF-8"))
}

fn boxed_model(model: LatentModel, quantum: f64, out: *mut *mut CucbModel) -> CucbStatus {
    let quantum = if quantum > 0.0 { quantum } else { DEFAULT_QUANTUM };
    let table = Arc::new(build_table(&model, quantum));
    let handle = Box::new(CucbModel { model, table });
    unsafe { *out = Box::into_raw(handle) };
    CucbStatus::Ok
}

/// Build a model (and its pseudo-reward table) from a JSON model
/// document. `quantum <= 0` selects the default reward-equality
/// tolerance. On success `*out` owns the handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cucb_model_from_json(
    json: *const c_char,
    quantum: f64,
    out: *mut *mut CucbModel,
) -> CucbStatus {
    if out.is_null() {
        return fail(CucbStatus::NullArgument, "out pointer is null");
    }
    let text = match read_str(json) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match model_from_json(text, None) {
        Ok(model) => boxed_model(model, quantum, out),
        Err(e) => fail_model(e),
    }
}

/// Build a built-in scenario by name (see the CLI `scenarios` listing).
/// `grid = 0` keeps the scenario's default resolution.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cucb_model_from_scenario(
    name: *const c_char,
    grid: usize,
    quantum: f64,
    out: *mut *mut CucbModel,
) -> CucbStatus {
    if out.is_null() {
        return fail(CucbStatus::NullArgument, "out pointer is null");
    }
    let name = match read_str(name) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let grid = if grid == 0 { None } else { Some(grid) };
    match scenarios::build(name, grid) {
        Ok(model) => boxed_model(model, quantum, out),
        Err(e) => fail_scenario(e),
    }
}

/// Release a model handle. Null is a no-op.
///
/// # Safety
/// `model` must be a handle from a `cucb_model_*` constructor, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn cucb_model_free(model: *mut CucbModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cucb_model_num_arms(model: *const CucbModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.num_arms())
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cucb_model_num_outcomes(model: *const CucbModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.num_outcomes())
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cucb_model_reward_span(model: *const CucbModel) -> f64 {
    model.as_ref().map_or(f64::NAN, |m| m.model.reward_span())
}

/// Mean reward of one arm.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cucb_model_mean(
    model: *const CucbModel,
    arm: usize,
    out: *mut f64,
) -> CucbStatus {
    let Some(m) = model.as_ref() else {
        return fail(CucbStatus::NullArgument, "model handle is null");
    };
    if out.is_null() {
        return fail(CucbStatus::NullArgument, "out pointer is null");
    }
    if arm >= m.model.num_arms() {
        return fail(CucbStatus::InvalidArgument, format!("arm {arm} out of range"));
    }
    *out = m.model.expected_reward(arm);
    CucbStatus::Ok
}

/// Classify every arm against the optimal arm.
///
/// Writes the optimal arm to `*k_star`; when non-null, `pseudo_gaps` (K*K
/// doubles, row-major, entry `l*K + k` holding `mu_k - phi_{l,k}`) and
/// `kinds` (K ints: 0 optimal, 1 competitive, 2 non-competitive) are
/// filled.
///
/// # Safety
/// `model` must be a live handle; `k_star` must be valid; `pseudo_gaps`
/// and `kinds`, when non-null, must point to buffers of K*K doubles and K
/// ints respectively.
#[no_mangle]
pub unsafe extern "C" fn cucb_model_classify(
    model: *const CucbModel,
    k_star: *mut usize,
    pseudo_gaps: *mut f64,
    kinds: *mut c_int,
) -> CucbStatus {
    let Some(m) = model.as_ref() else {
        return fail(CucbStatus::NullArgument, "model handle is null");
    };
    if k_star.is_null() {
        return fail(CucbStatus::NullArgument, "k_star pointer is null");
    }
    let c = match classify(&m.model, &m.table) {
        Ok(c) => c,
        Err(e) => return fail_pseudo(e),
    };
    let arms = c.num_arms();
    *k_star = c.k_star;
    if !pseudo_gaps.is_null() {
        for l in 0..arms {
            for k in 0..arms {
                *pseudo_gaps.add(l * arms + k) = c.pseudo_gaps[l][k];
            }
        }
    }
    if !kinds.is_null() {
        for k in 0..arms {
            let kind = if k == c.k_star {
                0
            } else if c.competitive.contains(&k) {
                1
            } else {
                2
            };
            *kinds.add(k) = kind;
        }
    }
    CucbStatus::Ok
}

/// Instance-dependent lower-bound rate (per log horizon): zero when no
/// arm is competitive.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cucb_model_lower_bound(
    model: *const CucbModel,
    out: *mut f64,
) -> CucbStatus {
    let Some(m) = model.as_ref() else {
        return fail(CucbStatus::NullArgument, "model handle is null");
    };
    if out.is_null() {
        return fail(CucbStatus::NullArgument, "out pointer is null");
    }
    match lib_lower_bound(&m.model, &m.table) {
        Ok(rate) => {
            *out = rate;
            CucbStatus::Ok
        }
        Err(e) => fail_analysis(e),
    }
}

fn kind_from_int(kind: c_int) -> Result<PolicyKind, CucbStatus> {
    match kind {
        0 => Ok(PolicyKind::Ucb1),
        1 => Ok(PolicyKind::Cucb),
        other => Err(fail(
            CucbStatus::InvalidArgument,
            format!("unknown policy kind {other} (0 = ucb1, 1 = cucb)"),
        )),
    }
}

/// Create a fresh policy for a model. `kind` is a `cucb_policy_kind`
/// value.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer. The policy
/// does not borrow the model; it may outlive it.
#[no_mangle]
pub unsafe extern "C" fn cucb_policy_new(
    model: *const CucbModel,
    kind: c_int,
    out: *mut *mut CucbPolicy,
) -> CucbStatus {
    let Some(m) = model.as_ref() else {
        return fail(CucbStatus::NullArgument, "model handle is null");
    };
    if out.is_null() {
        return fail(CucbStatus::NullArgument, "out pointer is null");
    }
    let kind = match kind_from_int(kind) {
        Ok(k) => k,
        Err(status) => return status,
    };
    let inner = build_policy(kind, &m.model, &m.table);
    *out = Box::into_raw(Box::new(CucbPolicy { inner, arms: m.model.num_arms() }));
    CucbStatus::Ok
}

/// Release a policy handle. Null is a no-op.
///
/// # Safety
/// `policy` must be a handle from `cucb_policy_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cucb_policy_free(policy: *mut CucbPolicy) {
    if !policy.is_null() {
        drop(Box::from_raw(policy));
    }
}

/// Arm the policy would pull this round. Selection is deterministic and
/// does not advance the state.
///
/// # Safety
/// `policy` must be a live handle and `arm` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cucb_policy_select(
    policy: *const CucbPolicy,
    arm: *mut usize,
) -> CucbStatus {
    let Some(p) = policy.as_ref() else {
        return fail(CucbStatus::NullArgument, "policy handle is null");
    };
    if arm.is_null() {
        return fail(CucbStatus::NullArgument, "arm pointer is null");
    }
    *arm = p.inner.select().chosen;
    CucbStatus::Ok
}

/// Fold an observed reward for `arm` into the policy state.
///
/// # Safety
/// `policy` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cucb_policy_update(
    policy: *mut CucbPolicy,
    arm: usize,
    reward: f64,
) -> CucbStatus {
    let Some(p) = policy.as_mut() else {
        return fail(CucbStatus::NullArgument, "policy handle is null");
    };
    if arm >= p.arms {
        return fail(CucbStatus::InvalidArgument, format!("arm {arm} out of range"));
    }
    match p.inner.observe(arm, reward) {
        Ok(()) => CucbStatus::Ok,
        Err(e) => fail_pseudo(e),
    }
}

/// Completed rounds (total pulls) of the policy.
///
/// # Safety
/// `policy` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cucb_policy_round(policy: *const CucbPolicy) -> u64 {
    policy.as_ref().map_or(0, |p| p.inner.state().round())
}

/// Pull count of one arm.
///
/// # Safety
/// `policy` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cucb_policy_pulls(
    policy: *const CucbPolicy,
    arm: usize,
    out: *mut u64,
) -> CucbStatus {
    let Some(p) = policy.as_ref() else {
        return fail(CucbStatus::NullArgument, "policy handle is null");
    };
    if out.is_null() {
        return fail(CucbStatus::NullArgument, "out pointer is null");
    }
    if arm >= p.arms {
        return fail(CucbStatus::InvalidArgument, format!("arm {arm} out of range"));
    }
    *out = p.inner.state().pulls(arm);
    CucbStatus::Ok
}

/// Run one seeded episode of `horizon` rounds and report the final
/// cumulative regret; when `pulls` is non-null it receives the per-arm
/// pull counts (K entries). Same seed, same result.
///
/// # Safety
/// `model` must be a live handle, `final_regret` valid, and `pulls`
/// either null or a buffer of K `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn cucb_run_episode(
    model: *const CucbModel,
    kind: c_int,
    horizon: u64,
    seed: u64,
    final_regret: *mut f64,
    pulls: *mut u64,
) -> CucbStatus {
    let Some(m) = model.as_ref() else {
        return fail(CucbStatus::NullArgument, "model handle is null");
    };
    if final_regret.is_null() {
        return fail(CucbStatus::NullArgument, "final_regret pointer is null");
    }
    if horizon == 0 {
        return fail(CucbStatus::InvalidArgument, "horizon must be at least 1");
    }
    let kind = match kind_from_int(kind) {
        Ok(k) => k,
        Err(status) => return status,
    };
    let mut policy = build_policy(kind, &m.model, &m.table);
    match lib_run_episode(&m.model, policy.as_mut(), horizon, horizon, seed) {
        Ok(trace) => {
            *final_regret = trace.final_regret();
            if !pulls.is_null() {
                for (k, &n) in trace.pulls.last().unwrap().iter().enumerate() {
                    *pulls.add(k) = n;
                }
            }
            CucbStatus::Ok
        }
        Err(SimError::Policy(e)) => fail_pseudo(e),
        Err(e) => fail(CucbStatus::InvalidArgument, e.to_string()),
    }
}

/// Upper bound on the expected pulls of a non-competitive arm with `arms`
/// arms, threshold round `t0`, and horizon `horizon`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cucb_bound_noncompetitive(
    arms: usize,
    horizon: u64,
    t0: f64,
    out: *mut f64,
) -> CucbStatus {
    if out.is_null() {
        return fail(CucbStatus::NullArgument, "out pointer is null");
    }
    if arms == 0 || !t0.is_finite() || t0 <= 0.0 {
        return fail(CucbStatus::InvalidArgument, "arms must be >= 1 and t0 > 0");
    }
    let params = BoundParams {
        arms,
        horizon,
        t0,
        delta: vec![0.0; arms],
        delta_min: f64::INFINITY,
        pseudo_gap_star: vec![0.0; arms],
    };
    *out = lib_bound_noncompetitive(&params);
    CucbStatus::Ok
}

/// Upper bound on the expected pulls of a competitive arm with gap
/// `delta`, minimum gap `delta_min`, `arms` arms, and horizon `horizon`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cucb_bound_competitive(
    arms: usize,
    horizon: u64,
    delta: f64,
    delta_min: f64,
    out: *mut f64,
) -> CucbStatus {
    if out.is_null() {
        return fail(CucbStatus::NullArgument, "out pointer is null");
    }
    if arms == 0 {
        return fail(CucbStatus::InvalidArgument, "arms must be >= 1");
    }
    let params = BoundParams {
        arms,
        horizon,
        t0: 1.0,
        delta: vec![delta],
        delta_min,
        pseudo_gap_star: vec![0.0],
    };
    match lib_bound_competitive(&params, 0) {
        Ok(v) => {
            *out = v;
            CucbStatus::Ok
        }
        Err(e) => fail_analysis(e),
    }
}

/// Worst-case expected-regret bound `3K sqrt(K T ln T) + 3K beta
/// sqrt(T ln T / K)`.
#[no_mangle]
pub extern "C" fn cucb_bound_worst_case(arms: usize, horizon: f64, beta: f64) -> f64 {
    lib_bound_worst_case(arms, horizon, beta)
}
