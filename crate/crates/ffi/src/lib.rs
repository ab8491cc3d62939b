//! C ABI over `bellmart`.
//!
//! Every fallible call returns a [`BellmartStatus`]; on failure the message
//! is available from [`bellmart_last_error_message`] on the same thread.
//! Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bellmart::bellman::{
    eval_bellman, eval_closed_p3_plus, solve_pogorelov_minus, solve_pogorelov_plus, Branch,
};
use bellmart::constants::least_positive_root;
use bellmart::martingale::{
    estimate_norm, inequality_experiment, simulate, Construction, MartingaleSpec, PathEnsemble,
    Which,
};
use bellmart::{ConjugatePair, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellmartStatus {
    Ok = 0,
    Domain = 1,
    NoConvergence = 2,
    NoRoot = 3,
    NoBracket = 4,
    BranchDegenerate = 5,
    Precondition = 6,
    Construction = 7,
    Config = 8,
    Usage = 9,
    Io = 10,
    NullPointer = 11,
    Panic = 12,
}

impl From<&Error> for BellmartStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => BellmartStatus::Domain,
            Error::NoConvergence { .. } => BellmartStatus::NoConvergence,
            Error::NoRootInUnitInterval { .. } => BellmartStatus::NoRoot,
            Error::NoBracket(_) => BellmartStatus::NoBracket,
            Error::BranchDegenerate(_) => BellmartStatus::BranchDegenerate,
            Error::Precondition(_) => BellmartStatus::Precondition,
            Error::Construction { .. } => BellmartStatus::Construction,
            Error::Config(_) => BellmartStatus::Config,
            Error::Usage(_) => BellmartStatus::Usage,
            Error::Io(_) => BellmartStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn bellmart_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |c| c.as_ptr())
    })
}

fn guard<F>(f: F) -> BellmartStatus
where
    F: FnOnce() -> Result<(), BellmartStatus>,
{
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BellmartStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("panic inside bellmart".into());
            BellmartStatus::Panic
        }
    }
}

fn fail(e: Error) -> BellmartStatus {
    let status = BellmartStatus::from(&e);
    set_last_error(e.to_string());
    status
}

fn null(what: &str) -> BellmartStatus {
    set_last_error(format!("{what} is NULL"));
    BellmartStatus::NullPointer
}

/// Writes `value` through `out`.
///
/// # Safety
/// `out` must be NULL or valid for writes.
unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), BellmartStatus> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Opaque conjugate exponent pair.
pub struct BellmartPair(ConjugatePair);

/// Opaque simulated path ensemble.
pub struct BellmartEnsemble(PathEnsemble);

/// Creates a pair from `p >= 2`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bellmart_pair_from_p(
    p: f64,
    out: *mut *mut BellmartPair,
) -> BellmartStatus {
    guard(|| {
        let pair = ConjugatePair::from_p(p).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(BellmartPair(pair))), "out")
    })
}

/// Creates a pair from `1 < q <= 2`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bellmart_pair_from_q(
    q: f64,
    out: *mut *mut BellmartPair,
) -> BellmartStatus {
    guard(|| {
        let pair = ConjugatePair::from_q(q).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(BellmartPair(pair))), "out")
    })
}

/// # Safety
/// `pair` must be a live handle; NULL yields NaN.
#[no_mangle]
pub unsafe extern "C" fn bellmart_pair_p(pair: *const BellmartPair) -> f64 {
    pair.as_ref().map_or(f64::NAN, |h| h.0.p())
}

/// # Safety
/// `pair` must be a live handle; NULL yields NaN.
#[no_mangle]
pub unsafe extern "C" fn bellmart_pair_q(pair: *const BellmartPair) -> f64 {
    pair.as_ref().map_or(f64::NAN, |h| h.0.q())
}

/// # Safety
/// `pair` must come from `bellmart_pair_from_*` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bellmart_pair_free(pair: *mut BellmartPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellmartLaguerreRoot {
    pub z: f64,
    pub c_left: f64,
    pub c_right: f64,
}

/// Least root of `L_p` in `(0, 1)` and the two constants built from it.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bellmart_least_positive_root(
    p: f64,
    out: *mut BellmartLaguerreRoot,
) -> BellmartStatus {
    guard(|| {
        let sol = least_positive_root(p).map_err(fail)?;
        write_out(
            out,
            BellmartLaguerreRoot {
                z: sol.z_p,
                c_left: sol.c_left,
                c_right: sol.c_right,
            },
            "out",
        )
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellmartPoint {
    pub u: f64,
    pub v: f64,
    pub t: f64,
    pub value: f64,
    pub b_u: f64,
    pub b_v: f64,
    pub b_uu: f64,
    pub b_uv_plus1: f64,
    pub b_vv: f64,
    pub tau: f64,
}

/// Plus-branch Bellman function with derivatives at `(|u|, |v|)`.
///
/// # Safety
/// `pair` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bellmart_eval_bellman(
    pair: *const BellmartPair,
    u: f64,
    v: f64,
    out: *mut BellmartPoint,
) -> BellmartStatus {
    guard(|| {
        let pair = pair.as_ref().ok_or_else(|| null("pair"))?;
        let pt = eval_bellman(pair.0, u, v).map_err(fail)?;
        write_out(
            out,
            BellmartPoint {
                u: pt.u,
                v: pt.v,
                t: pt.t,
                value: pt.value,
                b_u: pt.b_u,
                b_v: pt.b_v,
                b_uu: pt.b_uu,
                b_uv_plus1: pt.b_uv_plus1,
                b_vv: pt.b_vv,
                tau: pt.tau,
            },
            "out",
        )
    })
}

/// `(2/9)((u² + 3|v|)^(3/2) + |u|³)`.
#[no_mangle]
pub extern "C" fn bellmart_closed_p3_plus(u: f64, v: f64) -> f64 {
    eval_closed_p3_plus(u, v)
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellmartPogorelov {
    /// 0 for the plus branch, 1 for the minus branch.
    pub branch: i32,
    pub c1: f64,
    pub c2: f64,
    pub gamma: f64,
    pub delta: f64,
    pub a: f64,
    pub b: f64,
    /// NaN on the plus branch.
    pub improvement_c: f64,
    pub max_residual: f64,
}

/// Solves the boundary system on the plus (`minus == 0`) or minus branch.
///
/// # Safety
/// `pair` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bellmart_solve_pogorelov(
    pair: *const BellmartPair,
    minus: i32,
    out: *mut BellmartPogorelov,
) -> BellmartStatus {
    guard(|| {
        let pair = pair.as_ref().ok_or_else(|| null("pair"))?;
        let sol = if minus != 0 {
            solve_pogorelov_minus(pair.0).map_err(fail)?
        } else {
            solve_pogorelov_plus(pair.0)
        };
        write_out(
            out,
            BellmartPogorelov {
                branch: i32::from(sol.branch == Branch::Minus),
                c1: sol.c1,
                c2: sol.c2,
                gamma: sol.gamma,
                delta: sol.delta,
                a: sol.a,
                b: sol.b,
                improvement_c: sol.improvement_c.unwrap_or(f64::NAN),
                max_residual: sol.max_residual(),
            },
            "out",
        )
    })
}

/// # Safety
/// `name` must be NULL or a valid nul-terminated string.
unsafe fn construction(name: *const c_char) -> Result<Construction, BellmartStatus> {
    if name.is_null() {
        return Err(null("construction"));
    }
    let s = CStr::from_ptr(name)
        .to_str()
        .map_err(|_| fail(Error::Usage("construction name is not UTF-8".into())))?;
    s.parse().map_err(fail)
}

/// Simulates `paths` paths of the named construction (`identity`,
/// `rotation`, `sign-switch`, `az-derived`).
///
/// # Safety
/// `name` must be a valid C string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bellmart_simulate(
    name: *const c_char,
    steps: usize,
    dt: f64,
    seed: u64,
    paths: usize,
    out: *mut *mut BellmartEnsemble,
) -> BellmartStatus {
    guard(|| {
        let spec = MartingaleSpec {
            steps,
            dt,
            construction: construction(name)?,
            seed,
            paths,
        };
        let ensemble = simulate(&spec).map_err(fail)?;
        write_out(
            out,
            Box::into_raw(Box::new(BellmartEnsemble(ensemble))),
            "out",
        )
    })
}

/// Number of paths, 0 for NULL.
///
/// # Safety
/// `ensemble` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bellmart_ensemble_len(ensemble: *const BellmartEnsemble) -> usize {
    ensemble.as_ref().map_or(0, |e| e.0.paths.len())
}

/// Terminal value of path `index`: `which == 0` selects `Z`, otherwise `W`.
///
/// # Safety
/// `ensemble` must be a live handle and `out` valid for two doubles.
#[no_mangle]
pub unsafe extern "C" fn bellmart_ensemble_terminal(
    ensemble: *const BellmartEnsemble,
    index: usize,
    which: i32,
    out: *mut f64,
) -> BellmartStatus {
    guard(|| {
        let e = ensemble.as_ref().ok_or_else(|| null("ensemble"))?;
        let path = e.0.paths.get(index).ok_or_else(|| {
            fail(Error::Usage(format!(
                "path index {index} out of range for {} paths",
                e.0.paths.len()
            )))
        })?;
        let x = if which == 0 { path.z } else { path.w };
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(x[0]);
        out.add(1).write(x[1]);
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellmartNormEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// `(E|X_T|^p)^(1/p)` for `X = Z` (`which == 0`) or `W`.
///
/// # Safety
/// `ensemble` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bellmart_ensemble_norm(
    ensemble: *const BellmartEnsemble,
    which: i32,
    p: f64,
    out: *mut BellmartNormEstimate,
) -> BellmartStatus {
    guard(|| {
        let e = ensemble.as_ref().ok_or_else(|| null("ensemble"))?;
        let which = if which == 0 { Which::Z } else { Which::W };
        let n = estimate_norm(&e.0, which, p).map_err(fail)?;
        write_out(
            out,
            BellmartNormEstimate {
                estimate: n.estimate,
                std_error: n.std_error,
            },
            "out",
        )
    })
}

/// # Safety
/// `ensemble` must come from `bellmart_simulate` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bellmart_ensemble_free(ensemble: *mut BellmartEnsemble) {
    if !ensemble.is_null() {
        drop(Box::from_raw(ensemble));
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellmartExperiment {
    pub ratio: f64,
    pub bound: f64,
    pub margin: f64,
    pub std_error: f64,
    /// 1 if the bound holds within three standard errors.
    pub passes: i32,
}

/// `‖Z‖_q / ‖W‖_q` for the named construction with per-step hypothesis checks.
///
/// # Safety
/// `name` must be a valid C string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bellmart_inequality_experiment(
    q: f64,
    name: *const c_char,
    steps: usize,
    dt: f64,
    seed: u64,
    paths: usize,
    out: *mut BellmartExperiment,
) -> BellmartStatus {
    guard(|| {
        let spec = MartingaleSpec {
            steps,
            dt,
            construction: construction(name)?,
            seed,
            paths,
        };
        let r = inequality_experiment(q, &spec).map_err(fail)?;
        write_out(
            out,
            BellmartExperiment {
                ratio: r.ratio,
                bound: r.bound,
                margin: r.margin,
                std_error: r.std_error,
                passes: i32::from(r.passes()),
            },
            "out",
        )
    })
}
