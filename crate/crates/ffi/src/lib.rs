//! C ABI over `stochord`.
//!
//! Every fallible function returns a [`StochordStatus`] and writes its result
//! through an out-pointer. The message of the last failure on the calling
//! thread is available from [`stochord_last_error_message`]. Models and
//! systems are opaque heap handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stochord::certify::{self, Grid, GridPolicy, Order, Tolerance};
use stochord::majorization::{self, MajorizationKind, ParamMatrix, TTransform};
use stochord::{Error, GompertzMakeham, Lifetime, LifetimeModel, Structure, SystemSpec, WeibullG};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StochordStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Domain = 3,
    Convergence = 4,
    NotFound = 5,
    Panic = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StochordQuantity {
    Cdf = 0,
    Sf = 1,
    Pdf = 2,
    Hazard = 3,
    ReversedHazard = 4,
    LogSf = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StochordStructure {
    Series = 0,
    Parallel = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StochordOrder {
    St = 0,
    Hr = 1,
    Rh = 2,
    Lr = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StochordMajorization {
    Plain = 0,
    WeakSub = 1,
    WeakSuper = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StochordGridPolicy {
    LogSpaced = 0,
    Linear = 1,
}

/// Grid and tolerance for a certification. `x_max <= 0` picks the point
/// where both survival functions drop below 1e-6.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StochordCertifyOptions {
    pub grid_count: usize,
    pub policy: StochordGridPolicy,
    pub x_max: f64,
    pub tol_abs: f64,
    pub tol_rel: f64,
}

/// `witness_x` is NaN when the order holds.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StochordVerdict {
    pub holds: bool,
    pub margin: f64,
    pub tolerance: f64,
    pub witness_x: f64,
    pub points_checked: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub truncated: bool,
}

/// Opaque component lifetime model.
pub struct StochordModel(LifetimeModel);

/// Opaque series or parallel system.
pub struct StochordSystem(SystemSpec);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> StochordStatus {
    match err {
        Error::InvalidParameter(_) | Error::Usage(_) | Error::Config(_) => {
            StochordStatus::InvalidParameter
        }
        Error::Domain(_) => StochordStatus::Domain,
        Error::Convergence { .. } => StochordStatus::Convergence,
        _ => StochordStatus::Internal,
    }
}

struct Fail(StochordStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(StochordStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> StochordStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => StochordStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            StochordStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn matrix(top: *const f64, bottom: *const f64, n: usize) -> Result<ParamMatrix, Fail> {
    let top = slice(top, n, "top")?.to_vec();
    let bottom = slice(bottom, n, "bottom")?.to_vec();
    Ok(ParamMatrix::new(top, bottom)?)
}

fn evaluate(f: &dyn Lifetime, q: StochordQuantity, x: f64) -> Result<f64, Fail> {
    Ok(match q {
        StochordQuantity::Cdf => f.cdf(x),
        StochordQuantity::Sf => f.sf(x),
        StochordQuantity::Pdf => f.pdf(x),
        StochordQuantity::Hazard => f.hazard(x),
        StochordQuantity::ReversedHazard => f.reversed_hazard(x)?,
        StochordQuantity::LogSf => f.log_sf(x),
    })
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn stochord_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Weibull-G model with an exponential baseline.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn stochord_wg_exponential_new(
    alpha: f64,
    beta: f64,
    gamma: f64,
    out_model: *mut *mut StochordModel,
) -> StochordStatus {
    guard(|| {
        let slot = out(out_model, "out_model")?;
        let m = WeibullG::exponential(alpha, beta, gamma)?;
        *slot = Box::into_raw(Box::new(StochordModel(m.into())));
        Ok(())
    })
}

/// Gompertz-Makeham model with hazard `lambda + alpha * exp(beta * x)`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn stochord_gm_new(
    alpha: f64,
    beta: f64,
    lambda: f64,
    out_model: *mut *mut StochordModel,
) -> StochordStatus {
    guard(|| {
        let slot = out(out_model, "out_model")?;
        let m = GompertzMakeham::new(alpha, beta, lambda)?;
        *slot = Box::into_raw(Box::new(StochordModel(m.into())));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stochord_model_free(model: *mut StochordModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stochord_model_eval(
    model: *const StochordModel,
    quantity: StochordQuantity,
    x: f64,
    out_value: *mut f64,
) -> StochordStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let slot = out(out_value, "out_value")?;
        *slot = evaluate(&m.0, quantity, x)?;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stochord_model_quantile(
    model: *const StochordModel,
    u: f64,
    out_value: *mut f64,
) -> StochordStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let slot = out(out_value, "out_value")?;
        *slot = m.0.quantile(u)?;
        Ok(())
    })
}

/// Builds a system from copies of `n` component handles; the inputs stay
/// owned by the caller.
///
/// # Safety
/// `models` must point to `n` live handles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stochord_system_new(
    models: *const *const StochordModel,
    n: usize,
    structure: StochordStructure,
    out_system: *mut *mut StochordSystem,
) -> StochordStatus {
    guard(|| {
        let slot = out(out_system, "out_system")?;
        if models.is_null() && n > 0 {
            return Err(null("models"));
        }
        let handles = if n == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(models, n)
        };
        let components = handles
            .iter()
            .map(|&h| {
                h.as_ref()
                    .map(|m| m.0.clone())
                    .ok_or_else(|| null("component"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let structure = match structure {
            StochordStructure::Series => Structure::Series,
            StochordStructure::Parallel => Structure::Parallel,
        };
        *slot = Box::into_raw(Box::new(StochordSystem(SystemSpec::new(
            components, structure,
        )?)));
        Ok(())
    })
}

/// # Safety
/// `system` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stochord_system_free(system: *mut StochordSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// # Safety
/// `system` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stochord_system_eval(
    system: *const StochordSystem,
    quantity: StochordQuantity,
    x: f64,
    out_value: *mut f64,
) -> StochordStatus {
    guard(|| {
        let s = system.as_ref().ok_or_else(|| null("system"))?;
        let slot = out(out_value, "out_value")?;
        *slot = evaluate(&s.0, quantity, x)?;
        Ok(())
    })
}

/// Defaults: 2048 log-spaced points, automatic `x_max`, abs 1e-9, rel 1e-7.
#[no_mangle]
pub extern "C" fn stochord_certify_options_default() -> StochordCertifyOptions {
    let tol = Tolerance::default();
    StochordCertifyOptions {
        grid_count: certify::DEFAULT_GRID_COUNT,
        policy: StochordGridPolicy::LogSpaced,
        x_max: 0.0,
        tol_abs: tol.abs,
        tol_rel: tol.rel,
    }
}

/// Certifies `lhs <=_order rhs` on a grid.
///
/// # Safety
/// `lhs` and `rhs` must be live handles, `options` null or readable, and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stochord_certify(
    order: StochordOrder,
    lhs: *const StochordSystem,
    rhs: *const StochordSystem,
    options: *const StochordCertifyOptions,
    out_verdict: *mut StochordVerdict,
) -> StochordStatus {
    guard(|| {
        let f = lhs.as_ref().ok_or_else(|| null("lhs"))?;
        let g = rhs.as_ref().ok_or_else(|| null("rhs"))?;
        let slot = out(out_verdict, "out_verdict")?;
        let opts = options
            .as_ref()
            .copied()
            .unwrap_or_else(|| stochord_certify_options_default());
        let policy = match opts.policy {
            StochordGridPolicy::LogSpaced => GridPolicy::LogSpaced,
            StochordGridPolicy::Linear => GridPolicy::Linear,
        };
        let x_max = (opts.x_max > 0.0).then_some(opts.x_max);
        let grid = Grid::for_pair(&f.0, &g.0, opts.grid_count, policy, x_max)?;
        let order = match order {
            StochordOrder::St => Order::St,
            StochordOrder::Hr => Order::Hr,
            StochordOrder::Rh => Order::Rh,
            StochordOrder::Lr => Order::Lr,
        };
        let tol = Tolerance {
            abs: opts.tol_abs,
            rel: opts.tol_rel,
        };
        let v = certify::certify(order, &f.0, &g.0, &grid, tol);
        *slot = StochordVerdict {
            holds: v.holds,
            margin: v.margin,
            tolerance: v.tolerance,
            witness_x: v.witness_x.unwrap_or(f64::NAN),
            points_checked: v.points_checked,
            x_min: grid.x_min(),
            x_max: grid.x_max(),
            truncated: v.truncated,
        };
        Ok(())
    })
}

/// Decides `a ≺ b` (or a weak form) for vectors of length `n`.
///
/// # Safety
/// `a` and `b` must point to `n` readable doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn stochord_majorize_check(
    a: *const f64,
    b: *const f64,
    n: usize,
    kind: StochordMajorization,
    out_result: *mut bool,
) -> StochordStatus {
    guard(|| {
        let a = slice(a, n, "a")?;
        let b = slice(b, n, "b")?;
        let slot = out(out_result, "out_result")?;
        let kind = match kind {
            StochordMajorization::Plain => MajorizationKind::Plain,
            StochordMajorization::WeakSub => MajorizationKind::WeakSub,
            StochordMajorization::WeakSuper => MajorizationKind::WeakSuper,
        };
        *slot = majorization::majorize_check(a, b, kind)?;
        Ok(())
    })
}

/// Whether every pair of columns of the 2×n matrix is similarly ordered.
///
/// # Safety
/// `top` and `bottom` must point to `n` readable doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn stochord_pn_membership(
    top: *const f64,
    bottom: *const f64,
    n: usize,
    out_result: *mut bool,
) -> StochordStatus {
    guard(|| {
        let m = matrix(top, bottom, n)?;
        *out(out_result, "out_result")? = majorization::pn_membership(&m);
        Ok(())
    })
}

/// Right-multiplies the 2×n matrix by the T-transform mixing columns `i`
/// and `j` with weight `lambda`. Outputs may alias the inputs.
///
/// # Safety
/// All four arrays must hold `n` doubles; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn stochord_apply_t_transform(
    top: *const f64,
    bottom: *const f64,
    n: usize,
    lambda: f64,
    i: usize,
    j: usize,
    out_top: *mut f64,
    out_bottom: *mut f64,
) -> StochordStatus {
    guard(|| {
        let m = matrix(top, bottom, n)?;
        if out_top.is_null() || out_bottom.is_null() {
            return Err(null("output row"));
        }
        let r = majorization::apply_t_transform(&m, &TTransform::new(lambda, i, j)?)?;
        ptr::copy_nonoverlapping(r.row(0).as_ptr(), out_top, n);
        ptr::copy_nonoverlapping(r.row(1).as_ptr(), out_bottom, n);
        Ok(())
    })
}

/// Finds `lambda` with `b = a·T_lambda` for 2×2 matrices given row-major.
/// Returns `NotFound` when no such weight exists.
///
/// # Safety
/// `a` and `b` must point to 4 readable doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn stochord_chain_solve_2x2(
    a: *const f64,
    b: *const f64,
    out_lambda: *mut f64,
) -> StochordStatus {
    guard(|| {
        let a = slice(a, 4, "a")?;
        let b = slice(b, 4, "b")?;
        let slot = out(out_lambda, "out_lambda")?;
        let ma = ParamMatrix::from_rows([[a[0], a[1]], [a[2], a[3]]])?;
        let mb = ParamMatrix::from_rows([[b[0], b[1]], [b[2], b[3]]])?;
        match majorization::chain_majorize_solve_2x2(&ma, &mb) {
            Some(l) => {
                *slot = l;
                Ok(())
            }
            None => Err(Fail(
                StochordStatus::NotFound,
                "no T-transform maps a to b".into(),
            )),
        }
    })
}

/// Auxiliary function that is non-positive on `x > 0`.
#[no_mangle]
pub extern "C" fn stochord_h1(x: f64) -> f64 {
    certify::h1(x)
}

/// Auxiliary function that is non-negative on `x > 0`.
#[no_mangle]
pub extern "C" fn stochord_h2(x: f64) -> f64 {
    certify::h2(x)
}
