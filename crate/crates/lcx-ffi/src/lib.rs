//! C ABI for the lcx library.
//!
//! Conventions: objects are opaque handles created by `*_new`/`*_sample`
//! constructors and released by the matching `*_free`; every fallible call
//! returns an `LcxStatus` and writes results through out-pointers; the last
//! error message is kept per thread and read with `lcx_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use lcx::ekeland::MinorantInput;
use lcx::envelope::{lipschitz_lower_envelope, lipschitz_modulus, lipschitz_upper_envelope};
use lcx::error::Error;
use lcx::extremum::global_min_certificate;
use lcx::gallery::GalleryFunction;
use lcx::grid::{Grid, Norm, Point};
use lcx::jsonio::sampled_to_json;
use lcx::maximal::{maximal_minorant, MaximalOptions};
use lcx::minorant::{GridMinorant, MaximalityStatus};
use lcx::sampled::{sample, SampledFunction};
use lcx::subdiff::{calmness_modulus, check_subgradient, subdifferentiability_oracle,
    SubgradientCandidate};
use lcx::ExtReal;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcxStatus {
    Ok = 0,
    Internal = 1,
    Usage = 2,
    Domain = 3,
    Precondition = 4,
    NullPointer = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(msg).ok();
    });
}

fn status_of(err: &Error) -> LcxStatus {
    match err {
        Error::Usage(_) => LcxStatus::Usage,
        Error::Domain(_) => LcxStatus::Domain,
        Error::Precondition(_) | Error::ExtReal(_) => LcxStatus::Precondition,
        _ => LcxStatus::Internal,
    }
}

fn fail(err: Error) -> LcxStatus {
    let s = status_of(&err);
    set_error(err.to_string());
    s
}

/// Message for the most recent error on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lcx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(s) => s.as_ptr(),
        None => ptr::null(),
    })
}

/// Frees a string returned by a `*_json` call.
///
/// # Safety
/// `s` must have been returned by this library and not freed already.
#[no_mangle]
pub unsafe extern "C" fn lcx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opaque grid handle.
pub struct LcxGrid {
    inner: Grid,
}

/// Opaque sampled-function handle.
pub struct LcxFunction {
    inner: SampledFunction,
}

fn norm_from_int(norm: c_int) -> Result<Norm, Error> {
    match norm {
        1 => Ok(Norm::L1),
        2 => Ok(Norm::L2),
        0 => Ok(Norm::LInf),
        _ => Err(Error::usage("norm must be 1, 2 or 0 (for inf)")),
    }
}

macro_rules! nonnull {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(r) => r,
            None => {
                set_error("null pointer argument".into());
                return LcxStatus::NullPointer;
            }
        }
    };
}

macro_rules! out_ptr {
    ($p:expr) => {
        match unsafe { $p.as_mut() } {
            Some(r) => r,
            None => {
                set_error("null out-pointer".into());
                return LcxStatus::NullPointer;
            }
        }
    };
}

/// Creates a 1-D uniform grid. `norm` is 1, 2 or 0 (0 means the max norm).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lcx_grid_new_1d(
    lower: f64,
    upper: f64,
    nodes: usize,
    norm: c_int,
    out: *mut *mut LcxGrid,
) -> LcxStatus {
    let out = out_ptr!(out);
    let norm = match norm_from_int(norm) {
        Ok(n) => n,
        Err(e) => return fail(e),
    };
    match Grid::new_1d(lower, upper, nodes, norm) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(LcxGrid { inner: g }));
            LcxStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Creates a 2-D uniform grid.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lcx_grid_new_2d(
    lower_x: f64,
    lower_y: f64,
    upper_x: f64,
    upper_y: f64,
    nodes_x: usize,
    nodes_y: usize,
    norm: c_int,
    out: *mut *mut LcxGrid,
) -> LcxStatus {
    let out = out_ptr!(out);
    let norm = match norm_from_int(norm) {
        Ok(n) => n,
        Err(e) => return fail(e),
    };
    match Grid::new_2d([lower_x, lower_y], [upper_x, upper_y], [nodes_x, nodes_y], norm) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(LcxGrid { inner: g }));
            LcxStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `grid` must be a handle from `lcx_grid_new_*`, not freed twice.
#[no_mangle]
pub unsafe extern "C" fn lcx_grid_free(grid: *mut LcxGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of nodes of the grid.
///
/// # Safety
/// `grid` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn lcx_grid_node_count(grid: *const LcxGrid) -> usize {
    match grid.as_ref() {
        Some(g) => g.inner.node_count(),
        None => 0,
    }
}

/// Samples a gallery function (by id) on a grid.
///
/// # Safety
/// `id` must be a NUL-terminated string; `grid` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lcx_gallery_sample(
    id: *const c_char,
    grid: *const LcxGrid,
    out: *mut *mut LcxFunction,
) -> LcxStatus {
    let grid = nonnull!(grid);
    let out = out_ptr!(out);
    if id.is_null() {
        set_error("null id".into());
        return LcxStatus::NullPointer;
    }
    let id = match CStr::from_ptr(id).to_str() {
        Ok(s) => s,
        Err(_) => return fail(Error::usage("gallery id is not valid UTF-8")),
    };
    let f = match GalleryFunction::by_id(id).and_then(|f| sample(&f, &grid.inner, None)) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    *out = Box::into_raw(Box::new(LcxFunction { inner: f }));
    LcxStatus::Ok
}

/// Builds a sampled function from raw values (row-major, one per node).
/// IEEE +inf encodes +infinity; -inf and NaN are rejected.
///
/// # Safety
/// `values` must point to `len` readable doubles; `grid`, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lcx_function_from_values(
    grid: *const LcxGrid,
    values: *const f64,
    len: usize,
    out: *mut *mut LcxFunction,
) -> LcxStatus {
    let grid = nonnull!(grid);
    let out = out_ptr!(out);
    if values.is_null() {
        set_error("null values".into());
        return LcxStatus::NullPointer;
    }
    let slice = std::slice::from_raw_parts(values, len);
    let mut vals = Vec::with_capacity(len);
    for &v in slice {
        if v == f64::NEG_INFINITY {
            return fail(Error::precondition(
                "-inf values are rejected: Lipschitz-concave supports force f > -inf",
            ));
        }
        match ExtReal::new(v) {
            Ok(e) => vals.push(e),
            Err(e) => return fail(e),
        }
    }
    match SampledFunction::new(grid.inner.clone(), vals, None) {
        Ok(f) => {
            *out = Box::into_raw(Box::new(LcxFunction { inner: f }));
            LcxStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `f` must be a handle from this library, not freed twice.
#[no_mangle]
pub unsafe extern "C" fn lcx_function_free(f: *mut LcxFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Copies the node values into a caller buffer of length >= node count.
///
/// # Safety
/// `out` must point to at least node-count writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lcx_function_values(
    f: *const LcxFunction,
    out: *mut f64,
    len: usize,
) -> LcxStatus {
    let f = nonnull!(f);
    let n = f.inner.values().len();
    if out.is_null() {
        set_error("null out buffer".into());
        return LcxStatus::NullPointer;
    }
    if len < n {
        return fail(Error::usage(format!("buffer of {len} too small for {n} nodes")));
    }
    let slice = std::slice::from_raw_parts_mut(out, n);
    for (dst, v) in slice.iter_mut().zip(f.inner.values()) {
        *dst = v.to_f64();
    }
    LcxStatus::Ok
}

/// Serializes the function to its JSON wire format. Free with
/// `lcx_string_free`.
///
/// # Safety
/// `f` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lcx_function_json(
    f: *const LcxFunction,
    out: *mut *mut c_char,
) -> LcxStatus {
    let f = nonnull!(f);
    let out = out_ptr!(out);
    let text = sampled_to_json(&f.inner).to_string();
    match CString::new(text) {
        Ok(s) => {
            *out = s.into_raw();
            LcxStatus::Ok
        }
        Err(_) => fail(Error::usage("JSON contained NUL")),
    }
}

/// Greatest k-Lipschitz minorant (lower envelope) as a new function.
///
/// # Safety
/// `f` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lcx_lower_envelope(
    f: *const LcxFunction,
    k: f64,
    out: *mut *mut LcxFunction,
) -> LcxStatus {
    let f = nonnull!(f);
    let out = out_ptr!(out);
    match lipschitz_lower_envelope(&f.inner, k) {
        Ok(env) => {
            *out = Box::into_raw(Box::new(LcxFunction { inner: env }));
            LcxStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Least k-Lipschitz majorant (upper envelope) as a new function.
///
/// # Safety
/// `f` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lcx_upper_envelope(
    f: *const LcxFunction,
    k: f64,
    out: *mut *mut LcxFunction,
) -> LcxStatus {
    let f = nonnull!(f);
    let out = out_ptr!(out);
    match lipschitz_upper_envelope(&f.inner, k) {
        Ok(env) => {
            *out = Box::into_raw(Box::new(LcxFunction { inner: env }));
            LcxStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Grid Lipschitz modulus.
///
/// # Safety
/// `f` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lcx_lipschitz_modulus(
    f: *const LcxFunction,
    out: *mut f64,
) -> LcxStatus {
    let f = nonnull!(f);
    let out = out_ptr!(out);
    *out = lipschitz_modulus(&f.inner);
    LcxStatus::Ok
}

/// Calmness modulus at a node (+inf when f takes -inf somewhere).
///
/// # Safety
/// `f` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lcx_calmness_modulus(
    f: *const LcxFunction,
    node: usize,
    out: *mut f64,
) -> LcxStatus {
    let f = nonnull!(f);
    let out = out_ptr!(out);
    match calmness_modulus(&f.inner, node) {
        Ok(k) => {
            *out = k;
            LcxStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Checks the cone candidate with the given slope at a node:
/// writes 1/0 into `passes` and the worst slack into `worst_slack`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lcx_check_cone_subgradient(
    f: *const LcxFunction,
    node: usize,
    slope: f64,
    tol: f64,
    passes: *mut c_int,
    worst_slack: *mut f64,
) -> LcxStatus {
    let f = nonnull!(f);
    let passes = out_ptr!(passes);
    let worst_slack = out_ptr!(worst_slack);
    let anchor = match f.inner.value(node).as_finite() {
        Some(a) => a,
        None => return fail(Error::domain("f is not finite at the base node")),
    };
    let cand = match SubgradientCandidate::cone(slope, node, anchor) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    match check_subgradient(&f.inner, &cand, tol) {
        Ok(check) => {
            *passes = check.passes as c_int;
            *worst_slack = check.worst_slack;
            LcxStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Maximal-lifting LP from a seed (values buffer, one per node).
/// `pin` is a node index or SIZE_MAX for the unpinned variant. On success
/// writes the optimizer into `out_values` (length >= node count), the
/// objective gap over the seed into `gap`, and 1 into `seed_was_maximal`
/// when the seed could not be improved.
///
/// # Safety
/// Buffers must match the grid's node count.
#[no_mangle]
pub unsafe extern "C" fn lcx_maximal_minorant(
    f: *const LcxFunction,
    seed_values: *const f64,
    seed_len: usize,
    lipschitz_budget: f64,
    pin: usize,
    out_values: *mut f64,
    out_len: usize,
    gap: *mut f64,
    seed_was_maximal: *mut c_int,
) -> LcxStatus {
    let f = nonnull!(f);
    let gap = out_ptr!(gap);
    let seed_was_maximal = out_ptr!(seed_was_maximal);
    if seed_values.is_null() || out_values.is_null() {
        set_error("null buffer".into());
        return LcxStatus::NullPointer;
    }
    let n = f.inner.grid().node_count();
    if seed_len != n || out_len < n {
        return fail(Error::usage("buffer lengths do not match the node count"));
    }
    let seed_slice = std::slice::from_raw_parts(seed_values, n);
    let seed =
        match GridMinorant::new(f.inner.grid().clone(), seed_slice.to_vec(), lipschitz_budget) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
    let opts = MaximalOptions {
        pin: if pin == usize::MAX { None } else { Some(pin) },
        ..Default::default()
    };
    match maximal_minorant(&f.inner, &seed, lipschitz_budget, &opts) {
        Ok((out, cert)) => {
            let dst = std::slice::from_raw_parts_mut(out_values, n);
            dst.copy_from_slice(out.values());
            *gap = cert.lp_objective_gap;
            *seed_was_maximal = (cert.status == MaximalityStatus::Maximal) as c_int;
            LcxStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Ekeland refinement from a minorant given as a values buffer. Writes the
/// support point index into `x_delta` and the supporting minorant values
/// into `support_out`.
///
/// # Safety
/// Buffers must match the grid's node count.
#[no_mangle]
pub unsafe extern "C" fn lcx_ekeland_refine(
    f: *const LcxFunction,
    minorant_values: *const f64,
    minorant_len: usize,
    minorant_lipschitz: f64,
    x_bar: usize,
    epsilon: f64,
    delta: f64,
    x_delta: *mut usize,
    support_out: *mut f64,
    support_len: usize,
) -> LcxStatus {
    let f = nonnull!(f);
    let x_delta = out_ptr!(x_delta);
    if minorant_values.is_null() || support_out.is_null() {
        set_error("null buffer".into());
        return LcxStatus::NullPointer;
    }
    let n = f.inner.grid().node_count();
    if minorant_len != n || support_len < n {
        return fail(Error::usage("buffer lengths do not match the node count"));
    }
    let mv = std::slice::from_raw_parts(minorant_values, n);
    let h = match GridMinorant::new(f.inner.grid().clone(), mv.to_vec(), minorant_lipschitz) {
        Ok(h) => h,
        Err(e) => return fail(e),
    };
    let tol = lcx::maximal::default_tol_feas(&f.inner);
    match lcx::ekeland::ekeland_refine(
        &f.inner,
        MinorantInput::Grid(&h),
        x_bar,
        epsilon,
        delta,
        tol,
    ) {
        Ok(r) => {
            *x_delta = r.x_delta;
            let dst = std::slice::from_raw_parts_mut(support_out, n);
            dst.copy_from_slice(r.support.values());
            LcxStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Global-minimum certificate at a node: writes 1/0 into `holds`.
///
/// # Safety
/// `f` and `holds` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lcx_global_min_holds(
    f: *const LcxFunction,
    node: usize,
    holds: *mut c_int,
) -> LcxStatus {
    let f = nonnull!(f);
    let holds = out_ptr!(holds);
    match global_min_certificate(&f.inner, node) {
        Ok(cert) => {
            *holds = cert.holds as c_int;
            LcxStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Runs the subdifferentiability oracle for a gallery function and returns
/// the certificate as JSON. Free with `lcx_string_free`.
///
/// # Safety
/// `id` must be NUL-terminated; `grid`, `x_bar_coords` (length = grid dim)
/// and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lcx_calmness_oracle_json(
    id: *const c_char,
    grid: *const LcxGrid,
    x_bar_coords: *const f64,
    levels: usize,
    k_cap: f64,
    out: *mut *mut c_char,
) -> LcxStatus {
    let grid = nonnull!(grid);
    let out = out_ptr!(out);
    if id.is_null() || x_bar_coords.is_null() {
        set_error("null pointer argument".into());
        return LcxStatus::NullPointer;
    }
    let id = match CStr::from_ptr(id).to_str() {
        Ok(s) => s,
        Err(_) => return fail(Error::usage("gallery id is not valid UTF-8")),
    };
    let gallery = match GalleryFunction::by_id(id) {
        Ok(g) => g,
        Err(e) => return fail(e),
    };
    let coords = std::slice::from_raw_parts(x_bar_coords, grid.inner.dim());
    let x_bar = match Point::from_slice(coords) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    match subdifferentiability_oracle(&gallery, &grid.inner, &x_bar, levels, k_cap) {
        Ok(cert) => {
            let text = match serde_json::to_string(&cert) {
                Ok(t) => t,
                Err(e) => return fail(Error::Json(e)),
            };
            match CString::new(text) {
                Ok(s) => {
                    *out = s.into_raw();
                    LcxStatus::Ok
                }
                Err(_) => fail(Error::usage("JSON contained NUL")),
            }
        }
        Err(e) => fail(e),
    }
}
