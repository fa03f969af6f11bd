//! C ABI for `ness-core`.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Every fallible call returns a [`NessStatus`];
//! on failure, [`ness_last_error`] describes the problem. State indices are
//! 0-based, as in the Rust API.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ness_core::cycles::CycleCatalog;
use ness_core::decomposition::{decompose_default, CycleDecomposition};
use ness_core::markov::MarkovProcess;
use ness_core::observables::{entropy_production, EvaluationPoint};
use ness_core::tasep::{build_tasep, TasepConfig};
use ness_core::NessError;

/// Result codes. Values 2 to 5 match the exit codes of the `ness` binary.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NessStatus {
    Ok = 0,
    NullPointer = 1,
    Parse = 2,
    Validation = 3,
    ResourceCap = 4,
    Numeric = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// A finite Markov process.
pub struct NessProcess {
    inner: MarkovProcess,
}

/// A weighted cycle decomposition of a steady-state flux field.
pub struct NessDecomposition {
    inner: CycleDecomposition,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: NessError) -> NessStatus {
    let status = match e.exit_code() {
        2 => NessStatus::Parse,
        3 => NessStatus::Validation,
        4 => NessStatus::ResourceCap,
        _ => NessStatus::Numeric,
    };
    set_error(e.to_string());
    status
}

fn null(what: &str) -> NessStatus {
    set_error(format!("null pointer: {what}"));
    NessStatus::NullPointer
}

fn guard(f: impl FnOnce() -> NessStatus) -> NessStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic".into());
            NessStatus::Panic
        }
    }
}

fn boxed<T>(v: T, out: *mut *mut T) -> NessStatus {
    // SAFETY: callers check `out` for null before calling.
    unsafe { *out = Box::into_raw(Box::new(v)) };
    NessStatus::Ok
}

fn valid(p: MarkovProcess) -> Result<MarkovProcess, NessError> {
    let v = p.validate();
    if v.is_empty() {
        Ok(p)
    } else {
        Err(NessError::InvalidProcess(
            v.into_iter().map(|v| v.message).collect(),
        ))
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ness_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a JSON model (1-based indices in the file) and validates it.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ness_process_from_json(
    json: *const c_char,
    out: *mut *mut NessProcess,
) -> NessStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return null("json/out");
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(e) => return fail(NessError::Parse(format!("input is not UTF-8: {e}"))),
        };
        match MarkovProcess::from_json_str(text).and_then(valid) {
            Ok(p) => boxed(NessProcess { inner: p }, out),
            Err(e) => fail(e),
        }
    })
}

/// Builds a continuous-time process from `n_edges` triples
/// `(from[k], to[k], rates[k])` with 0-based states.
///
/// # Safety
/// `from`, `to` and `rates` must each point to `n_edges` elements.
#[no_mangle]
pub unsafe extern "C" fn ness_process_new_continuous(
    n_states: usize,
    from: *const usize,
    to: *const usize,
    rates: *const f64,
    n_edges: usize,
    out: *mut *mut NessProcess,
) -> NessStatus {
    guard(|| {
        if out.is_null() || (n_edges > 0 && (from.is_null() || to.is_null() || rates.is_null())) {
            return null("edge arrays/out");
        }
        let edges: Vec<(usize, usize, f64)> = (0..n_edges)
            .map(|k| (*from.add(k), *to.add(k), *rates.add(k)))
            .collect();
        match MarkovProcess::continuous(n_states, edges).and_then(valid) {
            Ok(p) => boxed(NessProcess { inner: p }, out),
            Err(e) => fail(e),
        }
    })
}

/// The 2-particle, 4-site ring with boundary rate `x`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ness_process_tasep(x: f64, out: *mut *mut NessProcess) -> NessStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match TasepConfig::new(x) {
            Ok(c) => boxed(
                NessProcess {
                    inner: build_tasep(c),
                },
                out,
            ),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `p` must come from a `ness_process_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ness_process_free(p: *mut NessProcess) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of states, or 0 for NULL.
///
/// # Safety
/// `p` must be NULL or a live process handle.
#[no_mangle]
pub unsafe extern "C" fn ness_process_n_states(p: *const NessProcess) -> usize {
    p.as_ref().map_or(0, |p| p.inner.n_states())
}

/// Writes the steady state into `out[0..len]`; `len` must be at least the
/// number of states.
///
/// # Safety
/// `p` must be a live handle and `out` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ness_stationary_distribution(
    p: *const NessProcess,
    out: *mut f64,
    len: usize,
) -> NessStatus {
    guard(|| {
        let Some(p) = p.as_ref() else {
            return null("process");
        };
        if out.is_null() {
            return null("out");
        }
        let n = p.inner.n_states();
        if len < n {
            set_error(format!("buffer holds {len} values, need {n}"));
            return NessStatus::BufferTooSmall;
        }
        match p.inner.stationary_distribution() {
            Ok(d) => {
                ptr::copy_nonoverlapping(d.as_slice().as_ptr(), out, n);
                NessStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Writes the steady flux matrix row-major into `out[0..len]`
/// (`out[i*n + j]` is the flux from i to j); `len` must be at least n².
///
/// # Safety
/// `p` must be a live handle and `out` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ness_steady_fluxes(
    p: *const NessProcess,
    out: *mut f64,
    len: usize,
) -> NessStatus {
    guard(|| {
        let Some(p) = p.as_ref() else {
            return null("process");
        };
        if out.is_null() {
            return null("out");
        }
        let n = p.inner.n_states();
        if len < n * n {
            set_error(format!("buffer holds {len} values, need {}", n * n));
            return NessStatus::BufferTooSmall;
        }
        match p.inner.steady_fluxes() {
            Ok(f) => {
                for i in 0..n {
                    for j in 0..n {
                        *out.add(i * n + j) = if i == j {
                            f.loops().map_or(0.0, |l| l[i])
                        } else {
                            f.get(i, j)
                        };
                    }
                }
                NessStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Steady-state entropy production and its system and medium parts.
/// Fails with `Validation` when a transition with current has no reverse.
///
/// # Safety
/// `p` must be a live handle; the outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ness_entropy_production(
    p: *const NessProcess,
    total: *mut f64,
    system: *mut f64,
    medium: *mut f64,
) -> NessStatus {
    guard(|| {
        let Some(p) = p.as_ref() else {
            return null("process");
        };
        if total.is_null() || system.is_null() || medium.is_null() {
            return null("outputs");
        }
        match entropy_production(&p.inner, &EvaluationPoint::Steady) {
            Ok(ep) => {
                *total = ep.total;
                *system = ep.system;
                *medium = ep.medium;
                NessStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Decomposes the steady flux field with the default cycle ordering.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ness_decompose_default(
    p: *const NessProcess,
    out: *mut *mut NessDecomposition,
) -> NessStatus {
    guard(|| {
        let Some(p) = p.as_ref() else {
            return null("process");
        };
        if out.is_null() {
            return null("out");
        }
        let result = p.inner.steady_fluxes().and_then(|f| {
            let catalog = CycleCatalog::enumerate(&p.inner.graph())?;
            decompose_default(&f, &catalog)
        });
        match result {
            Ok(d) => boxed(NessDecomposition { inner: d }, out),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `d` must come from `ness_decompose_default` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ness_decomposition_free(d: *mut NessDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of cycles in processing order, zero weights included.
///
/// # Safety
/// `d` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ness_decomposition_len(d: *const NessDecomposition) -> usize {
    d.as_ref().map_or(0, |d| d.inner.entries().len())
}

unsafe fn entry<'a>(
    d: *const NessDecomposition,
    k: usize,
) -> Result<&'a ness_core::decomposition::WeightedCycle, NessStatus> {
    let d = d.as_ref().ok_or_else(|| null("decomposition"))?;
    d.inner.entries().get(k).ok_or_else(|| {
        fail(NessError::InvalidArgument(format!(
            "entry {k} out of range for {} cycles",
            d.inner.entries().len()
        )))
    })
}

/// Weight of entry `k`.
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ness_decomposition_weight(
    d: *const NessDecomposition,
    k: usize,
    out: *mut f64,
) -> NessStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match entry(d, k) {
            Ok(e) => {
                *out = e.weight;
                NessStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Number of states on the cycle of entry `k`.
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ness_decomposition_cycle_len(
    d: *const NessDecomposition,
    k: usize,
    out: *mut usize,
) -> NessStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match entry(d, k) {
            Ok(e) => {
                *out = e.cycle.len();
                NessStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Writes the 0-based states of the cycle of entry `k` (smallest state
/// first) into `out[0..len]`.
///
/// # Safety
/// `d` must be a live handle and `out` point to `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn ness_decomposition_cycle(
    d: *const NessDecomposition,
    k: usize,
    out: *mut usize,
    len: usize,
) -> NessStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match entry(d, k) {
            Ok(e) => {
                let v = e.cycle.vertices();
                if len < v.len() {
                    set_error(format!("buffer holds {len} states, need {}", v.len()));
                    return NessStatus::BufferTooSmall;
                }
                ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
                NessStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// JSON export (1-based cycles). Release the string with `ness_string_free`.
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ness_decomposition_to_json(
    d: *const NessDecomposition,
    out: *mut *mut c_char,
) -> NessStatus {
    guard(|| {
        let Some(d) = d.as_ref() else {
            return null("decomposition");
        };
        if out.is_null() {
            return null("out");
        }
        let s = CString::new(d.inner.to_json().to_string()).expect("json has no nul");
        *out = s.into_raw();
        NessStatus::Ok
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ness_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
