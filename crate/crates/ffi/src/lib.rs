//! C ABI over the archetype library.
//!
//! Points cross the boundary as contiguous `double` arrays with one point
//! per row (`n × dim`, row-major). Every function returns an
//! [`ArchetypeStatus`]; on failure a description is available from
//! [`archetype_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use archetype::geometry::{d2_infty, hausdorff, PointSet};
use archetype::oracle::sector_integral;
use archetype::simplex::project_simplex;
use archetype::solver::{fit, AaProblem, Caratheodory, FitReport, Init, SolverConfig};
use archetype::{Error, Matrix};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchetypeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    NonFinite = 4,
    SolverAbort = 5,
    NoConvergence = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Solver settings. Obtain defaults from [`archetype_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchetypeOptions {
    pub alpha: f64,
    /// Outer stopping threshold on the squared change of the archetypes.
    pub tol: f64,
    /// Flow time of the inner solver.
    pub tau: f64,
    pub max_iters: u64,
    pub seed: u64,
    /// Extreme-point preprocessing: 0 automatic, 1 on, 2 off.
    pub caratheodory: i32,
}

/// Result of a fit. Opaque; release with [`archetype_fit_free`].
pub struct ArchetypeFit {
    report: FitReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ArchetypeStatus {
    match e {
        Error::Dimension(_) => ArchetypeStatus::Dimension,
        Error::NonFinite(_) => ArchetypeStatus::NonFinite,
        Error::SolverAbort(_) => ArchetypeStatus::SolverAbort,
        Error::NoConvergence { .. } => ArchetypeStatus::NoConvergence,
        _ => ArchetypeStatus::InvalidArgument,
    }
}

struct Failure(ArchetypeStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ArchetypeStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ArchetypeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ArchetypeStatus::Ok
        }
        Ok(Err(Failure(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal panic: {msg}"));
            ArchetypeStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or point to `len` readable doubles.
unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn checked_len(a: usize, b: usize) -> Result<usize, Failure> {
    a.checked_mul(b)
        .ok_or_else(|| Failure(ArchetypeStatus::InvalidArgument, "array size overflows".into()))
}

/// # Safety
/// `points` must point to `n * dim` readable doubles.
unsafe fn point_matrix(points: *const f64, n: usize, dim: usize, what: &str) -> Result<Matrix, Failure> {
    let data = slice(points, checked_len(n, dim)?, what)?;
    Ok(Matrix::new(dim, n, data.to_vec())?)
}

#[no_mangle]
pub extern "C" fn archetype_options_default() -> ArchetypeOptions {
    let d = SolverConfig::default();
    ArchetypeOptions {
        alpha: 0.0,
        tol: d.tol,
        tau: d.pgd.tau,
        max_iters: d.max_iters as u64,
        seed: d.seed,
        caratheodory: 0,
    }
}

fn solver_config(o: &ArchetypeOptions, init: Init) -> Result<SolverConfig, Failure> {
    let caratheodory = match o.caratheodory {
        0 => Caratheodory::Auto,
        1 => Caratheodory::On,
        2 => Caratheodory::Off,
        v => return Err(Failure(ArchetypeStatus::InvalidArgument, format!("caratheodory must be 0, 1 or 2, got {v}"))),
    };
    let mut cfg = SolverConfig {
        tol: o.tol,
        max_iters: usize::try_from(o.max_iters).unwrap_or(usize::MAX),
        seed: o.seed,
        init,
        caratheodory,
        ..SolverConfig::default()
    };
    cfg.pgd.tau = o.tau;
    Ok(cfg)
}

/// Fits `k` archetypes to `n` points of dimension `dim`.
///
/// `init` is null for random data-point initialization, or `k × dim`
/// starting archetypes. `options` may be null for defaults. On success
/// `*out` receives a new handle.
///
/// # Safety
/// `points` must hold `n * dim` doubles, `init` (when non-null) `k * dim`
/// doubles, `options` must be null or valid, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn archetype_fit(
    points: *const f64,
    n: usize,
    dim: usize,
    k: usize,
    init: *const f64,
    options: *const ArchetypeOptions,
    out: *mut *mut ArchetypeFit,
) -> ArchetypeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let x = point_matrix(points, n, dim, "points")?;
        let opts = if options.is_null() { archetype_options_default() } else { *options };
        let init = if init.is_null() {
            Init::RandomDataPoints
        } else {
            Init::Archetypes(point_matrix(init, k, dim, "init")?)
        };
        let cfg = solver_config(&opts, init)?;
        let report = fit(&AaProblem::new(x, k, opts.alpha)?, &cfg)?;
        *out = Box::into_raw(Box::new(ArchetypeFit { report }));
        Ok(())
    })
}

/// # Safety
/// `fit` must be null or a handle from [`archetype_fit`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn archetype_fit_free(fit: *mut ArchetypeFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// # Safety
/// `fit` must be a live handle or null.
unsafe fn handle<'a>(fit: *const ArchetypeFit) -> Result<&'a ArchetypeFit, Failure> {
    fit.as_ref().ok_or_else(|| null("fit"))
}

/// # Safety
/// `dst` must hold `len` writable doubles.
unsafe fn copy_out(src: &[f64], dst: *mut f64, len: usize) -> Result<(), Failure> {
    if len < src.len() {
        return Err(Failure(
            ArchetypeStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    if src.is_empty() {
        return Ok(());
    }
    if dst.is_null() {
        return Err(null("output buffer"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

/// Writes `k`, the dimension, the iteration count, the trace length and
/// the convergence flag; any pointer may be null.
///
/// # Safety
/// `fit` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn archetype_fit_info(
    fit: *const ArchetypeFit,
    k: *mut usize,
    dim: *mut usize,
    iterations: *mut usize,
    trace_len: *mut usize,
    converged: *mut bool,
) -> ArchetypeStatus {
    guard(|| {
        let r = &handle(fit)?.report;
        let z = r.archetypes();
        for (p, v) in [(k, z.cols()), (dim, z.rows()), (iterations, r.iterations), (trace_len, r.objective_trace.len())] {
            if !p.is_null() {
                *p = v;
            }
        }
        if !converged.is_null() {
            *converged = r.converged;
        }
        Ok(())
    })
}

/// Final objective value.
///
/// # Safety
/// `fit` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn archetype_fit_objective(fit: *const ArchetypeFit, out: *mut f64) -> ArchetypeStatus {
    guard(|| {
        let f = handle(fit)?.report.final_objective();
        out.as_mut().map(|o| *o = f).ok_or_else(|| null("out"))
    })
}

/// Copies the archetypes, one per row (`k × dim`).
///
/// # Safety
/// `fit` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn archetype_fit_archetypes(fit: *const ArchetypeFit, out: *mut f64, len: usize) -> ArchetypeStatus {
    guard(|| copy_out(handle(fit)?.report.archetypes().data(), out, len))
}

/// Copies the objective after initialization and after each iteration.
///
/// # Safety
/// `fit` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn archetype_fit_trace(fit: *const ArchetypeFit, out: *mut f64, len: usize) -> ArchetypeStatus {
    guard(|| copy_out(&handle(fit)?.report.objective_trace, out, len))
}

/// Euclidean projection of `v` onto the probability simplex.
///
/// # Safety
/// `v` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn archetype_project_simplex(v: *const f64, len: usize, out: *mut f64) -> ArchetypeStatus {
    guard(|| {
        let w = project_simplex(slice(v, len, "v")?)?;
        copy_out(w.as_slice(), out, len)
    })
}

/// Bottleneck matching distance between two sets of `k` points.
///
/// # Safety
/// `a` and `b` must each hold `k * dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn archetype_d2_infty(a: *const f64, b: *const f64, k: usize, dim: usize, out: *mut f64) -> ArchetypeStatus {
    guard(|| {
        let pa = PointSet::new(point_matrix(a, k, dim, "a")?)?;
        let pb = PointSet::new(point_matrix(b, k, dim, "b")?)?;
        let d = d2_infty(&pa, &pb)?;
        out.as_mut().map(|o| *o = d).ok_or_else(|| null("out"))
    })
}

/// Hausdorff distance between `na` and `nb` points.
///
/// # Safety
/// `a` must hold `na * dim` doubles, `b` `nb * dim`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn archetype_hausdorff(
    a: *const f64,
    na: usize,
    b: *const f64,
    nb: usize,
    dim: usize,
    out: *mut f64,
) -> ArchetypeStatus {
    guard(|| {
        let pa = PointSet::new(point_matrix(a, na, dim, "a")?)?;
        let pb = PointSet::new(point_matrix(b, nb, dim, "b")?)?;
        let d = hausdorff(&pa, &pb)?;
        out.as_mut().map(|o| *o = d).ok_or_else(|| null("out"))
    })
}

/// Disk-sector integral `I(alpha)` for `alpha` in `[0, pi]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn archetype_sector_integral(alpha: f64, out: *mut f64) -> ArchetypeStatus {
    guard(|| {
        let v = sector_integral(alpha)?;
        out.as_mut().map(|o| *o = v).ok_or_else(|| null("out"))
    })
}

/// Message for the last failed call on this thread; empty after a
/// success. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn archetype_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn archetype_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
