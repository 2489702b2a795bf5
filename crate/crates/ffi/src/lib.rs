//! C ABI for `riccati_kyp`.
//!
//! Systems and solution sets are opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! an [`RkStatus`]; its numeric values equal the library error codes, and
//! the message of the most recent failure on the calling thread is available
//! through [`rk_last_error_message`].
//!
//! Complex matrices cross the boundary as row-major arrays of interleaved
//! `(re, im)` doubles, so an `r x c` matrix occupies `2 r c` doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use riccati_kyp::analysis::{circle_profile, uniqueness_certificate, UniquenessReason, UniquenessVerdict};
use riccati_kyp::cli::{run, Command, RunConfig, SystemDocument};
use riccati_kyp::linalg::c;
use riccati_kyp::riccati::{equality_gap, membership};
use riccati_kyp::solver::{maximal_solution, minimal_solution, re_set, SolutionSet, SolverConfig};
use riccati_kyp::sysmodel::{is_minimal, is_passive, transfer_eval};
use riccati_kyp::{CMatrix, Error, HermitianOperator, StorageOperator, SystemRealization, Tolerances};

/// Result codes. `Ok` is zero; the remaining values match the library's
/// error codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RkStatus {
    Ok = 0,
    NullPointer = 1,
    DimensionMismatch = 2,
    InvalidArgument = 3,
    NotHermitian = 4,
    NonFinite = 5,
    NotPsd = 6,
    NotPd = 7,
    NotNonneg = 8,
    RangeViolation = 9,
    SingularResolvent = 10,
    PoleOnCircle = 11,
    DeltaNotPsd = 12,
    C3Violation = 13,
    InconsistentRoutes = 14,
    NotInRi = 15,
    NotScalar = 16,
    NoConvergence = 17,
    DeltaSingularPath = 18,
    IterationDiverged = 19,
    CertificateFailed = 20,
    NotMinimal = 21,
    TooLarge = 22,
    Parse = 23,
    Io = 24,
    Panic = 99,
}

impl From<&Error> for RkStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch(_) => RkStatus::DimensionMismatch,
            Error::InvalidArgument(_) => RkStatus::InvalidArgument,
            Error::NotHermitian { .. } => RkStatus::NotHermitian,
            Error::NonFinite(_) => RkStatus::NonFinite,
            Error::NotPsd { .. } => RkStatus::NotPsd,
            Error::NotPd { .. } => RkStatus::NotPd,
            Error::NotNonneg { .. } => RkStatus::NotNonneg,
            Error::RangeViolation { .. } => RkStatus::RangeViolation,
            Error::SingularResolvent { .. } => RkStatus::SingularResolvent,
            Error::PoleOnCircle { .. } => RkStatus::PoleOnCircle,
            Error::DeltaNotPsd { .. } => RkStatus::DeltaNotPsd,
            Error::C3Violation { .. } => RkStatus::C3Violation,
            Error::InconsistentRoutes { .. } => RkStatus::InconsistentRoutes,
            Error::NotInRi => RkStatus::NotInRi,
            Error::NotScalar => RkStatus::NotScalar,
            Error::NoConvergence { .. } => RkStatus::NoConvergence,
            Error::DeltaSingularPath => RkStatus::DeltaSingularPath,
            Error::IterationDiverged { .. } => RkStatus::IterationDiverged,
            Error::CertificateFailed(_) => RkStatus::CertificateFailed,
            Error::NotMinimal => RkStatus::NotMinimal,
            Error::TooLarge { .. } => RkStatus::TooLarge,
            Error::Parse { .. } => RkStatus::Parse,
            Error::Io(_) => RkStatus::Io,
        }
    }
}

/// Opaque system handle.
pub struct RkSystem {
    inner: SystemRealization,
}

/// Opaque handle to a set of Riccati-equality solutions.
pub struct RkSolutionSet {
    inner: SolutionSet,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct RkMembership {
    pub in_ri: bool,
    pub in_re: bool,
    pub in_ri_circ: bool,
    /// Set when the two membership routes disagreed inside the boundary band.
    pub boundary_disagreement: bool,
    pub delta_min_eig: f64,
    pub lmi_min_eig: f64,
    /// NaN when the surplus is undefined.
    pub equality_residual: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RkUniqueness {
    Unknown = 0,
    SingletonInner = 1,
    SingletonCoInner = 2,
    SingletonScalarModulusOne = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(e: Error) -> RkStatus {
    let status = RkStatus::from(&e);
    set_last_error(e.to_string());
    status
}

fn null_pointer(what: &str) -> RkStatus {
    set_last_error(format!("null pointer: {what}"));
    RkStatus::NullPointer
}

fn guard(f: impl FnOnce() -> RkStatus) -> RkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_last_error("internal panic".into());
            RkStatus::Panic
        }
    }
}

unsafe fn read_matrix(data: *const f64, rows: usize, cols: usize, what: &str) -> Result<CMatrix, RkStatus> {
    if data.is_null() {
        return Err(null_pointer(what));
    }
    let s = std::slice::from_raw_parts(data, 2 * rows * cols);
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        let k = 2 * (i * cols + j);
        c(s[k], s[k + 1])
    }))
}

unsafe fn write_matrix(m: &CMatrix, out: *mut f64) {
    let cols = m.ncols();
    let s = std::slice::from_raw_parts_mut(out, 2 * m.nrows() * cols);
    for i in 0..m.nrows() {
        for j in 0..cols {
            let k = 2 * (i * cols + j);
            s[k] = m[(i, j)].re;
            s[k + 1] = m[(i, j)].im;
        }
    }
}

fn tolerances(tol: f64) -> Tolerances {
    if tol > 0.0 && tol.is_finite() {
        Tolerances::scaled(tol)
    } else {
        Tolerances::default()
    }
}

fn solver_config(tol: f64, seed: u64) -> SolverConfig {
    SolverConfig { seed, tolerances: tolerances(tol), ..SolverConfig::default() }
}

unsafe fn storage(sys: &RkSystem, h: *const f64, tols: &Tolerances) -> Result<StorageOperator, RkStatus> {
    let n = sys.inner.n();
    let m = read_matrix(h, n, n, "h")?;
    let op = HermitianOperator::new(m).map_err(fail)?;
    StorageOperator::with_tolerance(op, tols.pd_tol).map_err(fail)
}

/// Message of the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates a system from interleaved row-major matrices `A (n x n)`,
/// `B (n x m)`, `C (p x n)` and `D (p x m)`.
///
/// # Safety
/// Each matrix pointer must reference `2 * rows * cols` readable doubles and
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rk_system_new(
    n: usize,
    m: usize,
    p: usize,
    a: *const f64,
    b: *const f64,
    c_mat: *const f64,
    d: *const f64,
    out: *mut *mut RkSystem,
) -> RkStatus {
    guard(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        *out = ptr::null_mut();
        let build = || -> Result<SystemRealization, RkStatus> {
            let a = read_matrix(a, n, n, "a")?;
            let b = read_matrix(b, n, m, "b")?;
            let c_mat = read_matrix(c_mat, p, n, "c")?;
            let d = read_matrix(d, p, m, "d")?;
            SystemRealization::new(a, b, c_mat, d).map_err(fail)
        };
        match build() {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(RkSystem { inner }));
                RkStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Creates a system from a JSON system document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rk_system_from_json(json: *const c_char, out: *mut *mut RkSystem) -> RkStatus {
    guard(|| {
        if json.is_null() {
            return null_pointer("json");
        }
        if out.is_null() {
            return null_pointer("out");
        }
        *out = ptr::null_mut();
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(e) => return fail(Error::InvalidArgument(format!("json is not UTF-8: {e}"))),
        };
        match SystemDocument::from_json(text).and_then(|d| d.realization()) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(RkSystem { inner }));
                RkStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `sys` must be NULL or a handle from `rk_system_new`/`rk_system_from_json`
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn rk_system_free(sys: *mut RkSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// # Safety
/// `sys` must be a live handle; the output pointers may be NULL.
#[no_mangle]
pub unsafe extern "C" fn rk_system_dims(sys: *const RkSystem, n: *mut usize, m: *mut usize, p: *mut usize) -> RkStatus {
    let Some(sys) = sys.as_ref() else { return null_pointer("sys") };
    for (ptr, v) in [(n, sys.inner.n()), (m, sys.inner.m()), (p, sys.inner.p())] {
        if !ptr.is_null() {
            *ptr = v;
        }
    }
    RkStatus::Ok
}

/// Evaluates the transfer function at `lambda = re + i im` into
/// `out` (`2 p m` doubles).
///
/// # Safety
/// `sys` must be a live handle and `out` must have room for `2 p m` doubles.
#[no_mangle]
pub unsafe extern "C" fn rk_transfer_eval(sys: *const RkSystem, re: f64, im: f64, out: *mut f64) -> RkStatus {
    guard(|| {
        let Some(sys) = sys.as_ref() else { return null_pointer("sys") };
        if out.is_null() {
            return null_pointer("out");
        }
        match transfer_eval(&sys.inner, c(re, im)) {
            Ok(s) => {
                write_matrix(&s.value, out);
                RkStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `sys` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rk_is_passive(sys: *const RkSystem, tol: f64, out: *mut bool) -> RkStatus {
    let Some(sys) = sys.as_ref() else { return null_pointer("sys") };
    if out.is_null() {
        return null_pointer("out");
    }
    *out = is_passive(&sys.inner, tolerances(tol).tol).passive;
    RkStatus::Ok
}

/// # Safety
/// `sys` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rk_is_minimal(sys: *const RkSystem, tol: f64, out: *mut bool) -> RkStatus {
    let Some(sys) = sys.as_ref() else { return null_pointer("sys") };
    if out.is_null() {
        return null_pointer("out");
    }
    *out = is_minimal(&sys.inner, tolerances(tol).minimal_tol).minimal;
    RkStatus::Ok
}

/// Membership of the `n x n` candidate `h` in RI, RE and RI°. A
/// non-positive `tol` selects the library defaults.
///
/// # Safety
/// `sys` must be a live handle, `h` must reference `2 n n` doubles and
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rk_membership(
    sys: *const RkSystem,
    h: *const f64,
    tol: f64,
    out: *mut RkMembership,
) -> RkStatus {
    guard(|| {
        let Some(sys) = sys.as_ref() else { return null_pointer("sys") };
        if out.is_null() {
            return null_pointer("out");
        }
        let tols = tolerances(tol);
        let h = match storage(sys, h, &tols) {
            Ok(h) => h,
            Err(s) => return s,
        };
        match membership(&sys.inner, &h, &tols) {
            Ok(v) => {
                *out = RkMembership {
                    in_ri: v.in_ri,
                    in_re: v.in_re,
                    in_ri_circ: v.in_ri_circ,
                    boundary_disagreement: v.diagnostics.boundary_disagreement,
                    delta_min_eig: v.diagnostics.delta_min_eig,
                    lmi_min_eig: v.diagnostics.lmi_min_eig,
                    equality_residual: v.diagnostics.equality_residual.unwrap_or(f64::NAN),
                };
                RkStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Norm of the Schur complement of `I - M(sigma_H)* M(sigma_H)`; zero
/// exactly on RE.
///
/// # Safety
/// As for [`rk_membership`].
#[no_mangle]
pub unsafe extern "C" fn rk_equality_gap(sys: *const RkSystem, h: *const f64, tol: f64, out: *mut f64) -> RkStatus {
    guard(|| {
        let Some(sys) = sys.as_ref() else { return null_pointer("sys") };
        if out.is_null() {
            return null_pointer("out");
        }
        let tols = tolerances(tol);
        let h = match storage(sys, h, &tols) {
            Ok(h) => h,
            Err(s) => return s,
        };
        match equality_gap(&sys.inner, &h, &tols) {
            Ok(g) => {
                *out = g;
                RkStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

unsafe fn extremal(
    sys: *const RkSystem,
    tol: f64,
    seed: u64,
    out: *mut f64,
    f: fn(&SystemRealization, &SolverConfig) -> riccati_kyp::Result<riccati_kyp::solver::ExtremalSolution>,
) -> RkStatus {
    guard(|| {
        let Some(sys) = sys.as_ref() else { return null_pointer("sys") };
        if out.is_null() {
            return null_pointer("out");
        }
        match f(&sys.inner, &solver_config(tol, seed)) {
            Ok(s) => {
                write_matrix(s.storage.matrix(), out);
                RkStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Minimal element of RI°, written to `out` (`2 n n` doubles).
///
/// # Safety
/// `sys` must be a live handle and `out` must have room for `2 n n` doubles.
#[no_mangle]
pub unsafe extern "C" fn rk_minimal_solution(sys: *const RkSystem, tol: f64, seed: u64, out: *mut f64) -> RkStatus {
    extremal(sys, tol, seed, out, minimal_solution)
}

/// Maximal element of RI°, written to `out` (`2 n n` doubles).
///
/// # Safety
/// As for [`rk_minimal_solution`].
#[no_mangle]
pub unsafe extern "C" fn rk_maximal_solution(sys: *const RkSystem, tol: f64, seed: u64, out: *mut f64) -> RkStatus {
    extremal(sys, tol, seed, out, maximal_solution)
}

/// Solutions of the Riccati equality (closed form for scalar systems,
/// multi-start search otherwise).
///
/// # Safety
/// `sys` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rk_solve_re(sys: *const RkSystem, tol: f64, seed: u64, out: *mut *mut RkSolutionSet) -> RkStatus {
    guard(|| {
        let Some(sys) = sys.as_ref() else { return null_pointer("sys") };
        if out.is_null() {
            return null_pointer("out");
        }
        *out = ptr::null_mut();
        match re_set(&sys.inner, &solver_config(tol, seed)) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(RkSolutionSet { inner }));
                RkStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `set` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rk_solution_set_len(set: *const RkSolutionSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.len())
}

/// Copies member `index` into `out` (`2 n n` doubles).
///
/// # Safety
/// `set` must be a live handle and `out` must have room for `2 n n` doubles.
#[no_mangle]
pub unsafe extern "C" fn rk_solution_set_get(set: *const RkSolutionSet, index: usize, out: *mut f64) -> RkStatus {
    let Some(set) = set.as_ref() else { return null_pointer("set") };
    if out.is_null() {
        return null_pointer("out");
    }
    match set.inner.members.get(index) {
        Some(h) => {
            write_matrix(h.matrix(), out);
            RkStatus::Ok
        }
        None => fail(Error::InvalidArgument(format!("index {index} out of range ({} members)", set.inner.len()))),
    }
}

/// Index of the member below (`maximal == false`) or above all others, or
/// -1 when there is none.
///
/// # Safety
/// `set` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rk_solution_set_extreme_index(set: *const RkSolutionSet, maximal: bool) -> isize {
    let Some(set) = set.as_ref() else { return -1 };
    let idx = if maximal { set.inner.maximal_index } else { set.inner.minimal_index };
    idx.map_or(-1, |i| i as isize)
}

/// # Safety
/// `set` must be NULL or a handle from [`rk_solve_re`] that has not been
/// freed.
#[no_mangle]
pub unsafe extern "C" fn rk_solution_set_free(set: *mut RkSolutionSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Singleton certificate for RI° from a circle grid of `grid_steps` points.
///
/// # Safety
/// `sys` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rk_uniqueness_certificate(
    sys: *const RkSystem,
    grid_steps: usize,
    tol: f64,
    out: *mut RkUniqueness,
) -> RkStatus {
    guard(|| {
        let Some(sys) = sys.as_ref() else { return null_pointer("sys") };
        if out.is_null() {
            return null_pointer("out");
        }
        let cfg = solver_config(tol, 0);
        let cert = circle_profile(&sys.inner, grid_steps)
            .and_then(|p| uniqueness_certificate(&sys.inner, &p, cfg.tolerances.tol, &cfg));
        match cert {
            Ok(cert) => {
                *out = match (cert.verdict, cert.reason) {
                    (UniquenessVerdict::Unknown, _) | (_, UniquenessReason::None) => RkUniqueness::Unknown,
                    (_, UniquenessReason::InnerFr0) => RkUniqueness::SingletonInner,
                    (_, UniquenessReason::CoInnerFl0) => RkUniqueness::SingletonCoInner,
                    (_, UniquenessReason::ScalarModulusOne) => RkUniqueness::SingletonScalarModulusOne,
                };
                RkStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Full JSON report (the CLI `report` command without timings). The string
/// is written to `out` and must be released with [`rk_string_free`].
///
/// # Safety
/// `sys` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rk_report_json(sys: *const RkSystem, seed: u64, out: *mut *mut c_char) -> RkStatus {
    guard(|| {
        let Some(sys) = sys.as_ref() else { return null_pointer("sys") };
        if out.is_null() {
            return null_pointer("out");
        }
        *out = ptr::null_mut();
        let doc = SystemDocument::from_system("", &sys.inner);
        let config = RunConfig { timings: false, ..RunConfig::default() }.with_seed(seed);
        let report = run(Command::Report, &doc, None, &config);
        match CString::new(report.to_json()) {
            Ok(s) => {
                *out = s.into_raw();
                RkStatus::Ok
            }
            Err(e) => fail(Error::InvalidArgument(e.to_string())),
        }
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_codes_match_library_codes() {
        use riccati_kyp::linalg::re;
        let all = [
            Error::DimensionMismatch(String::new()),
            Error::InvalidArgument(String::new()),
            Error::NotHermitian { asymmetry: 0.0, threshold: 0.0 },
            Error::NonFinite(String::new()),
            Error::NotPsd { min_eig: 0.0, threshold: 0.0 },
            Error::NotPd { min_eig: 0.0 },
            Error::NotNonneg { min_eig: 0.0 },
            Error::RangeViolation { residual: 0.0 },
            Error::SingularResolvent { lambda: re(0.0) },
            Error::PoleOnCircle { angle: 0.0 },
            Error::DeltaNotPsd { min_eig: 0.0 },
            Error::C3Violation { residual: 0.0 },
            Error::InconsistentRoutes { detail: String::new() },
            Error::NotInRi,
            Error::NotScalar,
            Error::NoConvergence { best_residual: 0.0 },
            Error::DeltaSingularPath,
            Error::IterationDiverged { iterations: 0 },
            Error::CertificateFailed(String::new()),
            Error::NotMinimal,
            Error::TooLarge { n: 0, max: 0 },
            Error::Parse { line: 0, column: 0, message: String::new() },
            Error::Io(String::new()),
        ];
        assert_eq!(all.len(), Error::CODES.len());
        for e in &all {
            assert_eq!(RkStatus::from(e) as i32, e.code(), "{e:?}");
        }
    }
}
