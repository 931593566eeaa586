//! C ABI over the `jumpdet` library.
//!
//! Conventions:
//!
//! * Every function returns a [`JdStatus`]; results go through out-pointers
//!   that are written only on success.
//! * Parameters and Monte Carlo samples live behind opaque handles created
//!   by `*_new` and released by the matching `*_free`. Passing null to a
//!   `*_free` function is allowed and does nothing.
//! * Panics never cross the boundary: they are caught and reported as
//!   [`JdStatus::Panic`].
//! * The message of the last failure on the calling thread is available
//!   from [`jd_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use jumpdet::fredholm::{nystrom_det, quotient_det, KernelSpec};
use jumpdet::linalg::LogDet;
use jumpdet::rmt::{CountingSample, Ensemble, EnsembleConfig};
use jumpdet::special::log_barnes_g;
use jumpdet::symbols::JumpParams;
use jumpdet::toeplitz_hankel::{det_th, th_asymptotic, theorem_constant};
use jumpdet::Error;
use num_complex::Complex64;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JdStatus {
    Ok = 0,
    InvalidArgument = 1,
    Domain = 2,
    Singular = 3,
    Dimension = 4,
    NullPointer = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JdComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for JdComplex {
    fn from(z: Complex64) -> Self {
        JdComplex { re: z.re, im: z.im }
    }
}

impl From<JdComplex> for Complex64 {
    fn from(z: JdComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// A determinant `exp(log_magnitude + i·phase)`; `log_magnitude = -inf`
/// for a singular matrix.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JdLogDet {
    pub log_magnitude: f64,
    pub phase: f64,
}

impl From<LogDet> for JdLogDet {
    fn from(d: LogDet) -> Self {
        JdLogDet {
            log_magnitude: d.log_magnitude,
            phase: d.phase,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JdNystrom {
    pub logdet: JdLogDet,
    pub node_count: usize,
    pub refinement_gap: f64,
    pub converged: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JdQuotient {
    pub value: JdComplex,
    pub node_count: usize,
    pub refinement_gap: f64,
    pub smallest_pivot: f64,
    pub converged: bool,
}

/// Opaque jump parameter `α`.
pub struct JdParams(JumpParams);

/// Opaque set of scaled Laguerre counts on `(0, R)`.
pub struct JdCounting(CountingSample);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> JdStatus {
    match e {
        Error::InvalidArgument(_) => JdStatus::InvalidArgument,
        Error::Domain(_) => JdStatus::Domain,
        Error::Singular { .. } => JdStatus::Singular,
        Error::Dimension(_) => JdStatus::Dimension,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> JdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => JdStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            JdStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            JdStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or valid for reads of `T`.
unsafe fn read<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

/// # Safety
/// `p` must be null or valid for writes of `T`.
unsafe fn write<T>(p: *mut T, what: &'static str, v: T) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    p.write(v);
    Ok(())
}

/// Static, NUL-terminated name of a status.
#[no_mangle]
pub extern "C" fn jd_status_name(status: JdStatus) -> *const c_char {
    let s: &'static CStr = match status {
        JdStatus::Ok => c"ok",
        JdStatus::InvalidArgument => c"invalid argument",
        JdStatus::Domain => c"domain error",
        JdStatus::Singular => c"singular matrix",
        JdStatus::Dimension => c"dimension mismatch",
        JdStatus::NullPointer => c"null pointer",
        JdStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for writes of `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn jd_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates parameters for `α = re + i·im`; requires `|Re α| < 1/2`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn jd_params_new(re: f64, im: f64, out: *mut *mut JdParams) -> JdStatus {
    guard(|| {
        let p = JumpParams::new(Complex64::new(re, im))?;
        write(out, "out", Box::into_raw(Box::new(JdParams(p))))
    })
}

/// # Safety
/// `p` must be null or a handle from `jd_params_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jd_params_free(p: *mut JdParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// `det(T_n + H_n)` for the two-jump symbol.
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jd_det_th(p: *const JdParams, n: usize, out: *mut JdLogDet) -> JdStatus {
    guard(|| {
        let p = read(p, "params")?;
        write(out, "out", det_th(n, &p.0)?.into())
    })
}

/// `n^{-3α²}·2^{4α²}G(1-2α)G(1+2α)`; `degenerate` is set when a Barnes
/// factor vanishes.
///
/// # Safety
/// `p` must be a live handle and both out-pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jd_th_asymptotic(
    p: *const JdParams,
    n: usize,
    out: *mut JdComplex,
    degenerate: *mut bool,
) -> JdStatus {
    guard(|| {
        let p = read(p, "params")?;
        let a = th_asymptotic(n, &p.0)?;
        if degenerate.is_null() {
            return Err(Failure::Null("degenerate"));
        }
        write(out, "out", a.value.into())?;
        write(degenerate, "degenerate", a.degenerate)
    })
}

/// `2^{4α²}G(1-2α)G(1+2α)`.
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jd_theorem_constant(p: *const JdParams, out: *mut JdComplex) -> JdStatus {
    guard(|| {
        let p = read(p, "params")?;
        write(out, "out", theorem_constant(&p.0).into())
    })
}

/// Barnes `G(z)`; a domain error at the zeros `z = 0, -1, -2, …`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jd_barnes_g(z: JdComplex, out: *mut JdComplex) -> JdStatus {
    guard(|| write(out, "out", log_barnes_g(z.into())?.exp().into()))
}

/// Nyström `det(I + K)` for the even-sine kernel on `(0, R)`, refined until
/// the relative change is below `tol`.
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jd_nystrom_even_sine(
    p: *const JdParams,
    big_r: f64,
    tol: f64,
    out: *mut JdNystrom,
) -> JdStatus {
    guard(|| {
        let p = read(p, "params")?;
        let r = nystrom_det(&KernelSpec::even_sine(big_r, p.0)?, tol)?;
        write(
            out,
            "out",
            JdNystrom {
                logdet: r.logdet.into(),
                node_count: r.node_count,
                refinement_gap: r.refinement_gap,
                converged: r.converged,
            },
        )
    })
}

/// `e^{-2iαR}·det((I + K_R^0)(I + H_n^0)^{-1})` on shared tanh-sinh nodes.
///
/// # Safety
/// `p` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jd_quotient(
    p: *const JdParams,
    big_r: f64,
    n: u32,
    tol: f64,
    out: *mut JdQuotient,
) -> JdStatus {
    guard(|| {
        let p = read(p, "params")?;
        let q = quotient_det(big_r, n, &p.0, tol)?;
        write(
            out,
            "out",
            JdQuotient {
                value: q.value.into(),
                node_count: q.node_count,
                refinement_gap: q.refinement_gap,
                smallest_pivot: q.smallest_pivot,
                converged: q.converged,
            },
        )
    })
}

/// Samples `samples` Laguerre matrices of size `n` with parameter `a` and
/// records the count of hard-edge scaled eigenvalues in `(0, R)`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn jd_counting_new(
    a: f64,
    n: usize,
    samples: usize,
    seed: u64,
    big_r: f64,
    out: *mut *mut JdCounting,
) -> JdStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let cfg = EnsembleConfig::new(Ensemble::Lue { a }, n, samples, seed)?;
        let counts = jumpdet::rmt::sample_counts(&cfg, big_r)?;
        let s = CountingSample::from_counts(big_r, &counts)?;
        write(out, "out", Box::into_raw(Box::new(JdCounting(s))))
    })
}

/// # Safety
/// `c` must be null or a handle from `jd_counting_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jd_counting_free(c: *mut JdCounting) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Mean count and its standard error.
///
/// # Safety
/// `c` must be a live handle and both out-pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jd_counting_mean(
    c: *const JdCounting,
    mean: *mut f64,
    std_error: *mut f64,
) -> JdStatus {
    guard(|| {
        let c = read(c, "counting")?;
        if std_error.is_null() {
            return Err(Failure::Null("std_error"));
        }
        write(mean, "mean", c.0.mean_count)?;
        write(std_error, "std_error", c.0.mean_count_se)
    })
}

/// Empirical `E[e^{-2πiα·count}]` and its standard error.
///
/// # Safety
/// `c` must be a live handle and both out-pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jd_counting_gf(
    c: *const JdCounting,
    alpha: f64,
    out: *mut JdComplex,
    std_error: *mut f64,
) -> JdStatus {
    guard(|| {
        let c = read(c, "counting")?;
        if !alpha.is_finite() {
            return Err(Error::InvalidArgument("alpha must be finite".into()).into());
        }
        if std_error.is_null() {
            return Err(Failure::Null("std_error"));
        }
        let (v, se) = c.0.generating_function(alpha);
        write(out, "out", v.into())?;
        write(std_error, "std_error", se)
    })
}
