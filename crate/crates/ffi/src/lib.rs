//! C ABI over `gme-core`.
//!
//! States and tensors are opaque heap handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call
//! returns a [`GmeStatus`]; on failure [`gme_last_error`] describes the
//! cause for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gme_core::bloch::{correlation_tensor, embed_to_common_dimension};
use gme_core::criteria::{
    concurrence_bound, frobenius_criterion, kyfan_criterion, Criterion, CriterionReport,
};
use gme_core::families::{parse_params, thm5_native, Family, Params};
use gme_core::states::{is_ppt, werner, WernerParams};
use gme_core::{generators, ComplexMatrix, CorrelationTensor, DensityMatrix, Error, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Input is not a valid density matrix, or not of the required kind.
    InvalidState = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmeCriterion {
    Frobenius = 1,
    KyFan = 2,
    Concurrence = 3,
}

/// `k` is 0 and `concurrence_lower_bound` is NaN where not applicable.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmeCriterionReport {
    pub criterion: GmeCriterion,
    pub d: u32,
    pub k: u32,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub detected: bool,
    pub concurrence_lower_bound: f64,
}

pub struct GmeState {
    inner: DensityMatrix,
}

pub struct GmeTensor {
    inner: CorrelationTensor,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(GmeStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::NotHermitian { .. }
            | Error::NotPositive { .. }
            | Error::InvalidTrace { .. }
            | Error::ZeroTrace
            | Error::NotWerner { .. }
            | Error::MixedState { .. }
            | Error::NotTripartite(_) => GmeStatus::InvalidState,
            Error::ImaginaryResidue { .. }
            | Error::NoSignChange { .. }
            | Error::InvalidBasis(_) => GmeStatus::Numerical,
            _ => GmeStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GmeStatus::NullPointer, format!("`{what}` is null"))
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GmeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GmeStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            GmeStatus::Panic
        }
    }
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn in_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(GmeStatus::InvalidArgument, format!("`{what}` is not UTF-8")))
}

fn boxed_state(out: &mut *mut GmeState, s: DensityMatrix) {
    *out = Box::into_raw(Box::new(GmeState { inner: s }));
}

/// Message for the last failed call on this thread. Valid until the next
/// call into this library from the same thread.
#[no_mangle]
pub extern "C" fn gme_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gme_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Two-qudit Werner state `ρ_w(p, d)`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn gme_state_werner(p: f64, d: u32, out: *mut *mut GmeState) -> GmeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        boxed_state(out, werner(WernerParams::new(p, d as usize)?));
        Ok(())
    })
}

/// Noisy product of two two-qubit Werner states regrouped on `[2, 2, 4]`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn gme_state_thm5(
    p1: f64,
    p2: f64,
    x: f64,
    out: *mut *mut GmeState,
) -> GmeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        boxed_state(out, thm5_native(p1, p2, x)?);
        Ok(())
    })
}

fn family_state(family: Family, params: &[(&str, f64)]) -> Result<DensityMatrix, Failure> {
    let p: Params = params.iter().map(|&(k, v)| (k.to_string(), v)).collect();
    Ok(family.build(&p)?)
}

/// GHZ/W mixture with white noise on three qubits.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn gme_state_ex2(x: f64, y: f64, out: *mut *mut GmeState) -> GmeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        boxed_state(out, family_state(Family::Ex2, &[("x", x), ("y", y)])?);
        Ok(())
    })
}

/// Three-qutrit state mixed with white noise.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn gme_state_ex3(x: f64, out: *mut *mut GmeState) -> GmeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        boxed_state(out, family_state(Family::Ex3, &[("x", x)])?);
        Ok(())
    })
}

/// Any named family with `key=value,...` parameters (`params` may be null).
///
/// # Safety
/// `family` and non-null `params` must be NUL-terminated strings; `out`
/// must be valid for one handle.
#[no_mangle]
pub unsafe extern "C" fn gme_state_family(
    family: *const c_char,
    params: *const c_char,
    out: *mut *mut GmeState,
) -> GmeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let family: Family = c_str(family, "family")?.parse()?;
        let params = if params.is_null() {
            Params::new()
        } else {
            parse_params(c_str(params, "params")?)?
        };
        boxed_state(out, family.build(&params)?);
        Ok(())
    })
}

/// Density matrix from row-major real and imaginary parts of length
/// `n * n`, where `n` is the product of the `ndims` entries of `dims`.
/// The matrix is validated (Hermitian, unit trace, positive).
///
/// # Safety
/// `re` and `im` must point to `len` doubles, `dims` to `ndims` values.
#[no_mangle]
pub unsafe extern "C" fn gme_state_from_parts(
    re: *const f64,
    im: *const f64,
    len: usize,
    dims: *const u32,
    ndims: usize,
    out: *mut *mut GmeState,
) -> GmeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if re.is_null() {
            return Err(null("re"));
        }
        if im.is_null() {
            return Err(null("im"));
        }
        if dims.is_null() {
            return Err(null("dims"));
        }
        let dims: Vec<usize> = std::slice::from_raw_parts(dims, ndims)
            .iter()
            .map(|&d| d as usize)
            .collect();
        let n: usize = dims.iter().product();
        if n.checked_mul(n) != Some(len) {
            return Err(Error::EntryCount {
                expected: n * n,
                found: len,
            }
            .into());
        }
        let re = std::slice::from_raw_parts(re, len);
        let im = std::slice::from_raw_parts(im, len);
        let data = re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect();
        let m = ComplexMatrix::new(n, n, data)?;
        boxed_state(out, DensityMatrix::new(m, dims)?);
        Ok(())
    })
}

/// Total Hilbert-space dimension of a state.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gme_state_dim(state: *const GmeState, out: *mut usize) -> GmeStatus {
    guard(|| {
        *out_ptr(out, "out")? = in_ref(state, "state")?.inner.dim();
        Ok(())
    })
}

/// PPT test with subsystem `side` transposed. Either output may be null.
///
/// # Safety
/// `state` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn gme_state_is_ppt(
    state: *const GmeState,
    side: u32,
    ppt: *mut bool,
    min_eigenvalue: *mut f64,
) -> GmeStatus {
    guard(|| {
        let r = is_ppt(&in_ref(state, "state")?.inner, &[side as usize])?;
        if let Some(p) = ppt.as_mut() {
            *p = r.ppt;
        }
        if let Some(m) = min_eigenvalue.as_mut() {
            *m = r.min_eigenvalue;
        }
        Ok(())
    })
}

/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gme_state_free(state: *mut GmeState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Correlation tensor of a tripartite state. Unequal local dimensions are
/// zero-padded up to the largest one first.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gme_tensor_compute(
    state: *const GmeState,
    out: *mut *mut GmeTensor,
) -> GmeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let rho = embed_to_common_dimension(&in_ref(state, "state")?.inner)?;
        let t = correlation_tensor(&rho, &generators(rho.dims()[0])?)?;
        *out = Box::into_raw(Box::new(GmeTensor { inner: t }));
        Ok(())
    })
}

/// Local dimension `d` of the tensor.
///
/// # Safety
/// `tensor` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gme_tensor_d(tensor: *const GmeTensor, out: *mut u32) -> GmeStatus {
    guard(|| {
        *out_ptr(out, "out")? = in_ref(tensor, "tensor")?.inner.d() as u32;
        Ok(())
    })
}

/// Copies the three-body components, flat with index `(i n + j) n + k`
/// and `n = d² - 1`. With a null `buf` only `needed` is written.
///
/// # Safety
/// `tensor` must be a live handle; `buf` must hold `len` doubles if non-null.
#[no_mangle]
pub unsafe extern "C" fn gme_tensor_t123(
    tensor: *const GmeTensor,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> GmeStatus {
    guard(|| {
        let t = in_ref(tensor, "tensor")?.inner.t123();
        if let Some(n) = needed.as_mut() {
            *n = t.len();
        }
        if buf.is_null() {
            return Ok(());
        }
        if len < t.len() {
            return Err(Failure(
                GmeStatus::BufferTooSmall,
                format!("buffer holds {len} values, {} needed", t.len()),
            ));
        }
        ptr::copy_nonoverlapping(t.as_ptr(), buf, t.len());
        Ok(())
    })
}

/// # Safety
/// `tensor` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gme_tensor_free(tensor: *mut GmeTensor) {
    if !tensor.is_null() {
        drop(Box::from_raw(tensor));
    }
}

fn to_report(r: CriterionReport) -> GmeCriterionReport {
    GmeCriterionReport {
        criterion: match r.criterion {
            Criterion::Frobenius => GmeCriterion::Frobenius,
            Criterion::KyFan => GmeCriterion::KyFan,
            Criterion::Concurrence => GmeCriterion::Concurrence,
        },
        d: r.d as u32,
        k: r.k.unwrap_or(0) as u32,
        value: r.value,
        bound: r.bound,
        margin: r.margin,
        detected: r.detected,
        concurrence_lower_bound: r.concurrence_lower_bound.unwrap_or(f64::NAN),
    }
}

/// Frobenius-norm test on the three-body tensor.
///
/// # Safety
/// `tensor` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gme_frobenius_criterion(
    tensor: *const GmeTensor,
    out: *mut GmeCriterionReport,
) -> GmeStatus {
    guard(|| {
        *out_ptr(out, "out")? = to_report(frobenius_criterion(&in_ref(tensor, "tensor")?.inner));
        Ok(())
    })
}

/// Average Ky Fan `k`-norm test, `1 <= k <= d² - 1`.
///
/// # Safety
/// `tensor` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gme_kyfan_criterion(
    tensor: *const GmeTensor,
    k: u32,
    out: *mut GmeCriterionReport,
) -> GmeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = to_report(kyfan_criterion(
            &in_ref(tensor, "tensor")?.inner,
            k as usize,
        )?);
        Ok(())
    })
}

/// Lower bound on the GME concurrence.
///
/// # Safety
/// `tensor` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gme_concurrence_bound(
    tensor: *const GmeTensor,
    out: *mut GmeCriterionReport,
) -> GmeStatus {
    guard(|| {
        *out_ptr(out, "out")? = to_report(concurrence_bound(&in_ref(tensor, "tensor")?.inner));
        Ok(())
    })
}
