//! C interface to finslerkit.
//!
//! Structures and fields are opaque handles created from spec strings and
//! released with the matching `_free` function. Every call returns an
//! [`FkStatus`]; on failure [`fk_last_error`] describes the cause. Strings
//! returned through out-parameters are released with [`fk_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use finslerkit::classify::{classify, ClassTolerance, ClassifyError};
use finslerkit::geometry::{connection, dazord_density, GeomError, SlitPoint};
use finslerkit::identities::{run_identities, IdentityTolerance};
use finslerkit::lifts::ExprField;
use finslerkit::models::{field_from_spec, finsler_from_spec, ModelEntry, ModelError};
use finslerkit::sampling::{SampleError, SamplePlan};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Degenerate = 3,
    Indeterminate = 4,
    Panic = 5,
}

/// Opaque Finsler structure.
pub struct FkStructure {
    entry: ModelEntry,
}

/// Opaque base vector field.
pub struct FkField {
    spec: String,
    field: ExprField,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(FkStatus, String);

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure(FkStatus::InvalidInput, e.to_string())
    }
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        let status = match e {
            GeomError::Parse(_) | GeomError::Dimension(_) => FkStatus::InvalidInput,
            _ => FkStatus::Degenerate,
        };
        Failure(status, e.to_string())
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        let status = match &e {
            ClassifyError::Geometry(g) => return g.clone().into(),
            ClassifyError::Sampling(SampleError::Exhausted { .. }) | ClassifyError::Lattice(_) => {
                FkStatus::Indeterminate
            }
            _ => FkStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FkStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FkStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(FkStatus::NullPointer, "null pointer argument".into())
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(FkStatus::InvalidInput, "string is not UTF-8".into()))
}

unsafe fn point(n: usize, x: *const f64, y: *const f64) -> Result<SlitPoint, Failure> {
    if x.is_null() || y.is_null() {
        return Err(null());
    }
    let xs = std::slice::from_raw_parts(x, n).to_vec();
    let ys = std::slice::from_raw_parts(y, n).to_vec();
    Ok(SlitPoint::new(xs, ys)?)
}

unsafe fn structure<'a>(s: *const FkStructure) -> Result<&'a FkStructure, Failure> {
    s.as_ref().ok_or_else(null)
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    *out = CString::new(s).map_err(|e| Failure(FkStatus::Panic, e.to_string()))?.into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from a finslerkit call returning a string, or be null.
#[no_mangle]
pub unsafe extern "C" fn fk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a structure from `builtin:<name>?k=v,...` or `expr:<F>`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fk_structure_new(spec: *const c_char, dim: usize, out: *mut *mut FkStructure) -> FkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let entry = finsler_from_spec(text(spec)?, dim)?;
        *out = Box::into_raw(Box::new(FkStructure { entry }));
        Ok(())
    })
}

/// # Safety
/// `s` must come from [`fk_structure_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn fk_structure_free(s: *mut FkStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fk_structure_dim(s: *const FkStructure, out: *mut usize) -> FkStatus {
    guard(|| {
        let s = structure(s)?;
        *out.as_mut().ok_or_else(null)? = s.entry.structure.dim();
        Ok(())
    })
}

/// Energy `E = F²/2` at `(x, y)`.
///
/// # Safety
/// `x` and `y` must hold `dim` values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_energy(s: *const FkStructure, x: *const f64, y: *const f64, out: *mut f64) -> FkStatus {
    guard(|| {
        let s = structure(s)?;
        let p = point(s.entry.structure.dim(), x, y)?;
        *out.as_mut().ok_or_else(null)? = s.entry.structure.energy(&p)?;
        Ok(())
    })
}

/// Spray coefficients `G` (`dim` values) and connection coefficients `N`
/// (`dim * dim` values, row-major). `nonlinear` may be null.
///
/// # Safety
/// Buffers must have the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn fk_spray(
    s: *const FkStructure,
    x: *const f64,
    y: *const f64,
    spray: *mut f64,
    nonlinear: *mut f64,
) -> FkStatus {
    guard(|| {
        let s = structure(s)?;
        let n = s.entry.structure.dim();
        let p = point(n, x, y)?;
        if spray.is_null() {
            return Err(null());
        }
        let c = connection(&s.entry.structure, &p)?;
        std::slice::from_raw_parts_mut(spray, n).copy_from_slice(&c.spray);
        if !nonlinear.is_null() {
            let flat: Vec<f64> = c.nonlinear.concat();
            std::slice::from_raw_parts_mut(nonlinear, n * n).copy_from_slice(&flat);
        }
        Ok(())
    })
}

/// Density of the Dazord volume in coordinates `(x, y)`.
///
/// # Safety
/// `x` and `y` must hold `dim` values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn fk_volume_density(
    s: *const FkStructure,
    x: *const f64,
    y: *const f64,
    out: *mut f64,
) -> FkStatus {
    guard(|| {
        let s = structure(s)?;
        let p = point(s.entry.structure.dim(), x, y)?;
        *out.as_mut().ok_or_else(null)? = dazord_density(&s.entry.structure, &p)?;
        Ok(())
    })
}

/// Creates a base vector field from `builtin:<name>?k=v,...` or
/// `expr:[X1, ..., Xn]`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fk_field_new(spec: *const c_char, dim: usize, out: *mut *mut FkField) -> FkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let spec = text(spec)?;
        let field = field_from_spec(spec, dim)?;
        *out = Box::into_raw(Box::new(FkField {
            spec: spec.to_string(),
            field,
        }));
        Ok(())
    })
}

/// # Safety
/// `f` must come from [`fk_field_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn fk_field_free(f: *mut FkField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

fn plan(s: &FkStructure, seed: u64) -> SamplePlan {
    SamplePlan::for_region(&s.entry.region, seed)
}

/// Classification report as JSON, with the default sample plan and
/// tolerances. Release `out_json` with [`fk_string_free`].
///
/// # Safety
/// Handles must be live and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn fk_classify_json(
    s: *const FkStructure,
    f: *const FkField,
    seed: u64,
    out_json: *mut *mut c_char,
) -> FkStatus {
    guard(|| {
        let s = structure(s)?;
        let f = f.as_ref().ok_or_else(null)?;
        let field = f.field.clone().into_field();
        let mut report = classify(&s.entry.structure, &field, &plan(s, seed), &ClassTolerance::default())?;
        report.config.field = f.spec.clone();
        put_string(out_json, report.to_json())
    })
}

/// Identity battery report as JSON. Release `out_json` with
/// [`fk_string_free`].
///
/// # Safety
/// `s` must be live and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn fk_identities_json(s: *const FkStructure, seed: u64, out_json: *mut *mut c_char) -> FkStatus {
    guard(|| {
        let s = structure(s)?;
        let report = run_identities(&s.entry.structure, &plan(s, seed), &IdentityTolerance::default())?;
        put_string(out_json, report.to_json())
    })
}
