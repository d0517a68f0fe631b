//! C ABI over the cone library.
//!
//! Cones and certificates cross the boundary as opaque handles; everything
//! else travels as UTF-8 JSON in the same formats the command line uses.
//! Every entry point returns a [`CtStatus`]. On failure the message is kept
//! per thread and read with [`ct_last_error_message`].
//!
//! Strings returned through `char **` out-parameters are owned by the caller
//! and released with [`ct_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use conetensor::cli::{certify_pair, verify_any, AnyCertificate};
use conetensor::cones::json::{cone_from_str, cone_to_value};
use conetensor::cones::Cone;
use conetensor::exactnum::mat::QMat;
use conetensor::gptnorms::{injective_norm, projective_norm, NormedSpace};
use conetensor::Error;
use serde_json::json;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CtStatus {
    Ok = 0,
    /// Malformed input, unsupported request or internal failure.
    Error = 1,
    /// A verified negative: classical cone or invalid certificate.
    Negative = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    Panic = 5,
}

/// A parsed cone.
pub struct CtCone(Cone);

/// A certificate produced by [`ct_certify`] or parsed by [`ct_certificate_from_json`].
pub struct CtCertificate(AnyCertificate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn from_lib(e: Error) -> CtStatus {
    let status = if e.exit_code() == 2 { CtStatus::Negative } else { CtStatus::Error };
    set_error(e.to_string());
    status
}

/// Runs `f` with panics and errors mapped to status codes.
fn guard(f: impl FnOnce() -> Result<(), CtStatus>) -> CtStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CtStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("panic inside the library");
            CtStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, CtStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(CtStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        CtStatus::InvalidUtf8
    })
}

unsafe fn read_ref<'a, T>(p: *const T) -> Result<&'a T, CtStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle");
        CtStatus::NullPointer
    })
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), CtStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(CtStatus::NullPointer);
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), CtStatus> {
    let c = CString::new(s).map_err(|_| {
        set_error("output contains a NUL byte");
        CtStatus::Error
    })?;
    write_out(out, c.into_raw())
}

fn json_err(e: serde_json::Error) -> CtStatus {
    from_lib(Error::Json(e))
}

/// Message of the last failure on this thread, or NULL. Valid until the next
/// call into the library on the same thread.
#[no_mangle]
pub extern "C" fn ct_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ct_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ct_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a cone from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ct_cone_from_json(json: *const c_char, out: *mut *mut CtCone) -> CtStatus {
    guard(|| {
        let cone = cone_from_str(read_str(json)?).map_err(from_lib)?;
        write_out(out, Box::into_raw(Box::new(CtCone(cone))))
    })
}

/// # Safety
/// `cone` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ct_cone_free(cone: *mut CtCone) {
    if !cone.is_null() {
        drop(Box::from_raw(cone));
    }
}

/// # Safety
/// `cone` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ct_cone_ambient_dim(cone: *const CtCone, out: *mut usize) -> CtStatus {
    guard(|| write_out(out, read_ref(cone)?.0.ambient_dim()))
}

/// Writes 1 to `out` when the cone is isomorphic to an orthant, else 0.
///
/// # Safety
/// `cone` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ct_cone_is_classical(cone: *const CtCone, out: *mut i32) -> CtStatus {
    guard(|| {
        let classical = read_ref(cone)?.0.is_classical().map_err(from_lib)?;
        write_out(out, i32::from(classical))
    })
}

/// # Safety
/// `cone` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ct_cone_dual(cone: *const CtCone, out: *mut *mut CtCone) -> CtStatus {
    guard(|| {
        let dual = read_ref(cone)?.0.dual_cone().map_err(from_lib)?;
        write_out(out, Box::into_raw(Box::new(CtCone(dual))))
    })
}

/// The cone in its JSON file format.
///
/// # Safety
/// `cone` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ct_cone_to_json(cone: *const CtCone, out: *mut *mut c_char) -> CtStatus {
    guard(|| write_string(out, cone_to_value(&read_ref(cone)?.0).to_string()))
}

/// Builds an entanglement certificate for the pair. Returns
/// `CT_STATUS_NEGATIVE` when either cone is classical.
///
/// # Safety
/// `a` and `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ct_certify(a: *const CtCone, b: *const CtCone, seed: u64, out: *mut *mut CtCertificate) -> CtStatus {
    guard(|| {
        let cert = certify_pair(&read_ref(a)?.0, &read_ref(b)?.0, seed).map_err(from_lib)?;
        write_out(out, Box::into_raw(Box::new(CtCertificate(cert))))
    })
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ct_certificate_from_json(json: *const c_char, out: *mut *mut CtCertificate) -> CtStatus {
    guard(|| {
        let value: serde_json::Value = serde_json::from_str(read_str(json)?).map_err(json_err)?;
        let cert = AnyCertificate::from_value(&value).map_err(from_lib)?;
        write_out(out, Box::into_raw(Box::new(CtCertificate(cert))))
    })
}

/// # Safety
/// `cert` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ct_certificate_free(cert: *mut CtCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// # Safety
/// `cert` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ct_certificate_to_json(cert: *const CtCertificate, out: *mut *mut c_char) -> CtStatus {
    guard(|| {
        let value = read_ref(cert)?.0.to_value().map_err(from_lib)?;
        write_string(out, value.to_string())
    })
}

/// The separation value as a `"p/q"` string.
///
/// # Safety
/// `cert` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ct_certificate_separation_value(cert: *const CtCertificate, out: *mut *mut c_char) -> CtStatus {
    guard(|| {
        let value = read_ref(cert)?.0.separation_value().clone();
        write_string(out, conetensor::exactnum::rational::format_rational(&value))
    })
}

/// Replays the certificate against the cones. Returns `CT_STATUS_OK` when it
/// is valid and `CT_STATUS_NEGATIVE` when it is not.
///
/// # Safety
/// `cert`, `a` and `b` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn ct_verify(cert: *const CtCertificate, a: *const CtCone, b: *const CtCone, seed: u64) -> CtStatus {
    guard(|| {
        let (valid, _) = verify_any(&read_ref(cert)?.0, &read_ref(a)?.0, &read_ref(b)?.0, seed).map_err(from_lib)?;
        if valid {
            Ok(())
        } else {
            set_error("certificate invalid");
            Err(CtStatus::Negative)
        }
    })
}

/// Injective and projective norms of a tensor, as
/// `{"epsilon": …, "pi": …}`. Spaces use the normed-space JSON format and the
/// tensor is a matrix of `"p/q"` strings.
///
/// # Safety
/// All string arguments must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ct_tensor_norms(
    space_x: *const c_char,
    space_y: *const c_char,
    tensor: *const c_char,
    out: *mut *mut c_char,
) -> CtStatus {
    guard(|| {
        let x = NormedSpace::from_json(read_str(space_x)?).map_err(from_lib)?;
        let y = NormedSpace::from_json(read_str(space_y)?).map_err(from_lib)?;
        let z: QMat = serde_json::from_str(read_str(tensor)?).map_err(json_err)?;
        let eps = injective_norm(&x, &y, &z).map_err(from_lib)?;
        let pi = projective_norm(&x, &y, &z).map_err(from_lib)?;
        write_string(out, json!({ "epsilon": eps, "pi": pi.value }).to_string())
    })
}
