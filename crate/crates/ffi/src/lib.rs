//! C ABI for the muthick engine.
//!
//! Scenes are opaque handles created from JSON text and released with
//! `mt_scene_free`. Every fallible call returns an `MtStatus`; on failure
//! the message of the last error on the calling thread is available from
//! `mt_last_error_message` until the next failing call on that thread.
//! Panics never cross the boundary: they are reported as `MT_STATUS_PANIC`.

use muthick::error::Error;
use muthick::expmap::{exp_mu, NormalOffset};
use muthick::export::report_json;
use muthick::radii::radii_report;
use muthick::scene::{Scene, SceneConfig};
use muthick::singular::TirFlag;
use muthick::vector::VecN;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8, or a size did not match.
    InvalidArgument = 2,
    /// The scene text or its tolerances were rejected.
    InvalidScene = 3,
    /// The offset height exceeds `1/|mu'|`.
    OutOfW = 4,
    /// The arclength lies outside an open component.
    OutOfDomain = 5,
    /// The direction has no part normal to the curve.
    DegenerateDirection = 6,
    /// A numerical routine failed on valid input.
    NumericFailure = 7,
    /// An internal panic was caught.
    Panic = 8,
}

/// Opaque scene handle.
pub struct MtScene {
    scene: Scene,
}

/// Radii of a scene; infinite values are IEEE infinities.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtRadii {
    pub focrad0: f64,
    pub focradminus: f64,
    pub dcsd_half: f64,
    pub lr: f64,
    pub ur: f64,
    pub dir: f64,
    pub tir: f64,
    pub air: f64,
    /// 1 when TIR comes from a collapse arc, 0 when it is the infimum UR.
    pub tir_attained: i32,
    pub collapse_count: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MtStatus {
    match e {
        Error::OutOfW { .. } => MtStatus::OutOfW,
        Error::OutOfDomain { .. } => MtStatus::OutOfDomain,
        Error::DegenerateDirection => MtStatus::DegenerateDirection,
        Error::NoSuchComponent(_) => MtStatus::InvalidArgument,
        _ => match e.kind() {
            muthick::error::ErrorKind::Config => MtStatus::InvalidScene,
            muthick::error::ErrorKind::Numeric => MtStatus::NumericFailure,
        },
    }
}

fn fail(e: Error) -> MtStatus {
    set_error(format!("{}: {e}", e.code()));
    status_of(&e)
}

fn guard(f: impl FnOnce() -> MtStatus) -> MtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("PANIC: {msg}"));
            MtStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, MtStatus> {
    if p.is_null() {
        set_error("NULL_POINTER: string argument is null".into());
        return Err(MtStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("INVALID_ARGUMENT: string is not UTF-8".into());
        MtStatus::InvalidArgument
    })
}

fn null_error(what: &str) -> MtStatus {
    set_error(format!("NULL_POINTER: {what} is null"));
    MtStatus::NullPointer
}

/// Parses a scene from JSON text and builds it.
///
/// `overrides` holds `override_count` strings of the form `KEY=VALUE`; it may
/// be null when the count is zero. On success `*out` receives a handle that
/// must be released with `mt_scene_free`.
///
/// # Safety
/// `json` must be a nul-terminated string, `overrides` must point to
/// `override_count` nul-terminated strings and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mt_scene_from_json(
    json: *const c_char,
    overrides: *const *const c_char,
    override_count: usize,
    out: *mut *mut MtScene,
) -> MtStatus {
    guard(|| {
        if out.is_null() {
            return null_error("out");
        }
        *out = std::ptr::null_mut();
        let text = match str_arg(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let mut ovr = Vec::with_capacity(override_count);
        if override_count > 0 {
            if overrides.is_null() {
                return null_error("overrides");
            }
            for i in 0..override_count {
                match str_arg(*overrides.add(i)) {
                    Ok(s) => ovr.push(s.to_string()),
                    Err(s) => return s,
                }
            }
        }
        let built = SceneConfig::from_json(text).and_then(|cfg| Scene::from_config_with(&cfg, &ovr));
        match built {
            Ok(scene) => {
                *out = Box::into_raw(Box::new(MtScene { scene }));
                MtStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a scene handle. Null is accepted and ignored.
///
/// # Safety
/// `scene` must be null or a handle from `mt_scene_from_json` that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn mt_scene_free(scene: *mut MtScene) {
    if !scene.is_null() {
        drop(Box::from_raw(scene));
    }
}

/// Ambient dimension of the scene, or 0 for a null handle.
///
/// # Safety
/// `scene` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mt_scene_dim(scene: *const MtScene) -> usize {
    scene.as_ref().map_or(0, |s| s.scene.dim)
}

/// Number of components, or 0 for a null handle.
///
/// # Safety
/// `scene` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mt_scene_component_count(scene: *const MtScene) -> usize {
    scene.as_ref().map_or(0, |s| s.scene.components.len())
}

/// Computes every radius of the scene.
///
/// # Safety
/// `scene` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mt_radii_report(scene: *const MtScene, out: *mut MtRadii) -> MtStatus {
    guard(|| {
        let Some(sc) = scene.as_ref() else {
            return null_error("scene");
        };
        if out.is_null() {
            return null_error("out");
        }
        match radii_report(&sc.scene) {
            Ok(r) => {
                *out = MtRadii {
                    focrad0: r.focrad0,
                    focradminus: r.focradminus,
                    dcsd_half: r.dcsd_half,
                    lr: r.lr,
                    ur: r.ur,
                    dir: r.dir,
                    tir: r.tir.value,
                    air: r.air,
                    tir_attained: i32::from(r.tir.flag == TirFlag::Attained),
                    collapse_count: r.collapse_arcs.len(),
                };
                MtStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// The radii report as a JSON document. On success `*out` receives a string
/// that must be released with `mt_string_free`.
///
/// # Safety
/// `scene` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mt_radii_report_json(scene: *const MtScene, out: *mut *mut c_char) -> MtStatus {
    guard(|| {
        let Some(sc) = scene.as_ref() else {
            return null_error("scene");
        };
        if out.is_null() {
            return null_error("out");
        }
        *out = std::ptr::null_mut();
        match radii_report(&sc.scene) {
            Ok(r) => {
                let text = CString::new(report_json(&sc.scene, &r)).expect("json has no nul bytes");
                *out = text.into_raw();
                MtStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Evaluates `exp(gamma(s), r v)` on component `component`.
///
/// `v` holds `dim` coordinates; its tangential part is removed and the rest
/// normalized. `out_point` receives `dim` coordinates.
///
/// # Safety
/// `scene` must be a live handle, `v` must point to `dim` readable doubles
/// and `out_point` to `dim` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mt_exp_mu(
    scene: *const MtScene,
    component: usize,
    s: f64,
    v: *const f64,
    dim: usize,
    r: f64,
    out_point: *mut f64,
) -> MtStatus {
    guard(|| {
        let Some(sc) = scene.as_ref() else {
            return null_error("scene");
        };
        if v.is_null() || out_point.is_null() {
            return null_error("vector argument");
        }
        let sc = &sc.scene;
        if dim != sc.dim {
            set_error(format!("INVALID_ARGUMENT: expected {} coordinates, got {dim}", sc.dim));
            return MtStatus::InvalidArgument;
        }
        let comp = match sc.component(component) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        let dir = VecN::from_slice(std::slice::from_raw_parts(v, dim));
        let point = NormalOffset::new(comp, s, &dir, r, sc.tol.w_boundary_rel).and_then(|o| exp_mu(comp, &o));
        match point {
            Ok(p) => {
                std::slice::from_raw_parts_mut(out_point, dim).copy_from_slice(p.as_slice());
                MtStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Message of the last failure on this thread, or null if none occurred.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn mt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn mt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
