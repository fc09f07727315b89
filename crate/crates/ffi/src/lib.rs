//! C ABI over `ising-storage`.
//!
//! Objects are opaque heap handles created by `is_*_new`-style functions and
//! released with the matching `is_*_free`. Fallible functions return an
//! [`IsStatus`]; on failure the message is available from
//! [`is_last_error_message`] on the same thread. Panics are caught at the
//! boundary and reported as `IS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use libc::c_char;

use ising_storage::codecs::{AnyCodec, Codec, CodecSpec};
use ising_storage::dynamics::{self, DynamicsParams, Field, RateConvention};
use ising_storage::experiments::{binary_channel_capacity, z_capacity};
use ising_storage::rng::master_rng;
use ising_storage::stability::is_stable;
use ising_storage::{Boundary, Configuration, Error, Lattice};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InfeasibleGeometry = 3,
    Defect = 4,
    Io = 5,
    MessageTooLong = 6,
    LatticeMismatch = 7,
    Parse = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsBoundary {
    Free = 0,
    MinusFrame = 1,
}

/// Dynamics settings. `beta` may be `INFINITY` for zero temperature;
/// `field` is -1, 0 or +1.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IsDynamics {
    pub beta: f64,
    pub field: i32,
    pub per_system_clock: bool,
    pub freeze_minus: bool,
}

pub struct IsLattice {
    inner: Arc<Lattice>,
}

pub struct IsConfig {
    inner: Configuration,
}

pub struct IsCodec {
    inner: AnyCodec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> IsStatus {
    match err {
        Error::InvalidLattice(_) | Error::InvalidArgument(_) => IsStatus::InvalidArgument,
        Error::InfeasibleGeometry(_) => IsStatus::InfeasibleGeometry,
        Error::MessageTooLong { .. } => IsStatus::MessageTooLong,
        Error::LatticeMismatch => IsStatus::LatticeMismatch,
        Error::Parse(_) | Error::Json(_) => IsStatus::Parse,
        Error::Defect(_) => IsStatus::Defect,
        Error::Io(_) => IsStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), IsStatus>) -> IsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside ising-storage".into());
            IsStatus::Panic
        }
    }
}

fn fail(err: Error) -> IsStatus {
    let s = status_of(&err);
    set_error(err.to_string());
    s
}

fn null(what: &str) -> IsStatus {
    set_error(format!("{what} is null"));
    IsStatus::NullPointer
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, IsStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn as_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, IsStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), IsStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), IsStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = value;
    Ok(())
}

fn params_of(d: &IsDynamics) -> Result<DynamicsParams, IsStatus> {
    let field = match d.field {
        0 => Field::None,
        1 => Field::Plus,
        -1 => Field::Minus,
        f => return Err(fail(Error::InvalidArgument(format!("field must be -1, 0 or 1, got {f}")))),
    };
    let p = DynamicsParams {
        beta: d.beta,
        field,
        rate_convention: if d.per_system_clock {
            RateConvention::PerSystemUnit
        } else {
            RateConvention::PerSiteUnit
        },
        freeze_minus: d.freeze_minus,
    };
    p.validate().map_err(fail)?;
    Ok(p)
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn is_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn is_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn is_lattice_square(k: usize, boundary: IsBoundary, out: *mut *mut IsLattice) -> IsStatus {
    guard(|| {
        let b = match boundary {
            IsBoundary::Free => Boundary::Free,
            IsBoundary::MinusFrame => Boundary::MinusFrame,
        };
        let inner = Arc::new(Lattice::square(k, b).map_err(fail)?);
        put(out, IsLattice { inner })
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn is_lattice_honeycomb(rows: usize, cols: usize, out: *mut *mut IsLattice) -> IsStatus {
    guard(|| {
        let inner = Arc::new(Lattice::honeycomb(rows, cols).map_err(fail)?);
        put(out, IsLattice { inner })
    })
}

/// Number of sites, or 0 for a null handle.
///
/// # Safety
/// `lattice` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn is_lattice_site_count(lattice: *const IsLattice) -> usize {
    lattice.as_ref().map_or(0, |l| l.inner.site_count())
}

/// # Safety
/// `lattice` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn is_lattice_free(lattice: *mut IsLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// All sites `+1` when `plus`, else all `-1`.
///
/// # Safety
/// `lattice` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn is_config_uniform(lattice: *const IsLattice, plus: bool, out: *mut *mut IsConfig) -> IsStatus {
    guard(|| {
        let l = as_ref(lattice, "lattice")?.inner.clone();
        let inner = if plus { Configuration::all_plus(l) } else { Configuration::all_minus(l) };
        put(out, IsConfig { inner })
    })
}

/// I.i.d. spins, `+1` with probability `p`.
///
/// # Safety
/// `lattice` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn is_config_random(lattice: *const IsLattice, p: f64, seed: u64, out: *mut *mut IsConfig) -> IsStatus {
    guard(|| {
        let l = as_ref(lattice, "lattice")?.inner.clone();
        let inner = Configuration::random(l, p, &mut master_rng(seed)).map_err(fail)?;
        put(out, IsConfig { inner })
    })
}

/// Parses the JSON form produced by [`is_config_to_json`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn is_config_from_json(json: *const c_char, out: *mut *mut IsConfig) -> IsStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| fail(Error::Parse(e.to_string())))?;
        let inner = Configuration::from_json(text).map_err(fail)?;
        put(out, IsConfig { inner })
    })
}

/// JSON record of the configuration; free with [`is_string_free`].
/// Returns NULL for a null handle.
///
/// # Safety
/// `cfg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn is_config_to_json(cfg: *const IsConfig) -> *mut c_char {
    match cfg.as_ref() {
        Some(c) => CString::new(c.inner.to_json()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `cfg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn is_config_clone(cfg: *const IsConfig, out: *mut *mut IsConfig) -> IsStatus {
    guard(|| {
        let inner = as_ref(cfg, "cfg")?.inner.clone();
        put(out, IsConfig { inner })
    })
}

/// # Safety
/// `cfg` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn is_config_free(cfg: *mut IsConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Spin (`+1` or `-1`) of site `v`.
///
/// # Safety
/// `cfg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn is_config_spin(cfg: *const IsConfig, v: usize, out: *mut i8) -> IsStatus {
    guard(|| {
        let c = &as_ref(cfg, "cfg")?.inner;
        if v >= c.len() {
            return Err(fail(Error::InvalidArgument(format!("site {v} out of range"))));
        }
        write(out, c.spin(v))
    })
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn is_config_set(cfg: *mut IsConfig, v: usize, spin: i8) -> IsStatus {
    guard(|| {
        let c = &mut as_mut(cfg, "cfg")?.inner;
        if v >= c.len() || (spin != 1 && spin != -1) {
            return Err(fail(Error::InvalidArgument(format!("bad site {v} or spin {spin}"))));
        }
        c.set(v, spin);
        Ok(())
    })
}

/// Number of `+1` sites, or 0 for a null handle.
///
/// # Safety
/// `cfg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn is_config_plus_count(cfg: *const IsConfig) -> usize {
    cfg.as_ref().map_or(0, |c| c.inner.plus_count())
}

/// Whether no site can flip under zero-temperature dynamics.
///
/// # Safety
/// `cfg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn is_config_is_stable(cfg: *const IsConfig, out: *mut bool) -> IsStatus {
    guard(|| write(out, is_stable(&as_ref(cfg, "cfg")?.inner)))
}

/// Runs continuous-time dynamics in place up to `horizon`; the number of
/// flips goes to `events` when it is non-null.
///
/// # Safety
/// `cfg` and `params` must be valid; `events` null or writable.
#[no_mangle]
pub unsafe extern "C" fn is_run_continuous(
    cfg: *mut IsConfig,
    horizon: f64,
    params: *const IsDynamics,
    seed: u64,
    events: *mut u64,
) -> IsStatus {
    guard(|| {
        let c = as_mut(cfg, "cfg")?;
        let p = params_of(as_ref(params, "params")?)?;
        let start = c.inner.clone();
        let (next, n) = dynamics::run_continuous(start, horizon, &p, &mut master_rng(seed)).map_err(fail)?;
        c.inner = next;
        if !events.is_null() {
            *events = n;
        }
        Ok(())
    })
}

/// Runs `steps` steps of the discrete chain in place.
///
/// # Safety
/// `cfg` and `params` must be valid.
#[no_mangle]
pub unsafe extern "C" fn is_run_discrete(cfg: *mut IsConfig, steps: u64, params: *const IsDynamics, seed: u64) -> IsStatus {
    guard(|| {
        let c = as_mut(cfg, "cfg")?;
        let p = params_of(as_ref(params, "params")?)?;
        c.inner = dynamics::run_discrete(c.inner.clone(), steps, &p, &mut master_rng(seed)).map_err(fail)?;
        Ok(())
    })
}

/// Builds a codec from its JSON descriptor, e.g.
/// `{"scheme":"droplet","k":64,"area":16}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn is_codec_from_json(json: *const c_char, out: *mut *mut IsCodec) -> IsStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| fail(Error::Parse(e.to_string())))?;
        let spec: CodecSpec = serde_json::from_str(text).map_err(|e| fail(e.into()))?;
        let inner = spec.build().map_err(fail)?;
        put(out, IsCodec { inner })
    })
}

/// # Safety
/// `codec` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn is_codec_free(codec: *mut IsCodec) {
    if !codec.is_null() {
        drop(Box::from_raw(codec));
    }
}

/// Bits per codeword, or 0 for a null handle.
///
/// # Safety
/// `codec` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn is_codec_capacity(codec: *const IsCodec) -> usize {
    codec.as_ref().map_or(0, |c| c.inner.capacity())
}

/// Recommended dynamics for the codec.
///
/// # Safety
/// `codec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn is_codec_dynamics(codec: *const IsCodec, out: *mut IsDynamics) -> IsStatus {
    guard(|| {
        let p = as_ref(codec, "codec")?.inner.dynamics();
        write(
            out,
            IsDynamics {
                beta: p.beta,
                field: p.field.spin().map_or(0, i32::from),
                per_system_clock: p.rate_convention == RateConvention::PerSystemUnit,
                freeze_minus: p.freeze_minus,
            },
        )
    })
}

/// Encodes `len` bits (one byte each, nonzero meaning 1).
///
/// # Safety
/// `bits` must point to `len` readable bytes (or be null with `len == 0`).
#[no_mangle]
pub unsafe extern "C" fn is_codec_encode(codec: *const IsCodec, bits: *const u8, len: usize, out: *mut *mut IsConfig) -> IsStatus {
    guard(|| {
        let c = as_ref(codec, "codec")?;
        if bits.is_null() && len > 0 {
            return Err(null("bits"));
        }
        let msg: Vec<bool> = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(bits, len).iter().map(|&b| b != 0).collect()
        };
        let inner = c.inner.encode(&msg).map_err(fail)?;
        put(out, IsConfig { inner })
    })
}

/// Decodes the first `len` bits into `out` (one byte each, 0 or 1).
///
/// # Safety
/// `out` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn is_codec_decode(codec: *const IsCodec, cfg: *const IsConfig, out: *mut u8, len: usize) -> IsStatus {
    guard(|| {
        let c = as_ref(codec, "codec")?;
        let cfg = as_ref(cfg, "cfg")?;
        if out.is_null() && len > 0 {
            return Err(null("out"));
        }
        let bits = c.inner.decode_prefix(&cfg.inner, len).map_err(fail)?;
        for (i, b) in bits.into_iter().enumerate() {
            *out.add(i) = u8::from(b);
        }
        Ok(())
    })
}

/// Z-channel capacity in bits for crossover `q`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn is_z_capacity(q: f64, out: *mut f64) -> IsStatus {
    guard(|| write(out, z_capacity(q).map_err(fail)?))
}

/// Binary channel capacity in bits for `P(1|0) = q0`, `P(0|1) = q1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn is_binary_channel_capacity(q0: f64, q1: f64, out: *mut f64) -> IsStatus {
    guard(|| write(out, binary_channel_capacity(q0, q1).map_err(fail)?))
}
