//! C interface to `boucwen`.
//!
//! Every function returns a [`BwStatus`]; results go through out-pointers.
//! On failure a message is kept per thread and can be read with
//! [`bw_last_error`]. Objects returned through `**out` parameters are owned
//! by the caller and released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use boucwen::dynamics::{nrmse_percent, park_ang_index, simulate_sdof, DamageConfig, ResponseHistory, Sinusoid};
use boucwen::ground_motion::{synthesize, GroundMotion, SpectrumParams, SynthesisConfig};
use boucwen::insensitivity::{alternate_params, metrics, ParamPerturbation};
use boucwen::{BoucWenParams, Error, OscillatorParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BwStatus {
    Ok = 0,
    NullPointer = 1,
    /// Parameters out of range, infeasible perturbation or bad length.
    InvalidArgument = 2,
    /// Integration blow-up or other numerical failure.
    Numerical = 3,
    /// Output buffer too small.
    BufferTooSmall = 4,
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BwStatus {
    if e.exit_code() == 3 {
        BwStatus::Numerical
    } else {
        BwStatus::InvalidArgument
    }
}

fn guard(f: impl FnOnce() -> Result<(), (BwStatus, String)>) -> BwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            BwStatus::Ok
        }
        Ok(Err((s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            BwStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (BwStatus, String)>;
}

impl<T> IntoFfi<T> for boucwen::Result<T> {
    fn ffi(self) -> Result<T, (BwStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null() -> (BwStatus, String) {
    (BwStatus::NullPointer, "null pointer argument".into())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn bw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// `r_max = (β + γ)^(−1/n)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bw_r_max(beta: f64, gamma: f64, n: f64, out: *mut f64) -> BwStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        *out = BoucWenParams::new(beta, gamma, n, 1.0).and_then(|p| p.r_max()).ffi()?;
        Ok(())
    })
}

/// Evolution rate `ṙ` for the given shape and yield displacement.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bw_r_dot(
    beta: f64,
    gamma: f64,
    n: f64,
    d_y: f64,
    y_dot: f64,
    r: f64,
    out: *mut f64,
) -> BwStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        *out = BoucWenParams::new(beta, gamma, n, d_y)
            .and_then(|p| p.r_dot(y_dot, r))
            .ffi()?;
        Ok(())
    })
}

/// Relative perturbation `Δ = {Δₙ, Δ₁, Δ₂}`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BwPerturbation {
    pub delta_n: f64,
    pub delta_1: f64,
    pub delta_2: f64,
}

/// Deviation metrics; `eps_star_*` is NaN when there is no interior
/// stationary point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BwMetrics {
    pub eps_1: f64,
    pub eps_star_1: f64,
    pub area_eps_1: f64,
    pub eps_2: f64,
    pub eps_star_2: f64,
    pub area_eps_2: f64,
    pub kappa: f64,
}

fn perturbation(p: &BwPerturbation) -> ParamPerturbation {
    ParamPerturbation::new(p.delta_n, p.delta_1, p.delta_2)
}

/// # Safety
/// `p` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bw_metrics(
    beta: f64,
    gamma: f64,
    n: f64,
    p: *const BwPerturbation,
    out: *mut BwMetrics,
) -> BwStatus {
    guard(|| {
        let p = unsafe { p.as_ref() }.ok_or_else(null)?;
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        let base = BoucWenParams::new(beta, gamma, n, 1.0).ffi()?;
        let m = metrics(&base, &perturbation(p)).ffi()?;
        *out = BwMetrics {
            eps_1: m.eps_1,
            eps_star_1: m.eps_star_1.unwrap_or(f64::NAN),
            area_eps_1: m.area_eps_1,
            eps_2: m.eps_2,
            eps_star_2: m.eps_star_2.unwrap_or(f64::NAN),
            area_eps_2: m.area_eps_2,
            kappa: m.kappa,
        };
        Ok(())
    })
}

/// Alternate shape `{β̄, γ̄, n̄}` for a perturbation.
///
/// # Safety
/// `p` must be readable and the three outputs writable.
#[no_mangle]
pub unsafe extern "C" fn bw_alternate_params(
    beta: f64,
    gamma: f64,
    n: f64,
    p: *const BwPerturbation,
    beta_out: *mut f64,
    gamma_out: *mut f64,
    n_out: *mut f64,
) -> BwStatus {
    guard(|| {
        let p = unsafe { p.as_ref() }.ok_or_else(null)?;
        let (b, g, e) = unsafe { (beta_out.as_mut(), gamma_out.as_mut(), n_out.as_mut()) };
        let (b, g, e) = (b.ok_or_else(null)?, g.ok_or_else(null)?, e.ok_or_else(null)?);
        let base = BoucWenParams::new(beta, gamma, n, 1.0).ffi()?;
        let a = alternate_params(&base, &perturbation(p)).ffi()?;
        *b = a.beta();
        *g = a.gamma();
        *e = a.n();
        Ok(())
    })
}

/// Single-degree-of-freedom oscillator.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BwOscillator {
    pub m: f64,
    pub c: f64,
    pub k: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub n: f64,
    pub d_y: f64,
}

impl BwOscillator {
    fn params(&self) -> boucwen::Result<OscillatorParams> {
        let bw = BoucWenParams::new(self.beta, self.gamma, self.n, self.d_y)?;
        OscillatorParams::new(self.m, self.c, self.k, self.alpha, bw)
    }
}

/// Simulated response (opaque).
pub struct BwResponse {
    history: ResponseHistory,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BwChannel {
    Time = 0,
    Displacement = 1,
    Velocity = 2,
    AbsAcceleration = 3,
    HystereticVariable = 4,
    HystereticForce = 5,
    HystereticEnergy = 6,
}

fn boxed_response(h: ResponseHistory, out: &mut *mut BwResponse) {
    *out = Box::into_raw(Box::new(BwResponse { history: h }));
}

/// Response to a sampled base acceleration (`accel[i]` at `i·record_dt`,
/// linearly interpolated) integrated with step `dt`.
///
/// # Safety
/// `osc` readable, `accel` readable for `len` values, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bw_simulate_sdof(
    osc: *const BwOscillator,
    accel: *const f64,
    len: usize,
    record_dt: f64,
    dt: f64,
    out: *mut *mut BwResponse,
) -> BwStatus {
    guard(|| {
        let osc = unsafe { osc.as_ref() }.ok_or_else(null)?;
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        if accel.is_null() {
            return Err(null());
        }
        let a = unsafe { std::slice::from_raw_parts(accel, len) }.to_vec();
        let motion = GroundMotion::new(record_dt, a).ffi()?;
        let h = simulate_sdof(&osc.params().ffi()?, &motion, dt).ffi()?;
        boxed_response(h, out);
        Ok(())
    })
}

/// Response to `amplitude · sin(omega t)` over `[0, duration]`.
///
/// # Safety
/// `osc` readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bw_simulate_sdof_sine(
    osc: *const BwOscillator,
    amplitude: f64,
    omega: f64,
    duration: f64,
    dt: f64,
    out: *mut *mut BwResponse,
) -> BwStatus {
    guard(|| {
        let osc = unsafe { osc.as_ref() }.ok_or_else(null)?;
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        let s = Sinusoid {
            amplitude,
            omega,
            duration,
        };
        let h = simulate_sdof(&osc.params().ffi()?, &s, dt).ffi()?;
        boxed_response(h, out);
        Ok(())
    })
}

/// Number of samples; 0 for NULL.
///
/// # Safety
/// `resp` must be NULL or a live response.
#[no_mangle]
pub unsafe extern "C" fn bw_response_len(resp: *const BwResponse) -> usize {
    unsafe { resp.as_ref() }.map_or(0, |r| r.history.len())
}

/// Copy one channel into `buf`, which must hold `bw_response_len` values.
///
/// # Safety
/// `resp` live, `buf` writable for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn bw_response_copy(
    resp: *const BwResponse,
    channel: BwChannel,
    buf: *mut f64,
    cap: usize,
) -> BwStatus {
    guard(|| {
        let r = unsafe { resp.as_ref() }.ok_or_else(null)?;
        if buf.is_null() {
            return Err(null());
        }
        let h = &r.history;
        let src: &[f64] = match channel {
            BwChannel::Time => &h.time,
            BwChannel::Displacement => &h.y[0],
            BwChannel::Velocity => &h.y_dot[0],
            BwChannel::AbsAcceleration => &h.y_ddot_abs[0],
            BwChannel::HystereticVariable => &h.r[0],
            BwChannel::HystereticForce => &h.f_r[0],
            BwChannel::HystereticEnergy => &h.e_h[0],
        };
        if cap < src.len() {
            return Err((
                BwStatus::BufferTooSmall,
                format!("need {} values, buffer holds {cap}", src.len()),
            ));
        }
        unsafe { std::slice::from_raw_parts_mut(buf, src.len()) }.copy_from_slice(src);
        Ok(())
    })
}

/// # Safety
/// `resp` must be NULL or returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bw_response_free(resp: *mut BwResponse) {
    if !resp.is_null() {
        drop(unsafe { Box::from_raw(resp) });
    }
}

/// Park-Ang index of a response.
///
/// # Safety
/// `resp` live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bw_park_ang(
    resp: *const BwResponse,
    y_ult: f64,
    delta_e: f64,
    f_y: f64,
    out: *mut f64,
) -> BwStatus {
    guard(|| {
        let r = unsafe { resp.as_ref() }.ok_or_else(null)?;
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        let cfg = DamageConfig::new(y_ult, delta_e, f_y).ffi()?;
        *out = park_ang_index(&r.history, 0, &cfg).ffi()?.index;
        Ok(())
    })
}

/// Range-normalized RMS error in percent.
///
/// # Safety
/// `reference` and `test` readable for `len` values, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bw_nrmse(reference: *const f64, test: *const f64, len: usize, out: *mut f64) -> BwStatus {
    guard(|| {
        if reference.is_null() || test.is_null() {
            return Err(null());
        }
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        let (a, b) = unsafe {
            (
                std::slice::from_raw_parts(reference, len),
                std::slice::from_raw_parts(test, len),
            )
        };
        *out = nrmse_percent(a, b).ffi()?;
        Ok(())
    })
}

/// Synthetic accelerogram (opaque).
pub struct BwMotion {
    motion: GroundMotion,
    pga: f64,
}

/// Synthesize one motion with the default medium-soil spectrum and
/// sampling. `pga_cap` in m/s²; pass 0 or a negative value for no cap.
///
/// # Safety
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bw_motion_synthesize(seed: u64, pga_cap: f64, out: *mut *mut BwMotion) -> BwStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        let cfg = SynthesisConfig {
            seed,
            pga_cap: (pga_cap > 0.0).then_some(pga_cap),
            ..SynthesisConfig::default()
        };
        let p = SpectrumParams::medium_soil(cfg.sample_rate);
        let m = synthesize(&p, &cfg).ffi()?;
        *out = Box::into_raw(Box::new(BwMotion {
            pga: m.metadata.pga,
            motion: m.motion,
        }));
        Ok(())
    })
}

/// # Safety
/// `m` must be NULL or a live motion.
#[no_mangle]
pub unsafe extern "C" fn bw_motion_len(m: *const BwMotion) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.motion.len())
}

/// Sample interval in seconds; NaN for NULL.
///
/// # Safety
/// `m` must be NULL or a live motion.
#[no_mangle]
pub unsafe extern "C" fn bw_motion_dt(m: *const BwMotion) -> f64 {
    unsafe { m.as_ref() }.map_or(f64::NAN, |m| m.motion.dt)
}

/// Peak absolute acceleration in m/s²; NaN for NULL.
///
/// # Safety
/// `m` must be NULL or a live motion.
#[no_mangle]
pub unsafe extern "C" fn bw_motion_pga(m: *const BwMotion) -> f64 {
    unsafe { m.as_ref() }.map_or(f64::NAN, |m| m.pga)
}

/// # Safety
/// `m` live, `buf` writable for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn bw_motion_copy(m: *const BwMotion, buf: *mut f64, cap: usize) -> BwStatus {
    guard(|| {
        let m = unsafe { m.as_ref() }.ok_or_else(null)?;
        if buf.is_null() {
            return Err(null());
        }
        let src = &m.motion.accel;
        if cap < src.len() {
            return Err((
                BwStatus::BufferTooSmall,
                format!("need {} values, buffer holds {cap}", src.len()),
            ));
        }
        unsafe { std::slice::from_raw_parts_mut(buf, src.len()) }.copy_from_slice(src);
        Ok(())
    })
}

/// # Safety
/// `m` must be NULL or returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bw_motion_free(m: *mut BwMotion) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}
