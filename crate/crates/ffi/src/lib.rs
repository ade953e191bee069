//! C interface to `openmap`.
//!
//! Every function returns an [`OmStatus`]. On failure a message is kept per
//! thread and can be read with [`om_last_error_message`]. Handles are opaque
//! and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use openmap::analysis::{discord, g2_of_trajectory, Measured};
use openmap::dynamics::{trajectory, TimeGrid};
use openmap::linalg::{c, ComplexMatrix};
use openmap::maps::{closed_form_eigs, extract_map};
use openmap::scenario::{parse_config, preset, CliError, ScenarioConfig};
use openmap::{DensityMatrix, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Unsupported = 4,
    OutOfRange = 5,
    Panic = 6,
}

/// Which qubit of a two-qubit state is measured by [`om_discord`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmMeasured {
    System = 0,
    Environment = 1,
}

/// A validated scenario.
pub struct OmScenario {
    config: ScenarioConfig,
}

/// Per-sample results of running a scenario.
pub struct OmResult {
    times: Vec<f64>,
    bloch: Vec<[f64; 3]>,
    eigenvalues: Vec<Result<[f64; 4], String>>,
    g2: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

type Failure = (OmStatus, String);

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            OmStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            OmStatus::Panic
        }
    }
}

fn core_failure(e: Error) -> Failure {
    let status = match e {
        Error::UnsupportedFamily(_) => OmStatus::Unsupported,
        Error::NotHermitian { .. } | Error::InvalidState(_) => OmStatus::Numerical,
        _ => OmStatus::InvalidArgument,
    };
    (status, e.to_string())
}

fn cli_failure(e: CliError) -> Failure {
    let status = match e {
        CliError::Numerical(_) => OmStatus::Numerical,
        _ => OmStatus::InvalidArgument,
    };
    (status, e.to_string())
}

fn null(what: &str) -> Failure {
    (OmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (OmStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn result_index<T>(items: &[T], index: usize) -> Result<&T, Failure> {
    items.get(index).ok_or_else(|| {
        (
            OmStatus::OutOfRange,
            format!("index {index} out of range for {} samples", items.len()),
        )
    })
}

/// Error message from the most recent call on this thread, empty after a
/// success. The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn om_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn om_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a JSON scenario, in the same format the CLI accepts.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn om_scenario_from_json(json: *const c_char, out: *mut *mut OmScenario) -> OmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let config = parse_config(str_arg(json, "json")?).map_err(cli_failure)?;
        *out = Box::into_raw(Box::new(OmScenario { config }));
        Ok(())
    })
}

/// Looks up a named preset.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn om_scenario_preset(name: *const c_char, out: *mut *mut OmScenario) -> OmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let name = str_arg(name, "name")?;
        let config = preset(name).ok_or_else(|| (OmStatus::InvalidArgument, format!("unknown preset {name:?}")))?;
        *out = Box::into_raw(Box::new(OmScenario { config }));
        Ok(())
    })
}

/// Replaces the time grid with `steps` points on `[start, end]`.
///
/// # Safety
/// `scenario` must come from one of the constructors and not be freed.
#[no_mangle]
pub unsafe extern "C" fn om_scenario_set_grid(scenario: *mut OmScenario, start: f64, end: f64, steps: usize) -> OmStatus {
    guard(|| {
        let s = out_arg(scenario, "scenario")?;
        s.config.grid = TimeGrid::new(start, end, steps).map_err(core_failure)?;
        Ok(())
    })
}

/// # Safety
/// `scenario` must be null or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn om_scenario_free(scenario: *mut OmScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Evolves the scenario and extracts the map at every grid time.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn om_scenario_run(scenario: *const OmScenario, out: *mut *mut OmResult) -> OmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let cfg = &scenario.as_ref().ok_or_else(|| null("scenario"))?.config;
        cfg.validate().map_err(cli_failure)?;
        let spec = cfg.initial_spec().map_err(cli_failure)?;
        let traj = trajectory(&spec, &cfg.params, cfg.topology, &cfg.grid).map_err(core_failure)?;
        let g2 = g2_of_trajectory(&traj).map_err(core_failure)?;
        let eigenvalues = traj
            .samples
            .iter()
            .map(|s| {
                extract_map(&traj, &traj.initial_bloch, s.t)
                    .map(|b| {
                        let mut ev = [0.0; 4];
                        ev.copy_from_slice(b.eigenvalues());
                        ev
                    })
                    .map_err(|e| e.to_string())
            })
            .collect();
        let result = OmResult {
            times: traj.samples.iter().map(|s| s.t).collect(),
            bloch: traj.samples.iter().map(|s| [s.bloch.x, s.bloch.y, s.bloch.z]).collect(),
            eigenvalues,
            g2: g2.samples.iter().map(|&(_, g)| g).collect(),
        };
        *out = Box::into_raw(Box::new(result));
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn om_result_free(result: *mut OmResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Number of grid samples.
///
/// # Safety
/// `result` must be a live handle and `len` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn om_result_len(result: *const OmResult, len: *mut usize) -> OmStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        *out_arg(len, "len")? = r.times.len();
        Ok(())
    })
}

/// Time of sample `index`.
///
/// # Safety
/// `result` must be a live handle and `t` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn om_result_time(result: *const OmResult, index: usize, t: *mut f64) -> OmStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        *out_arg(t, "t")? = *result_index(&r.times, index)?;
        Ok(())
    })
}

/// Bloch vector `(x, y, z)` of the impurity at sample `index`.
///
/// # Safety
/// `result` must be a live handle and `xyz` must point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn om_result_bloch(result: *const OmResult, index: usize, xyz: *mut f64) -> OmStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        if xyz.is_null() {
            return Err(null("xyz"));
        }
        let b = result_index(&r.bloch, index)?;
        ptr::copy_nonoverlapping(b.as_ptr(), xyz, 3);
        Ok(())
    })
}

/// Map eigenvalues at sample `index`, in descending order. Returns
/// `Unsupported` when the initial state is outside the templated family.
///
/// # Safety
/// `result` must be a live handle and `values` must point to 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn om_result_map_eigenvalues(result: *const OmResult, index: usize, values: *mut f64) -> OmStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        if values.is_null() {
            return Err(null("values"));
        }
        let ev = result_index(&r.eigenvalues, index)?
            .as_ref()
            .map_err(|m| (OmStatus::Unsupported, m.clone()))?;
        ptr::copy_nonoverlapping(ev.as_ptr(), values, 4);
        Ok(())
    })
}

/// Correlation `g2` at sample `index`.
///
/// # Safety
/// `result` must be a live handle and `g2` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn om_result_g2(result: *const OmResult, index: usize, g2: *mut f64) -> OmStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        *out_arg(g2, "g2")? = *result_index(&r.g2, index)?;
        Ok(())
    })
}

/// Closed-form spectrum of the tilted template, as `[lo1, hi1, lo2, hi2]`.
///
/// # Safety
/// `values` must point to 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn om_closed_form_eigs(a1: f64, b1: f64, b2: f64, b3: f64, values: *mut f64) -> OmStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let ev = closed_form_eigs(a1, b1, b2, b3);
        ptr::copy_nonoverlapping(ev.as_ptr(), values, 4);
        Ok(())
    })
}

/// Quantum discord in bits of a two-qubit density matrix given as 16
/// row-major real and imaginary parts.
///
/// # Safety
/// `re` and `im` must each point to 16 doubles and `value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn om_discord(re: *const f64, im: *const f64, measured: OmMeasured, value: *mut f64) -> OmStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("matrix"));
        }
        let value = out_arg(value, "value")?;
        let re = std::slice::from_raw_parts(re, 16);
        let im = std::slice::from_raw_parts(im, 16);
        let entries: Vec<_> = re.iter().zip(im).map(|(&a, &b)| c(a, b)).collect();
        let m = ComplexMatrix::from_row_major(4, 4, &entries).map_err(core_failure)?;
        let rho = DensityMatrix::new(m).map_err(|e| (OmStatus::InvalidArgument, e.to_string()))?;
        let which = match measured {
            OmMeasured::System => Measured::System,
            OmMeasured::Environment => Measured::Environment,
        };
        *value = discord(&rho, which).map_err(core_failure)?.value;
        Ok(())
    })
}
