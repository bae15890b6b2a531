//! C ABI for the `wstate` toolkit.
//!
//! Circuits and states cross the boundary as opaque heap handles that the
//! caller releases with `ws_circuit_free` / `ws_state_free`. Every fallible
//! call returns a [`WsStatus`]; on failure `ws_last_error_message` describes
//! the most recent error on the calling thread. Strings returned through
//! out-parameters are owned by the caller and released with `ws_string_free`.
//!
//! The header `include/wstate.h` is generated by cbindgen at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wstate::analysis::resource_report;
use wstate::simulator::{w_reference_on, SimConfig, Simulator};
use wstate::synthesis::split_angle;
use wstate::{format, BackendChoice, Circuit, Error, Level, QuantumState};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    UnsupportedSize = 4,
    Capacity = 5,
    InvalidLowering = 6,
    Utf8 = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsLevel {
    Composite = 0,
    CzLevel = 1,
    Elementary = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsBackend {
    Dense = 0,
    Sparse = 1,
    Auto = 2,
}

/// Closed-form counts of the n-qubit construction.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WsCounts {
    pub total_two_qubit: usize,
    pub f_gates: usize,
    pub cnot_gates: usize,
}

/// Per-kind tally of a circuit.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WsGateCounts {
    pub f: usize,
    pub cnot: usize,
    pub cz: usize,
    pub rot: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WsResourceReport {
    pub n: usize,
    pub counts: WsCounts,
    pub elementary_cnots: usize,
    pub gate_success_prob: f64,
    pub log10_success_probability: f64,
}

/// Opaque circuit handle.
pub struct WsCircuit(Circuit);

/// Opaque state handle.
pub struct WsState(QuantumState);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

struct Fail(WsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Capacity { .. } => WsStatus::Capacity,
            Error::Parse { .. } => WsStatus::Parse,
            Error::UnsupportedSize(_) => WsStatus::UnsupportedSize,
            Error::InvalidLowering { .. } => WsStatus::InvalidLowering,
            _ => WsStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(WsStatus::NullPointer, format!("{what} is null"))
}

fn guard<F>(body: F) -> WsStatus
where
    F: FnOnce() -> Result<(), Fail>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => WsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside wstate".to_string());
            WsStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(WsStatus::Utf8, format!("{what}: {e}")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

fn backend_choice(b: WsBackend) -> BackendChoice {
    match b {
        WsBackend::Dense => BackendChoice::Dense,
        WsBackend::Sparse => BackendChoice::Sparse,
        WsBackend::Auto => BackendChoice::Auto,
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ws_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ws_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the n-qubit W-state circuit (n >= 3).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ws_circuit_build_w(n: usize, out: *mut *mut WsCircuit) -> WsStatus {
    guard(|| {
        let c = wstate::build_w_circuit(n)?;
        write_out(out, Box::into_raw(Box::new(WsCircuit(c))), "out")
    })
}

/// Parses `wcircuit 1` text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_circuit_parse(
    text: *const c_char,
    out: *mut *mut WsCircuit,
) -> WsStatus {
    guard(|| {
        let c = format::parse(read_str(text, "text")?)?;
        write_out(out, Box::into_raw(Box::new(WsCircuit(c))), "out")
    })
}

/// Serializes a circuit; free the result with `ws_string_free`.
///
/// # Safety
/// `circuit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_circuit_to_text(
    circuit: *const WsCircuit,
    out: *mut *mut c_char,
) -> WsStatus {
    guard(|| {
        let c = borrow(circuit, "circuit")?;
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(into_c_string(format::to_text(&c.0)));
        Ok(())
    })
}

/// # Safety
/// `circuit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_circuit_lower(
    circuit: *const WsCircuit,
    level: WsLevel,
    out: *mut *mut WsCircuit,
) -> WsStatus {
    guard(|| {
        let c = borrow(circuit, "circuit")?;
        let target = match level {
            WsLevel::Composite => Level::Composite,
            WsLevel::CzLevel => Level::CzLevel,
            WsLevel::Elementary => Level::Elementary,
        };
        let lowered = wstate::lower(&c.0, target)?;
        write_out(out, Box::into_raw(Box::new(WsCircuit(lowered))), "out")
    })
}

/// Qubit count, or 0 for a NULL handle.
///
/// # Safety
/// `circuit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_circuit_num_qubits(circuit: *const WsCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.0.n_qubits())
}

/// Gate count, or 0 for a NULL handle.
///
/// # Safety
/// `circuit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_circuit_num_gates(circuit: *const WsCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `circuit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_circuit_level(
    circuit: *const WsCircuit,
    out: *mut WsLevel,
) -> WsStatus {
    guard(|| {
        let level = match borrow(circuit, "circuit")?.0.level() {
            Level::Composite => WsLevel::Composite,
            Level::CzLevel => WsLevel::CzLevel,
            Level::Elementary => WsLevel::Elementary,
        };
        write_out(out, level, "out")
    })
}

/// # Safety
/// `circuit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_circuit_counts(
    circuit: *const WsCircuit,
    out: *mut WsGateCounts,
) -> WsStatus {
    guard(|| {
        let counts = borrow(circuit, "circuit")?.0.counts();
        write_out(
            out,
            WsGateCounts {
                f: counts.f,
                cnot: counts.cnot,
                cz: counts.cz,
                rot: counts.rot,
            },
            "out",
        )
    })
}

/// # Safety
/// `circuit` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ws_circuit_free(circuit: *mut WsCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Basis state from `H`/`V` or `0`/`1` characters.
///
/// # Safety
/// `bits` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_state_basis(
    n: usize,
    bits: *const c_char,
    backend: WsBackend,
    out: *mut *mut WsState,
) -> WsStatus {
    guard(|| {
        let bits = read_str(bits, "bits")?;
        let s = Simulator::default().basis_state(n, bits, backend_choice(backend))?;
        write_out(out, Box::into_raw(Box::new(WsState(s))), "out")
    })
}

/// The reference W state on n >= 2 qubits (sparse).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_state_w_reference(n: usize, out: *mut *mut WsState) -> WsStatus {
    guard(|| {
        let config = SimConfig::default();
        let s = w_reference_on(n, wstate::Backend::Sparse, &config)?;
        write_out(out, Box::into_raw(Box::new(WsState(s))), "out")
    })
}

/// Runs `circuit` on `input`, producing a new state on the input's backend.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_simulate(
    circuit: *const WsCircuit,
    input: *const WsState,
    out: *mut *mut WsState,
) -> WsStatus {
    guard(|| {
        let c = borrow(circuit, "circuit")?;
        let s = borrow(input, "input")?;
        let result = Simulator::default().run(&c.0, &s.0)?;
        write_out(out, Box::into_raw(Box::new(WsState(result))), "out")
    })
}

/// # Safety
/// `state` must be a live handle; `bits` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ws_state_amplitude(
    state: *const WsState,
    bits: *const c_char,
    out: *mut f64,
) -> WsStatus {
    guard(|| {
        let s = borrow(state, "state")?;
        let a = s.0.amplitude_of(read_str(bits, "bits")?)?;
        write_out(out, a, "out")
    })
}

/// Stored nonzero amplitudes, or 0 for a NULL handle.
///
/// # Safety
/// `state` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_state_nnz(state: *const WsState) -> usize {
    state.as_ref().map_or(0, |s| s.0.nnz())
}

/// # Safety
/// `state` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_state_num_qubits(state: *const WsState) -> usize {
    state.as_ref().map_or(0, |s| s.0.n_qubits())
}

/// State dump text; free with `ws_string_free`.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_state_dump(state: *const WsState, out: *mut *mut c_char) -> WsStatus {
    guard(|| {
        let s = borrow(state, "state")?;
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(into_c_string(
            s.0.dump(SimConfig::default().prune_threshold),
        ));
        Ok(())
    })
}

/// # Safety
/// `state` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ws_state_free(state: *mut WsState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// `|<a|b>|^2`.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_fidelity(
    a: *const WsState,
    b: *const WsState,
    out: *mut f64,
) -> WsStatus {
    guard(|| {
        let a = borrow(a, "a")?;
        let b = borrow(b, "b")?;
        write_out(out, wstate::fidelity(&a.0, &b.0)?, "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_predicted_counts(n: usize, out: *mut WsCounts) -> WsStatus {
    guard(|| {
        let p = wstate::predicted_counts(n)?;
        write_out(
            out,
            WsCounts {
                total_two_qubit: p.total_two_qubit,
                f_gates: p.f_gates,
                cnot_gates: p.cnot_gates,
            },
            "out",
        )
    })
}

/// First half-wave plate angle in degrees for an n-qubit W state.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_first_plate_angle_deg(n: usize, out: *mut f64) -> WsStatus {
    guard(|| {
        if n < 3 {
            return Err(Error::UnsupportedSize(n).into());
        }
        write_out(out, split_angle(n).to_degrees() / 4.0, "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_resource_report(
    n: usize,
    gate_success_prob: f64,
    out: *mut WsResourceReport,
) -> WsStatus {
    guard(|| {
        let r = resource_report(n, gate_success_prob)?;
        write_out(
            out,
            WsResourceReport {
                n: r.n,
                counts: WsCounts {
                    total_two_qubit: r.counts.total_two_qubit,
                    f_gates: r.counts.f_gates,
                    cnot_gates: r.counts.cnot_gates,
                },
                elementary_cnots: r.elementary_cnots,
                gate_success_prob: r.gate_success_prob,
                log10_success_probability: r.log10_success_probability,
            },
            "out",
        )
    })
}
