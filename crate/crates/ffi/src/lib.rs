//! C ABI over the `openchain` library.
//!
//! A chain is created with [`oc_chain_new`], queried through the other
//! `oc_chain_*` functions and released with [`oc_chain_free`]. Every fallible
//! call returns an [`OcStatus`]; on failure a message is kept per thread and
//! can be copied out with [`oc_last_error_message`]. Sites and bonds are
//! 1-based, levels are 0-based (0 is the ground level).

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use openchain::entanglement::{bond_profile_of, su2_measure, Measure};
use openchain::hamiltonian::bond_operators;
use openchain::observables::bond_expectations_with;
use openchain::thermal::RootTerm;
use openchain::{ChainSpec, Error, SolvedChain, SpinKind, ThermalChain};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ComputationFailed = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OcSpin {
    Half = 1,
    One = 2,
}

/// Which max-term argument a threshold temperature is the root of.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OcRootTerm {
    Swap = 0,
    SquaredMoment = 1,
    Singlet = 2,
}

/// Two-site expectation values `<S_i.S_j>`, `<(S_i.S_j)^2>` and `<P_ij>`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OcBondExpectations {
    pub heisenberg: f64,
    pub heisenberg_sq: f64,
    pub swap: f64,
    /// Concurrence for spin 1/2, negativity for spin 1.
    pub entanglement: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OcThreshold {
    /// Midpoint of the final bracket.
    pub temperature: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub iterations: usize,
    pub term: OcRootTerm,
}

/// Opaque handle to a diagonalized chain.
pub struct OcChain {
    solved: SolvedChain,
    thermal: ThermalChain,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(OcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status =
            if e.is_invalid_input() { OcStatus::InvalidArgument } else { OcStatus::ComputationFailed };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(OcStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OcStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            OcStatus::Panic
        }
    }
}

/// # Safety
/// `chain` must be null or a live handle from [`oc_chain_new`].
unsafe fn chain_ref<'a>(chain: *const OcChain) -> Result<&'a OcChain, Failure> {
    chain.as_ref().ok_or_else(|| null("chain"))
}

/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Builds and diagonalizes an open chain. `spin` is an [`OcSpin`] value. On
/// success `*out` owns a new handle that must be released with
/// [`oc_chain_free`].
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn oc_chain_new(
    spin: u32,
    length: usize,
    coupling: f64,
    out: *mut *mut OcChain,
) -> OcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spin = match spin {
            s if s == OcSpin::Half as u32 => SpinKind::Half,
            s if s == OcSpin::One as u32 => SpinKind::One,
            other => return Err(Error::UnsupportedSpin(other.to_string()).into()),
        };
        let solved = SolvedChain::new(ChainSpec::new(spin, length, coupling)?)?;
        let thermal = ThermalChain::from_spectrum(solved.spectrum.clone());
        out.write(Box::into_raw(Box::new(OcChain { solved, thermal })));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `chain` must be null or a handle from [`oc_chain_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oc_chain_free(chain: *mut OcChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Number of distinct energy levels.
///
/// # Safety
/// `chain` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn oc_chain_level_count(chain: *const OcChain, out: *mut usize) -> OcStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        write_out(out, c.solved.levels.len(), "out")
    })
}

/// Energy and degeneracy of level `level`. Either output may be null.
///
/// # Safety
/// `chain` must be a live handle; non-null outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn oc_chain_level(
    chain: *const OcChain,
    level: usize,
    energy: *mut f64,
    degeneracy: *mut usize,
) -> OcStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        let levels = &c.solved.levels;
        let l = levels.get(level).ok_or(Error::LevelOutOfRange { index: level, count: levels.len() })?;
        if !energy.is_null() {
            energy.write(l.energy);
        }
        if !degeneracy.is_null() {
            degeneracy.write(l.degeneracy());
        }
        Ok(())
    })
}

/// Bond expectations in the equal mixture over level `level`.
///
/// # Safety
/// `chain` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn oc_chain_bond_expectations(
    chain: *const OcChain,
    level: usize,
    i: usize,
    j: usize,
    out: *mut OcBondExpectations,
) -> OcStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        let ops = bond_operators(c.solved.basis(), i, j)?;
        let be = bond_expectations_with(&c.solved.level_state(level)?, &ops)?;
        let value = OcBondExpectations {
            heisenberg: be.heisenberg,
            heisenberg_sq: be.heisenberg_sq,
            swap: be.swap,
            entanglement: su2_measure(&be),
        };
        write_out(out, value, "out")
    })
}

/// Nearest-neighbour entanglement profile of level `level`: `L - 1` values,
/// bond `(k, k+1)` at index `k - 1`. `*written` always receives the required
/// length; if `capacity` is smaller nothing is copied and
/// `OC_STATUS_BUFFER_TOO_SMALL` is returned. `values` may be null when
/// `capacity` is 0.
///
/// # Safety
/// `chain` must be a live handle, `values` valid for `capacity` writes and
/// `written` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn oc_chain_profile(
    chain: *const OcChain,
    level: usize,
    values: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> OcStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        let spec = c.solved.spec();
        let needed = spec.length() - 1;
        write_out(written, needed, "written")?;
        if capacity < needed {
            return Err(Failure(
                OcStatus::BufferTooSmall,
                format!("profile needs {needed} values, buffer holds {capacity}"),
            ));
        }
        if values.is_null() {
            return Err(null("values"));
        }
        let p = bond_profile_of(&c.solved, level, Measure::for_spin(spec.spin()))?;
        std::slice::from_raw_parts_mut(values, needed).copy_from_slice(&p.values);
        Ok(())
    })
}

/// Thermal concurrence (spin 1/2) or negativity (spin 1) of pair `(i, j)`.
///
/// # Safety
/// `chain` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn oc_chain_thermal_measure(
    chain: *const OcChain,
    i: usize,
    j: usize,
    temperature: f64,
    out: *mut f64,
) -> OcStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        let v = c.thermal.measure(i, j, temperature)?;
        write_out(out, v, "out")
    })
}

/// Temperature above which pair `(i, j)` is no longer entangled, bisected to
/// bracket width `tol`.
///
/// # Safety
/// `chain` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn oc_chain_threshold(
    chain: *const OcChain,
    i: usize,
    j: usize,
    tol: f64,
    out: *mut OcThreshold,
) -> OcStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        let r = c.thermal.threshold(i, j, tol)?;
        let term = match r.term {
            RootTerm::Swap => OcRootTerm::Swap,
            RootTerm::SquaredMoment => OcRootTerm::SquaredMoment,
            RootTerm::Singlet => OcRootTerm::Singlet,
        };
        let value = OcThreshold {
            temperature: r.temperature,
            bracket_lo: r.bracket.0,
            bracket_hi: r.bracket.1,
            iterations: r.iterations,
            term,
        };
        write_out(out, value, "out")
    })
}

/// Copies the calling thread's last error message into `buf` as a
/// nul-terminated string, truncating to fit. Returns the full message length
/// in bytes excluding the terminator, or 0 if there is none. `buf` may be null
/// when `capacity` is 0.
///
/// # Safety
/// `buf` must be valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn oc_last_error_message(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && capacity > 0 {
                buf.write(0);
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            buf.add(n).write(0);
        }
        bytes.len()
    })
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn oc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
