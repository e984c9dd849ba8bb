//! C ABI for defectchain.
//!
//! Objects are opaque handles created by `dc_*_new`-style functions and
//! released with the matching `dc_*_free`. Every fallible call returns a
//! [`DcStatus`]; on failure `dc_last_error_message` describes the problem
//! for the calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use defectchain::chain::{self, Boundary, ChainOperator, Sector};
use defectchain::checks;
use defectchain::fusion_core::{self, FusionCategory, ISING_STAR};
use defectchain::spectra::{self, Spectrum, SpectrumSource, TfimBasis, TfimConvention};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unsupported = 3,
    Numerical = 4,
    Internal = 5,
}

/// Boundary condition of the defect chain.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcBoundary {
    /// `*` on both outer edges.
    FixedStar = 0,
    /// Both alternation sectors.
    Free = 1,
    /// Free chain whose outer edges are `*`.
    FreeStar = 2,
    /// Free chain whose outer edges are group labels.
    FreeCategory = 3,
}

/// Number of identity terms in the reference Ising Hamiltonian.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcTfimConvention {
    /// 2n-1 terms, spectrally equal to the defect chain with 2n+1 edges.
    MatchDefectChain = 0,
    /// One term per site.
    PerSite = 1,
}

/// Fusion category.
pub struct DcCategory(FusionCategory);

/// Sparse Hermitian chain Hamiltonian.
pub struct DcOperator(ChainOperator);

/// Sorted eigenvalues.
pub struct DcSpectrum(Spectrum);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(DcStatus, String);

type FfiResult<T> = Result<T, Failure>;

fn invalid<E: std::fmt::Display>(e: E) -> Failure {
    Failure(DcStatus::InvalidArgument, e.to_string())
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> DcStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DcStatus::Internal
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| Failure(DcStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(Failure(DcStatus::NullPointer, format!("{what} is null")));
    }
    out.write(v);
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn dc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---------------------------------------------------------------- categories

/// Vec(Z/pZ) with trivial associator.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn dc_category_vec_zp(p: usize, out: *mut *mut DcCategory) -> DcStatus {
    guard(|| {
        let c = fusion_core::vec_zp(p).map_err(invalid)?;
        put(out, boxed(DcCategory(c)), "out")
    })
}

/// The Ising category with Frobenius–Schur sign `kappa` (±1).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn dc_category_ising(kappa: i32, out: *mut *mut DcCategory) -> DcStatus {
    guard(|| {
        let c = fusion_core::ising(kappa).map_err(invalid)?;
        put(out, boxed(DcCategory(c)), "out")
    })
}

/// Fusion data of Vec(Z/2Z) extended by the F1 defect, computed from the
/// tube algebra.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn dc_category_derive(kappa: i32, out: *mut *mut DcCategory) -> DcStatus {
    guard(|| {
        if kappa != 1 && kappa != -1 {
            return Err(invalid(format!("kappa must be +1 or -1, got {kappa}")));
        }
        let c = checks::derived_ising(kappa).map_err(|e| Failure(DcStatus::Unsupported, e))?;
        put(out, boxed(DcCategory(c)), "out")
    })
}

/// Parse a category from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_category_from_json(json: *const c_char, out: *mut *mut DcCategory) -> DcStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure(DcStatus::NullPointer, "json is null".into()));
        }
        let s = CStr::from_ptr(json).to_str().map_err(invalid)?;
        let c = FusionCategory::from_json_str(s).map_err(invalid)?;
        put(out, boxed(DcCategory(c)), "out")
    })
}

/// # Safety
/// `cat` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dc_category_free(cat: *mut DcCategory) {
    if !cat.is_null() {
        drop(Box::from_raw(cat));
    }
}

/// # Safety
/// `cat` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_category_n_labels(cat: *const DcCategory, out: *mut usize) -> DcStatus {
    guard(|| {
        let c = get(cat, "cat")?;
        put(out, c.0.n_labels(), "out")
    })
}

/// Number of violated pentagon equations (0 for consistent data).
///
/// # Safety
/// `cat` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_category_pentagon_violations(cat: *const DcCategory, out: *mut usize) -> DcStatus {
    guard(|| {
        let c = get(cat, "cat")?;
        put(out, fusion_core::check_pentagon(&c.0).violations.len(), "out")
    })
}

/// `F^{abc}_{d;e,f}` as a complex number; zero for inadmissible labels.
/// Labels are indices into the category's label list.
///
/// # Safety
/// `cat` must be a live handle, `labels` must point to six readable
/// indices, and `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_category_fsymbol(
    cat: *const DcCategory,
    labels: *const usize,
    re: *mut f64,
    im: *mut f64,
) -> DcStatus {
    guard(|| {
        let c = &get(cat, "cat")?.0;
        if labels.is_null() {
            return Err(Failure(DcStatus::NullPointer, "labels is null".into()));
        }
        let k = std::slice::from_raw_parts(labels, 6);
        if let Some(&bad) = k.iter().find(|&&l| l >= c.n_labels()) {
            return Err(invalid(format!("label index {bad} out of range")));
        }
        let v = c.f(k[0], k[1], k[2], k[3], k[4], k[5]).to_float();
        put(re, v.re, "re")?;
        put(im, v.im, "im")
    })
}

/// Whether two categories carry identical labels, fusion rules and
/// F-symbols (exact comparison).
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_category_same_data(a: *const DcCategory, b: *const DcCategory, out: *mut bool) -> DcStatus {
    guard(|| {
        let (a, b) = (get(a, "a")?, get(b, "b")?);
        put(out, a.0.same_data(&b.0), "out")
    })
}

// ---------------------------------------------------------------- operators

/// Defect-chain Hamiltonian on `n_edges` edges. `cat` must hold the Ising
/// labels, e.g. from [`dc_category_derive`].
///
/// # Safety
/// `cat` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_defect_chain_new(
    cat: *const DcCategory,
    n_edges: usize,
    boundary: DcBoundary,
    out: *mut *mut DcOperator,
) -> DcStatus {
    guard(|| {
        let c = get(cat, "cat")?;
        let b = match boundary {
            DcBoundary::FixedStar => Boundary::Fixed(ISING_STAR, ISING_STAR),
            DcBoundary::Free => Boundary::Free,
            DcBoundary::FreeStar => Boundary::Sector(Sector::Star),
            DcBoundary::FreeCategory => Boundary::Sector(Sector::Category),
        };
        let h = chain::defect_chain_hamiltonian(&c.0, n_edges, b).map_err(|e| match e {
            chain::ChainError::Unsupported(m) => Failure(DcStatus::Unsupported, m),
            other => invalid(other),
        })?;
        put(out, boxed(DcOperator(h)), "out")
    })
}

/// Open transverse-field Ising chain on `n_qubits` at the critical point.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_tfim_new(n_qubits: usize, convention: DcTfimConvention, out: *mut *mut DcOperator) -> DcStatus {
    guard(|| {
        let conv = match convention {
            DcTfimConvention::MatchDefectChain => TfimConvention::MatchDefectChain,
            DcTfimConvention::PerSite => TfimConvention::PerSite,
        };
        let h = spectra::tfim_operator(n_qubits, conv, TfimBasis::Z, &[]).map_err(invalid)?;
        put(out, boxed(DcOperator(h)), "out")
    })
}

/// # Safety
/// `op` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dc_operator_free(op: *mut DcOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_operator_dim(op: *const DcOperator, out: *mut usize) -> DcStatus {
    guard(|| {
        let h = get(op, "op")?;
        put(out, h.0.dim(), "out")
    })
}

/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_operator_nnz(op: *const DcOperator, out: *mut usize) -> DcStatus {
    guard(|| {
        let h = get(op, "op")?;
        put(out, h.0.nnz(), "out")
    })
}

/// Full spectrum by dense diagonalization of each connected block.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_diagonalize_dense(op: *const DcOperator, out: *mut *mut DcSpectrum) -> DcStatus {
    guard(|| {
        let h = get(op, "op")?;
        let s = spectra::diagonalize_dense(&h.0, SpectrumSource::default()).map_err(|e| match e {
            spectra::SpectraError::TooLarge(_) => Failure(DcStatus::Unsupported, e.to_string()),
            other => Failure(DcStatus::Numerical, other.to_string()),
        })?;
        put(out, boxed(DcSpectrum(s)), "out")
    })
}

// ---------------------------------------------------------------- spectra

/// # Safety
/// `spec` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dc_spectrum_free(spec: *mut DcSpectrum) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// # Safety
/// `spec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_spectrum_len(spec: *const DcSpectrum, out: *mut usize) -> DcStatus {
    guard(|| {
        let s = get(spec, "spec")?;
        put(out, s.0.eigenvalues.len(), "out")
    })
}

/// Copy the ascending eigenvalues into `buf`, which holds `len` doubles.
/// Fails unless `len` is at least the spectrum length.
///
/// # Safety
/// `spec` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn dc_spectrum_copy(spec: *const DcSpectrum, buf: *mut f64, len: usize) -> DcStatus {
    guard(|| {
        let s = get(spec, "spec")?;
        let ev = &s.0.eigenvalues;
        if buf.is_null() {
            return Err(Failure(DcStatus::NullPointer, "buf is null".into()));
        }
        if len < ev.len() {
            return Err(invalid(format!("buffer holds {len} values, spectrum has {}", ev.len())));
        }
        ptr::copy_nonoverlapping(ev.as_ptr(), buf, ev.len());
        Ok(())
    })
}

/// Number of levels within the degeneracy tolerance of the lowest one.
///
/// # Safety
/// `spec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_spectrum_ground_degeneracy(spec: *const DcSpectrum, out: *mut usize) -> DcStatus {
    guard(|| {
        let s = get(spec, "spec")?;
        put(out, s.0.ground_degeneracy(), "out")
    })
}

/// Ground energy of the open critical Ising chain on `n` sites (one
/// identity term per site), from its free-fermion solution.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_free_fermion_energy(n: usize, out: *mut f64) -> DcStatus {
    guard(|| {
        let e = spectra::free_fermion_energy(n).map_err(invalid)?;
        put(out, e, "out")
    })
}
