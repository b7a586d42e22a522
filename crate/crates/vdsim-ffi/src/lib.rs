//! C ABI for the vdsim coupled-cavity simulator.
//!
//! Handles are opaque; every fallible call returns a [`VdsimStatus`] and a
//! human-readable message is kept per thread, retrievable with
//! [`vdsim_last_error`]. Strings returned by the library are owned by the
//! caller and must be released with [`vdsim_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use vdsim::graph::{AtomSpec, BathGraph, Boundary, SiteId};
use vdsim::models::{build_model, ModelParams};
use vdsim::operator::assemble_bath;
use vdsim::spectra::{diagonalize, eigenvalues_only};
use vdsim::vds::make_vds;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum VdsimStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    NoSuchState = 3,
    NumericalFailure = 4,
}

/// Opaque bath-graph handle.
pub struct VdsimBath {
    bath: BathGraph,
}

/// Dressed-state summary: the atom-frequency eigenvalue that was dressed,
/// the mixing angles, and the full-Hamiltonian eigen-residual.
#[repr(C)]
pub struct VdsimVds {
    pub energy: f64,
    pub theta: f64,
    pub phi: f64,
    pub residual: f64,
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn vdsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string (do not free).
#[no_mangle]
pub extern "C" fn vdsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Release a string allocated by this library.
///
/// # Safety
/// `s` must have been returned by a vdsim function and not freed before.
#[no_mangle]
pub unsafe extern "C" fn vdsim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Release a bath handle.
///
/// # Safety
/// `bath` must have been returned by a vdsim constructor and not freed
/// before.
#[no_mangle]
pub unsafe extern "C" fn vdsim_bath_free(bath: *mut VdsimBath) {
    if !bath.is_null() {
        drop(Box::from_raw(bath));
    }
}

fn emit(bath: BathGraph, out: *mut *mut VdsimBath) -> VdsimStatus {
    unsafe {
        *out = Box::into_raw(Box::new(VdsimBath { bath }));
    }
    VdsimStatus::Ok
}

fn build(p: ModelParams, out: *mut *mut VdsimBath) -> VdsimStatus {
    if out.is_null() {
        return VdsimStatus::NullArgument;
    }
    match build_model(&p) {
        Ok(bath) => emit(bath, out),
        Err(e) => {
            set_error(&e.to_string());
            VdsimStatus::InvalidArgument
        }
    }
}

fn boundary(periodic: bool) -> Boundary {
    if periodic {
        Boundary::Periodic
    } else {
        Boundary::Open
    }
}

/// Tight-binding chain with −J hopping (dispersion ω_c − 2J cos k).
#[no_mangle]
pub extern "C" fn vdsim_bath_chain(
    sites: usize,
    omega_c: f64,
    j: f64,
    periodic: bool,
    out: *mut *mut VdsimBath,
) -> VdsimStatus {
    build(ModelParams::Chain { n: sites, omega_c, j, bc: boundary(periodic) }, out)
}

/// SSH chain: intracell J(1−δ), intercell J(1+δ).
#[no_mangle]
pub extern "C" fn vdsim_bath_ssh(
    cells: usize,
    delta: f64,
    omega_c: f64,
    j: f64,
    periodic: bool,
    out: *mut *mut VdsimBath,
) -> VdsimStatus {
    build(ModelParams::Ssh { n: cells, delta, omega_c, j, bc: boundary(periodic) }, out)
}

/// Creutz ladder: vertical −2mJ, diagonal J, horizontals J e^{∓iα}.
#[no_mangle]
pub extern "C" fn vdsim_bath_creutz(
    cells: usize,
    m: f64,
    alpha: f64,
    omega_c: f64,
    j: f64,
    periodic: bool,
    out: *mut *mut VdsimBath,
) -> VdsimStatus {
    build(ModelParams::Creutz { n: cells, m, alpha, omega_c, j, bc: boundary(periodic) }, out)
}

/// Haldane honeycomb with bandgap ||m| − 3√3 t|sinφ|| J.
#[no_mangle]
pub extern "C" fn vdsim_bath_haldane(
    nx: usize,
    ny: usize,
    m: f64,
    t: f64,
    phi: f64,
    omega_c: f64,
    j: f64,
    periodic: bool,
    out: *mut *mut VdsimBath,
) -> VdsimStatus {
    build(
        ModelParams::Haldane { nx, ny, m, t, phi, omega_c, j, bc: boundary(periodic) },
        out,
    )
}

/// Parse a bath from its JSON schema.
///
/// # Safety
/// `json` must be a valid NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn vdsim_bath_from_json(
    json: *const c_char,
    out: *mut *mut VdsimBath,
) -> VdsimStatus {
    if json.is_null() || out.is_null() {
        return VdsimStatus::NullArgument;
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("config text is not valid UTF-8");
            return VdsimStatus::InvalidArgument;
        }
    };
    match vdsim::io::bath_from_json(text) {
        Ok(bath) => emit(bath, out),
        Err(e) => {
            set_error(&e.to_string());
            VdsimStatus::InvalidArgument
        }
    }
}

/// Serialize a bath to its JSON schema; the returned string is owned by the
/// caller (release with `vdsim_string_free`).
///
/// # Safety
/// `bath` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn vdsim_bath_to_json(bath: *const VdsimBath) -> *mut c_char {
    if bath.is_null() {
        return std::ptr::null_mut();
    }
    match vdsim::io::bath_to_json(&(*bath).bath) {
        Ok(s) => CString::new(s).map(CString::into_raw).unwrap_or(std::ptr::null_mut()),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Number of cavities.
///
/// # Safety
/// `bath` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn vdsim_bath_site_count(bath: *const VdsimBath) -> usize {
    if bath.is_null() {
        return 0;
    }
    (*bath).bath.site_count()
}

/// New bath with `site` deleted along with every coupling touching it.
///
/// # Safety
/// `bath` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn vdsim_bath_remove_site(
    bath: *const VdsimBath,
    site: usize,
    out: *mut *mut VdsimBath,
) -> VdsimStatus {
    if bath.is_null() || out.is_null() {
        return VdsimStatus::NullArgument;
    }
    match (*bath).bath.remove_site(SiteId(site)) {
        Ok(vac) => emit(vac.bath, out),
        Err(e) => {
            set_error(&e.to_string());
            VdsimStatus::InvalidArgument
        }
    }
}

/// Ascending eigenvalues of the bath Hamiltonian. `values` must hold
/// `vdsim_bath_site_count(bath)` doubles.
///
/// # Safety
/// `bath` must be a live handle; `values` must point to enough space.
#[no_mangle]
pub unsafe extern "C" fn vdsim_bath_eigenvalues(
    bath: *const VdsimBath,
    values: *mut f64,
    len: usize,
) -> VdsimStatus {
    if bath.is_null() || values.is_null() {
        return VdsimStatus::NullArgument;
    }
    let m = (*bath).bath.site_count();
    if len < m {
        set_error(&format!("buffer holds {len} values, bath has {m} sites"));
        return VdsimStatus::InvalidArgument;
    }
    match eigenvalues_only(&assemble_bath(&(*bath).bath)) {
        Ok(vals) => {
            std::ptr::copy_nonoverlapping(vals.as_ptr(), values, m);
            VdsimStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            VdsimStatus::NumericalFailure
        }
    }
}

/// Dress an atom (frequency ω₀, coupling g, attached at `site`) with the
/// vacancy eigenstate nearest ω₀. Fails with `NoSuchState` when the vacancy
/// spectrum has no level within `tol` of ω₀.
///
/// # Safety
/// `bath` must be a live handle; `out` must point to a `VdsimVds`.
#[no_mangle]
pub unsafe extern "C" fn vdsim_vds_at(
    bath: *const VdsimBath,
    site: usize,
    omega0: f64,
    g: f64,
    tol: f64,
    out: *mut VdsimVds,
) -> VdsimStatus {
    if bath.is_null() || out.is_null() {
        return VdsimStatus::NullArgument;
    }
    let b = &(*bath).bath;
    let vac = match b.remove_site(SiteId(site)) {
        Ok(v) => v,
        Err(e) => {
            set_error(&e.to_string());
            return VdsimStatus::InvalidArgument;
        }
    };
    let es = match diagonalize(&assemble_bath(&vac.bath)) {
        Ok(es) => es,
        Err(e) => {
            set_error(&e.to_string());
            return VdsimStatus::NumericalFailure;
        }
    };
    let nearest = es
        .values()
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - omega0).abs().partial_cmp(&(b.1 - omega0).abs()).unwrap());
    let Some((k, &energy)) = nearest else {
        set_error("empty vacancy spectrum");
        return VdsimStatus::NoSuchState;
    };
    if (energy - omega0).abs() > tol {
        set_error(&format!(
            "no vacancy level within {tol:e} of {omega0} (nearest at {energy})"
        ));
        return VdsimStatus::NoSuchState;
    }
    let atom = AtomSpec::new(energy, g, SiteId(site));
    match make_vds(b, &atom, &vac, &es.vector(k).to_vec()) {
        Ok(ds) => {
            let residual = match vdsim::vds::verify_vds(&ds, b, &atom) {
                Ok(r) => r,
                Err(e) => {
                    set_error(&e.to_string());
                    return VdsimStatus::NumericalFailure;
                }
            };
            *out = VdsimVds { energy, theta: ds.theta, phi: ds.phi, residual };
            VdsimStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            VdsimStatus::NumericalFailure
        }
    }
}

/// Chern number of the lower Haldane band (k-grid `nk` × `nk`).
#[no_mangle]
pub extern "C" fn vdsim_chern_haldane(
    m: f64,
    t: f64,
    phi: f64,
    nk: usize,
    out: *mut i32,
) -> VdsimStatus {
    if out.is_null() {
        return VdsimStatus::NullArgument;
    }
    let p = ModelParams::Haldane {
        nx: 3,
        ny: 3,
        m,
        t,
        phi,
        omega_c: 0.0,
        j: 1.0,
        bc: Boundary::Periodic,
    };
    match vdsim::topo::chern_number(&p, nk.max(8)) {
        Ok(c) => {
            unsafe { *out = c };
            VdsimStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            VdsimStatus::NumericalFailure
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimer_through_the_c_surface() {
        let mut bath: *mut VdsimBath = std::ptr::null_mut();
        // A dimer is a 2-site open chain.
        let st = vdsim_bath_chain(2, 0.0, 1.0, false, &mut bath);
        assert!(st == VdsimStatus::Ok);
        unsafe {
            assert_eq!(vdsim_bath_site_count(bath), 2);
            let mut vals = [0.0f64; 2];
            assert!(vdsim_bath_eigenvalues(bath, vals.as_mut_ptr(), 2) == VdsimStatus::Ok);
            assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);

            let mut vds = VdsimVds { energy: 0.0, theta: 0.0, phi: 0.0, residual: 1.0 };
            let st = vdsim_vds_at(bath, 0, 0.0, 1.0, 1e-6, &mut vds);
            assert!(st == VdsimStatus::Ok);
            assert!((vds.theta.tan() - 1.0).abs() < 1e-12);
            assert!(vds.residual <= 1e-10);
            vdsim_bath_free(bath);
        }
    }

    #[test]
    fn json_roundtrip_and_errors() {
        let mut bath: *mut VdsimBath = std::ptr::null_mut();
        assert!(vdsim_bath_ssh(4, 0.5, 0.0, 1.0, true, &mut bath) == VdsimStatus::Ok);
        unsafe {
            let json = vdsim_bath_to_json(bath);
            assert!(!json.is_null());
            let mut back: *mut VdsimBath = std::ptr::null_mut();
            assert!(vdsim_bath_from_json(json, &mut back) == VdsimStatus::Ok);
            assert_eq!(vdsim_bath_site_count(back), 8);
            vdsim_string_free(json);
            vdsim_bath_free(back);
            vdsim_bath_free(bath);
        }
        // Invalid parameters surface as a status + message.
        let mut bad: *mut VdsimBath = std::ptr::null_mut();
        let st = vdsim_bath_creutz(4, 1.5, 0.0, 0.0, 1.0, true, &mut bad);
        assert!(st == VdsimStatus::InvalidArgument);
        unsafe {
            let msg = CStr::from_ptr(vdsim_last_error());
            assert!(msg.to_str().unwrap().contains("|m| <= 1"));
        }
    }

    #[test]
    fn chern_through_the_c_surface() {
        let mut c = 0i32;
        let st = vdsim_chern_haldane(0.0, 0.1, std::f64::consts::FRAC_PI_2, 24, &mut c);
        assert!(st == VdsimStatus::Ok);
        assert_eq!(c.abs(), 1);
    }
}
