//! Topological invariants: lattice-gauge Chern numbers for the honeycomb
//! bath, chiral winding numbers for the 1D baths, and the (φ, m/t) phase
//! diagram with vacancy-bound-state detection.
//!
//! The Chern number uses plaquette-wise Berry flux on a discrete Brillouin
//! zone (field-strength construction): with link variables
//! U_μ(k) = ⟨u(k)|u(k+μ̂)⟩ the flux per plaquette is the principal argument
//! of the oriented link product, and the total divided by 2π is integer
//! once every plaquette flux is well inside (−π, π).

use crate::graph::{Boundary, SiteId, SiteLabel, Sublattice};
use crate::models::{analytic_gap, bloch_gap, build_model, BlochMap, ModelParams};
use crate::operator::assemble_bath;
use crate::spectra::eigenvalues_only;
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Default k-grid resolution for the Berry-flux sum.
pub const DEFAULT_NK: usize = 24;
/// Gap width below which the k-grid is doubled.
pub const NK_DOUBLING_GAP: f64 = 0.05;
/// Minimum gap for a Chern number to be defined at all.
pub const MIN_CHERN_GAP: f64 = 1e-6;
/// Numerical gaps below this (units of J) are recorded as unresolved in the
/// phase diagram: the vacancy state's envelope would exceed any desk-scale
/// mesh, so neither the bound state nor the Berry sum is trustworthy there.
pub const GAP_RESOLUTION_FLOOR: f64 = 0.03;
/// In-gap detection margin for the phase diagram (fraction of width/side).
pub const PHASE_BS_MARGIN: f64 = 0.02;
/// Mesh escalation schedule: (minimum gap width in J, cells per side).
/// Wider meshes hold the slowly decaying near-boundary bound states; cell
/// counts are multiples of 3 so the mesh k-grid contains the Dirac points
/// and sees the true band edges.
pub const MESH_SCHEDULE: [(f64, usize); 3] = [(0.2, 12), (0.1, 24), (0.0, 36)];

#[derive(Debug, Error)]
pub enum TopoError {
    #[error("bandgap is closed ({width:e} J); invariant undefined")]
    GapClosed { width: f64 },
    #[error("Berry-flux sum {0} is not near an integer; refine the k-grid")]
    NotInteger(f64),
    #[error("variant `{0}` has no such invariant")]
    WrongVariant(&'static str),
    #[error("not a chiral-symmetric point: {0}")]
    NonChiral(String),
    #[error(transparent)]
    Model(#[from] crate::models::ModelError),
    #[error(transparent)]
    Spectra(#[from] crate::spectra::SpectraError),
}

fn lower_band_vector(h: &Array2<Complex64>) -> [Complex64; 2] {
    // Lower eigenvector of a 2x2 Hermitian matrix, branch chosen for
    // numerical stability away from the poles of either form.
    let a = h[[0, 0]].re;
    let c = h[[1, 1]].re;
    let b = h[[0, 1]];
    let dz = 0.5 * (a - c);
    let r = (dz * dz + b.norm_sqr()).sqrt();
    let lam = 0.5 * (a + c) - r;
    // (H - λ) v = 0: v = (b, λ - a) or (λ - c, b*)
    let v1 = [b, Complex64::new(lam - a, 0.0)];
    let v2 = [Complex64::new(lam - c, 0.0), b.conj()];
    let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
    let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
    let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
    let inv = 1.0 / n.sqrt();
    [v[0] * inv, v[1] * inv]
}

/// Chern number of the lower Haldane band on an `nk` × `nk` grid.
pub fn chern_number(p: &ModelParams, nk: usize) -> Result<i32, TopoError> {
    if !matches!(p, ModelParams::Haldane { .. }) {
        return Err(TopoError::WrongVariant(p.variant_name()));
    }
    let width = analytic_gap(p)?.width;
    if width <= MIN_CHERN_GAP * p.j().max(f64::MIN_POSITIVE) {
        return Err(TopoError::GapClosed { width });
    }
    let map = BlochMap::build(p, nk)?;
    let mut u = vec![[Complex64::new(0.0, 0.0); 2]; nk * nk];
    for q1 in 0..nk {
        for q2 in 0..nk {
            u[q1 * nk + q2] = lower_band_vector(map.at(q1, q2));
        }
    }
    let link = |ka: usize, kb: usize| -> Complex64 {
        let (a, b) = (&u[ka], &u[kb]);
        a[0].conj() * b[0] + a[1].conj() * b[1]
    };
    let mut total = 0.0f64;
    for q1 in 0..nk {
        for q2 in 0..nk {
            let k00 = q1 * nk + q2;
            let k10 = ((q1 + 1) % nk) * nk + q2;
            let k01 = q1 * nk + (q2 + 1) % nk;
            let k11 = ((q1 + 1) % nk) * nk + (q2 + 1) % nk;
            let prod = link(k00, k10) * link(k10, k11) * link(k11, k01) * link(k01, k00);
            total += prod.arg();
        }
    }
    let c = total / (2.0 * std::f64::consts::PI);
    let rounded = c.round();
    if (c - rounded).abs() > 0.01 {
        return Err(TopoError::NotInteger(c));
    }
    Ok(rounded as i32)
}

/// k-grid for a given gap width, per the doubling rule.
pub fn nk_for_gap(width: f64, j: f64) -> usize {
    if width < NK_DOUBLING_GAP * j {
        2 * DEFAULT_NK
    } else {
        DEFAULT_NK
    }
}

const WINDING_NK: usize = 1024;

/// Winding number of the off-diagonal Bloch element at a chiral-symmetric
/// parameter point (SSH with δ ≠ 0; Creutz at α = ±π/2, |m| < 1).
///
/// Convention: the winding of q(k) as k advances 0 → 2π, with
/// q = H_ab for SSH and q = h_z − i h_x in the σ_y eigenbasis for Creutz.
pub fn winding_number(p: &ModelParams) -> Result<i32, TopoError> {
    p.validate()?;
    let q_of = |f1: f64| -> Result<Complex64, TopoError> {
        let h = crate::models::bloch_h(p, f1, 0.0)?;
        match p {
            ModelParams::Ssh { .. } => Ok(h[[0, 1]]),
            ModelParams::Creutz { .. } => {
                let hz = 0.5 * (h[[0, 0]].re - h[[1, 1]].re);
                let hx = h[[0, 1]].re;
                Ok(Complex64::new(hz, -hx))
            }
            _ => Err(TopoError::WrongVariant(p.variant_name())),
        }
    };
    match *p {
        ModelParams::Ssh { delta, .. } => {
            if delta == 0.0 {
                return Err(TopoError::NonChiral("ssh needs delta != 0".into()));
            }
        }
        ModelParams::Creutz { m, alpha, j, .. } => {
            if m.abs() >= 1.0 {
                return Err(TopoError::GapClosed { width: 0.0 });
            }
            let half_pi = std::f64::consts::FRAC_PI_2;
            if (alpha.abs() - half_pi).abs() > 1e-12 {
                return Err(TopoError::NonChiral(format!(
                    "creutz is chiral only at alpha = ±π/2, got {alpha}"
                )));
            }
            // Mechanical check: the trace part must be k-independent.
            for q in 0..8 {
                let h = crate::models::bloch_h(p, q as f64 / 8.0, 0.0)?;
                let trace_dev = 0.5 * (h[[0, 0]].re + h[[1, 1]].re) - p.omega_c();
                if trace_dev.abs() > 1e-12 * j.max(1.0) {
                    return Err(TopoError::NonChiral(format!(
                        "trace varies with k by {trace_dev:e}"
                    )));
                }
            }
        }
        _ => return Err(TopoError::WrongVariant(p.variant_name())),
    }
    let mut total = 0.0f64;
    let mut prev = q_of(0.0)?.arg();
    for q in 1..=WINDING_NK {
        let arg = q_of(q as f64 / WINDING_NK as f64)?.arg();
        let mut d = arg - prev;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        total += d;
        prev = arg;
    }
    let w = total / (2.0 * std::f64::consts::PI);
    let rounded = w.round();
    if (w - rounded).abs() > 0.01 {
        return Err(TopoError::NotInteger(w));
    }
    Ok(rounded as i32)
}

/// One grid point of the Haldane phase diagram.
#[derive(Debug, Clone, Serialize)]
pub struct PhasePoint {
    pub phi: f64,
    pub m_over_t: f64,
    /// Numerical bandgap width from dense Bloch sampling (units of the
    /// model's J).
    pub gap_width: f64,
    pub chern: i32,
    pub bs_exists: bool,
    /// False when the gap is too small to resolve on a desk-scale mesh;
    /// such points report chern = 0 and bs_exists = false.
    pub resolved: bool,
}

fn mesh_for_gap(width_in_j: f64) -> usize {
    for &(min_gap, cells) in &MESH_SCHEDULE {
        if width_in_j >= min_gap {
            return cells;
        }
    }
    MESH_SCHEDULE[MESH_SCHEDULE.len() - 1].1
}

/// Vacancy bound-state detection on a periodic mesh with the central a-site
/// punched out; the bulk punched this way acquires its only open boundary
/// at the vacancy itself.
pub fn vacancy_bs_exists(p: &ModelParams, cells: usize, margin: f64) -> Result<bool, TopoError> {
    // Round up to a multiple of 3: the band extrema live at the Dirac
    // points, and meshes that miss them misplace the gap edges.
    let cells = cells.div_ceil(3) * 3;
    let mesh = match *p {
        ModelParams::Haldane { m, t, phi, omega_c, j, .. } => ModelParams::Haldane {
            nx: cells,
            ny: cells,
            m,
            t,
            phi,
            omega_c,
            j,
            bc: Boundary::Periodic,
        },
        _ => return Err(TopoError::WrongVariant(p.variant_name())),
    };
    // Window from a Bloch sampling that contains the mesh's own k-grid, so
    // every bulk level lies outside it by construction.
    let gap = bloch_gap(&mesh, cells * 3)?;
    if gap.width <= 0.0 {
        return Ok(false);
    }
    let bath = build_model(&mesh)?;
    let center = bath
        .site_by_label(&SiteLabel {
            cell: [(cells / 2) as i64, (cells / 2) as i64],
            sub: Sublattice::A,
        })
        .unwrap_or(SiteId(0));
    let vac = bath.remove_site(center).map_err(crate::models::ModelError::from)?;
    let values = eigenvalues_only(&assemble_bath(&vac.bath))?;
    let lo = gap.lower_edge() + margin * gap.width;
    let hi = gap.upper_edge() - margin * gap.width;
    Ok(values.iter().any(|&v| v > lo && v < hi))
}

/// Scan the (φ, m/t) plane at fixed t: numerical gap, Chern number of the
/// lower band, and vacancy bound-state existence on an adaptive mesh.
/// Points are emitted in row-major order (φ outer, m/t inner) regardless of
/// how the parallel executor schedules them.
pub fn phase_diagram(
    phis: &[f64],
    m_over_ts: &[f64],
    t: f64,
    nk_base: usize,
) -> Vec<Result<PhasePoint, TopoError>> {
    let grid: Vec<(f64, f64)> = phis
        .iter()
        .flat_map(|&phi| m_over_ts.iter().map(move |&mt| (phi, mt)))
        .collect();
    grid.par_iter()
        .map(|&(phi, m_over_t)| {
            let p = ModelParams::Haldane {
                nx: 4,
                ny: 4,
                m: m_over_t * t,
                t,
                phi,
                omega_c: 0.0,
                j: 1.0,
                bc: Boundary::Periodic,
            };
            let gap = bloch_gap(&p, 240)?;
            if gap.width < GAP_RESOLUTION_FLOOR {
                return Ok(PhasePoint {
                    phi,
                    m_over_t,
                    gap_width: gap.width,
                    chern: 0,
                    bs_exists: false,
                    resolved: false,
                });
            }
            let nk = if gap.width < NK_DOUBLING_GAP { 2 * nk_base } else { nk_base };
            let chern = chern_number(&p, nk)?;
            let cells = mesh_for_gap(gap.width);
            let bs_exists = vacancy_bs_exists(&p, cells, PHASE_BS_MARGIN)?;
            Ok(PhasePoint {
                phi,
                m_over_t,
                gap_width: gap.width,
                chern,
                bs_exists,
                resolved: true,
            })
        })
        .collect()
}
