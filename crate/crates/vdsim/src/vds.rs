//! Vacancy-seeded dressed states.
//!
//! A dressed state at exactly the bare atom frequency has a node on the
//! atom's cavity; its photonic part is an eigenstate ψ of the bath with
//! that cavity deleted, at the same energy. Given such a ψ, the bound
//! combination is
//!
//!   |Ψ⟩ = cos θ |e⟩ + e^{iφ} sin θ |ψ⟩,
//!   θ = arctan |η|,  φ = arg η,  η = −g / ⟨v|H_B|ψ⟩,
//!
//! and this module constructs it, validates it against the assembled
//! Hamiltonian, and probes the scenarios built on it (cavity-protected
//! bound states in the continuum, in-band node states, detuning response).

use crate::graph::{AtomSpec, BathGraph, Boundary, GraphError, SiteId, VacancyBath};
use crate::models::{build_model, ModelParams};
use crate::operator::{assemble_bath, assemble_full, boundary_element, OperatorError};
use crate::spectra::{diagonalize, GapInfo, SpectraError, DEGENERACY_TOL};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Required closeness of ψ to an eigenstate of H_{B_v} at ω₀.
pub const VDS_INPUT_RESIDUAL_TOL: f64 = 1e-8;
/// Node-property and normalization allowance on constructed states.
pub const NODE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum VdsError {
    #[error("input state is not an eigenstate of the vacancy bath at {omega0}: residual {residual:e}")]
    NotAnEigenstate { omega0: f64, residual: f64 },
    #[error("state has a vanishing boundary element: unbound/ill-conditioned dressed state (θ → π/2)")]
    ZeroBoundaryElement,
    #[error("no in-gap state found in the vacancy spectrum")]
    NoInGapState,
    #[error("frequency {0} sits at a band edge")]
    AtBandEdge(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Model(#[from] crate::models::ModelError),
}

/// Normalized atom-photon eigenstate at the bare atom frequency.
///
/// `psi` is indexed on the full bath B and carries the e^{iφ} sin θ factor,
/// so |ε|² + Σ|ψ_i|² = 1 and ψ_v = 0 explicitly.
#[derive(Debug, Clone, Serialize)]
pub struct DressedState {
    pub epsilon: Complex64,
    pub psi: Vec<Complex64>,
    pub theta: f64,
    pub phi: f64,
    pub eta: Complex64,
    pub energy: f64,
    pub atom_site: SiteId,
}

impl DressedState {
    /// Photonic part renormalized to unit norm (the bound state of B_v).
    pub fn normalized_photon(&self) -> Vec<Complex64> {
        let norm = self.psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return self.psi.clone();
        }
        self.psi.iter().map(|c| c / norm).collect()
    }

    /// Embed into the basis of `assemble_full(bath, [atom])`: sites first,
    /// then the atomic amplitude.
    pub fn embedded(&self) -> Vec<Complex64> {
        let mut x = self.psi.clone();
        x.push(self.epsilon);
        x
    }
}

/// Build the dressed state seeded by a normalized eigenstate `psi_bv` of
/// the vacancy bath at the atom frequency.
pub fn make_vds(
    bath: &BathGraph,
    atom: &AtomSpec,
    vac: &VacancyBath,
    psi_bv: &[Complex64],
) -> Result<DressedState, VdsError> {
    atom.validate(bath)?;
    let reduced = assemble_bath(&vac.bath);
    let norm = psi_bv.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let psi_n: Vec<Complex64> = psi_bv.iter().map(|c| c / norm).collect();
    let residual = reduced.eigen_residual(&psi_n, atom.omega0);
    if residual > VDS_INPUT_RESIDUAL_TOL {
        return Err(VdsError::NotAnEigenstate {
            omega0: atom.omega0,
            residual,
        });
    }
    let bd = boundary_element(bath, vac, &psi_n)?;
    if atom.g > 0.0 && bd.norm() == 0.0 {
        return Err(VdsError::ZeroBoundaryElement);
    }
    let eta = if atom.g == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        -Complex64::new(atom.g, 0.0) / bd
    };
    let theta = eta.norm().atan();
    let phi = if eta.norm() == 0.0 { 0.0 } else { eta.arg() };
    let scale = Complex64::from_polar(theta.sin(), phi);
    let psi = vac
        .embed(&psi_n)?
        .into_iter()
        .map(|c| c * scale)
        .collect();
    Ok(DressedState {
        epsilon: Complex64::new(theta.cos(), 0.0),
        psi,
        theta,
        phi,
        eta,
        energy: atom.omega0,
        atom_site: atom.site,
    })
}

/// ‖H x − ω₀ x‖ for the dressed state embedded in the full single-excitation
/// Hamiltonian.
pub fn verify_vds(ds: &DressedState, bath: &BathGraph, atom: &AtomSpec) -> Result<f64, VdsError> {
    let h = assemble_full(bath, std::slice::from_ref(atom))?;
    Ok(h.eigen_residual(&ds.embedded(), ds.energy))
}

/// Eigenvalues of B_v grouped by the degeneracy tolerance: the complete
/// list of atom frequencies at which a vacancy-seeded dressed state exists.
pub fn vds_candidates(bath: &BathGraph, v: SiteId) -> Result<Vec<(f64, usize)>, VdsError> {
    let vac = bath.remove_site(v)?;
    let es = diagonalize(&assemble_bath(&vac.bath))?;
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &val in es.values() {
        match out.last_mut() {
            Some((prev, mult)) if (val - *prev).abs() <= DEGENERACY_TOL => *mult += 1,
            _ => out.push((val, 1)),
        }
    }
    Ok(out)
}

/// Outcome of a bound-in-continuum scan on an open chain.
#[derive(Debug)]
pub struct BicScanResult {
    /// Whether the segment between the open end and the atom supports a
    /// mode at ω₀ (the discrete analogue of k₀ d = mπ).
    pub exists: bool,
    /// Eigenvalues of the s-site segment, for reporting.
    pub segment_levels: Vec<f64>,
    /// The bound dressed state when it exists.
    pub state: Option<DressedState>,
    /// Photon probability on sites beyond the atom (should be ~0 for a
    /// confined mode).
    pub leakage: f64,
}

/// Scan for a dressed state bound between a chain end and the atom.
///
/// The chain has `length` sites with open ends and −J hopping; the atom sits
/// at 0-based site `s`, leaving `s` sites strictly between it and the end.
/// A bound state at ω₀ exists iff the s-site segment has an eigenvalue
/// there; the photon is then confined to the segment even though ω₀ lies in
/// the band.
pub fn bic_scan(
    length: usize,
    s: usize,
    omega0: f64,
    omega_c: f64,
    j: f64,
    g: f64,
) -> Result<BicScanResult, VdsError> {
    if s == 0 || s + 1 >= length {
        return Err(VdsError::Model(crate::models::ModelError::BadParameter(
            format!("segment size {s} must satisfy 0 < s < length-1 = {}", length - 1),
        )));
    }
    let p = ModelParams::Chain { n: length, omega_c, j, bc: Boundary::Open };
    let bath = build_model(&p)?;
    let v = SiteId(s);
    let vac = bath.remove_site(v)?;

    // The segment spectrum decides existence; B_v is exactly block-diagonal.
    let seg = ModelParams::Chain { n: s.max(2), omega_c, j, bc: Boundary::Open };
    let (segment_levels, seg_vec) = if s == 1 {
        (vec![omega_c], vec![vec![Complex64::new(1.0, 0.0)]])
    } else {
        let es = diagonalize(&assemble_bath(&build_model(&seg)?))?;
        let vecs = (0..es.len()).map(|k| es.vector(k).to_vec()).collect();
        (es.values().to_vec(), vecs)
    };
    let tol = 1e-8 * j.abs().max(1.0);
    let hit = segment_levels.iter().position(|&e| (e - omega0).abs() <= tol);
    let Some(kidx) = hit else {
        return Ok(BicScanResult {
            exists: false,
            segment_levels,
            state: None,
            leakage: 0.0,
        });
    };

    // Embed the segment mode into B_v: segment sites 0..s map to the first
    // s slots of the reduced bath (site ordering is preserved by removal).
    let mut psi_bv = vec![Complex64::new(0.0, 0.0); vac.bath.site_count()];
    for (i, amp) in seg_vec[kidx].iter().enumerate() {
        let new = vac.old_to_new[i].expect("segment site kept");
        psi_bv[new] = *amp;
    }
    let atom = AtomSpec::new(omega0, g, v);
    let ds = make_vds(&bath, &atom, &vac, &psi_bv)?;
    let leakage: f64 = ds.psi[s + 1..].iter().map(|c| c.norm_sqr()).sum::<f64>()
        / ds.psi.iter().map(|c| c.norm_sqr()).sum::<f64>().max(f64::MIN_POSITIVE);
    Ok(BicScanResult {
        exists: true,
        segment_levels,
        state: Some(ds),
        leakage,
    })
}

/// One eigenstate entry of the node report.
#[derive(Debug, Clone, Serialize)]
pub struct NodeEntry {
    pub energy: f64,
    /// |ψ_v| of the normalized eigenstate.
    pub amp_at_v: f64,
    /// |ε|² atomic weight.
    pub atom_weight: f64,
    /// Squared overlap of the photonic part with the best sin(k·d) standing
    /// wave vanishing at v.
    pub sine_overlap: f64,
}

#[derive(Debug, Serialize)]
pub struct NodeReport {
    pub entries: Vec<NodeEntry>,
    /// Entries within the probe window around ω₀ that satisfy the node
    /// criterion |ψ_v| ≤ `NODE_AMP_TOL` and sine overlap ≥ 0.99.
    pub node_states_at_omega0: usize,
}

pub const NODE_AMP_TOL: f64 = 1e-6;
pub const SINE_OVERLAP_MIN: f64 = 0.99;

/// Inspect full-H eigenstates of a waveguide near ω₀ for standing waves
/// with a node on the atom.
///
/// The waveguide is a chain with the atom attached at `v`; in-band ω₀ is
/// required. With open ends and the atom dividing the chain into two equal
/// segments, each segment energy appears twice and resonant pairs of node
/// states form at ω₀; on a ring one standing wave per energy survives.
pub fn unbound_vds_check(
    bath: &BathGraph,
    atom: &AtomSpec,
    omega_c: f64,
    j: f64,
    window: f64,
) -> Result<NodeReport, VdsError> {
    let band_lo = omega_c - 2.0 * j;
    let band_hi = omega_c + 2.0 * j;
    let edge_margin = 0.05 * j;
    if atom.omega0 <= band_lo + edge_margin || atom.omega0 >= band_hi - edge_margin {
        return Err(VdsError::AtBandEdge(atom.omega0));
    }
    let m = bath.site_count();
    let es = diagonalize(&assemble_full(bath, std::slice::from_ref(atom))?)?;
    let v = atom.site.0;

    // Standing waves vanishing at v. On a ring: sin(k·d) with d the forward
    // ring distance from v. On an open chain the mirror splits the waveguide
    // in two, so the left and right segments carry independent sine modes;
    // the overlap is measured against the span of both.
    let templates_at = |k: f64| -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        if bath.meta().bc == Boundary::Periodic {
            out.push((0..m).map(|i| (k * ((i + m - v) % m) as f64).sin()).collect());
        } else {
            out.push(
                (0..m)
                    .map(|i| if i < v { (k * (v - i) as f64).sin() } else { 0.0 })
                    .collect(),
            );
            out.push(
                (0..m)
                    .map(|i| if i > v { (k * (i - v) as f64).sin() } else { 0.0 })
                    .collect(),
            );
        }
        out.retain_mut(|t| {
            let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-12 {
                return false;
            }
            for x in t.iter_mut() {
                *x /= norm;
            }
            true
        });
        out
    };

    let mut entries = Vec::new();
    let mut node_states = 0usize;
    for kidx in 0..es.len() {
        let e = es.values()[kidx];
        if (e - atom.omega0).abs() > window {
            continue;
        }
        let vec = es.vector(kidx);
        let amp_at_v = vec[v].norm();
        let atom_weight = vec[m].norm_sqr();
        let photon_norm: f64 = (0..m).map(|i| vec[i].norm_sqr()).sum();
        let ratio = ((omega_c - e) / (2.0 * j)).clamp(-1.0, 1.0);
        let k = ratio.acos();
        let mut best = 0.0f64;
        if photon_norm > 1e-24 {
            for kk in [k, std::f64::consts::PI - k] {
                // Segment templates have disjoint support, so the squared
                // projections onto the span just add.
                let ov: f64 = templates_at(kk)
                    .iter()
                    .map(|t| {
                        (0..m)
                            .map(|i| vec[i].conj() * t[i])
                            .sum::<Complex64>()
                            .norm_sqr()
                    })
                    .sum::<f64>()
                    / photon_norm;
                best = best.max(ov);
            }
        }
        if amp_at_v <= NODE_AMP_TOL && best >= SINE_OVERLAP_MIN {
            node_states += 1;
        }
        entries.push(NodeEntry {
            energy: e,
            amp_at_v,
            atom_weight,
            sine_overlap: best,
        });
    }
    Ok(NodeReport {
        entries,
        node_states_at_omega0: node_states,
    })
}

/// Fidelity of the frozen dressed-state template against the exact in-gap
/// bound state as the atom is detuned off the vacancy-mode energy.
#[derive(Debug, Clone, Serialize)]
pub struct RobustnessCurve {
    /// (δω, |⟨Ψ_exact|Ψ_template⟩|²); `None` when the bound state left the
    /// gap window at that detuning.
    pub points: Vec<(f64, Option<f64>)>,
    pub truncated: bool,
}

/// Sweep the atom frequency across `detunings` around the vacancy-mode
/// energy `omega_psi` and track how faithfully the exact in-gap state of
/// the full Hamiltonian follows the dressed-state template.
pub fn detuning_robustness(
    bath: &BathGraph,
    vac: &VacancyBath,
    psi_bv: &[Complex64],
    omega_psi: f64,
    g: f64,
    site: SiteId,
    gap: &GapInfo,
    detunings: &[f64],
) -> Result<RobustnessCurve, VdsError> {
    let template_atom = AtomSpec::new(omega_psi, g, site);
    let template = make_vds(bath, &template_atom, vac, psi_bv)?;
    let tvec = template.embedded();
    let mut points = Vec::with_capacity(detunings.len());
    let mut truncated = false;
    for &dw in detunings {
        let atom = AtomSpec::new(omega_psi + dw, g, site);
        let es = diagonalize(&assemble_full(bath, &[atom])?)?;
        // Exact in-gap states; pick the one closest to the template.
        let mut best: Option<f64> = None;
        for kidx in 0..es.len() {
            let e = es.values()[kidx];
            if !gap.contains(e) {
                continue;
            }
            let vec = es.vector(kidx);
            let ov = vec
                .iter()
                .zip(tvec.iter())
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
                .norm_sqr();
            best = Some(best.map_or(ov, |b: f64| b.max(ov)));
        }
        if best.is_none() {
            truncated = true;
        }
        points.push((dw, best));
    }
    Ok(RobustnessCurve { points, truncated })
}
