//! Dispersive atom-atom couplings mediated by vacancy-seeded bound states.
//!
//! With every atom tuned to the energy ω_ψ of the in-gap bound state that a
//! vacancy at its site would seed, the photon-exchange coupling between
//! atoms ν and ν' is
//!
//!   K_{ν'ν} = −(g²/2) ψ^ν_{ν'} / ⟨ν|H_B|ψ^ν⟩,
//!
//! where ψ^ν is that bound state (of B_ν, all other atoms absent). The
//! pairwise exchange element of the resulting spin Hamiltonian is K plus
//! its Hermitian-conjugate partner, i.e. 2 K_{ν'ν}, which is what the exact
//! two-atom splitting resolves: in-gap levels at ω₀ ± |2K|.

use crate::graph::{AtomSpec, BathGraph, SiteId, VacancyBath};
use crate::operator::{assemble_bath, assemble_full, boundary_element, OperatorError};
use crate::spectra::{diagonalize, find_ingap_states, GapInfo, SpectraError};
use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

/// Margin (fraction of gap width per side) used when isolating in-gap
/// bound states for the effective-coupling pipeline.
pub const EFF_GAP_MARGIN: f64 = 0.02;
/// Below this level distance the two-atom splitting is reported as
/// unresolved (lower bound only).
pub const SPLITTING_RESOLUTION: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum EffError {
    #[error("no in-gap bound state for a vacancy at site {0}")]
    NoVacancyBoundState(usize),
    #[error("expected a unique in-gap vacancy state at site {site}, found {count}")]
    AmbiguousVacancyState { site: usize, count: usize },
    #[error("vanishing boundary element at site {0}")]
    VanishingBoundary(usize),
    #[error("expected exactly two in-gap dressed levels, found {0}")]
    UnexpectedInGapCount(usize),
    #[error("atoms must share one coupling g; got {0} and {1}")]
    UnequalCouplings(f64, f64),
    #[error("need exactly two atoms, got {0}")]
    NotTwoAtoms(usize),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// In-gap bound state seeded by a vacancy at `site`.
#[derive(Debug, Clone)]
pub struct VacancyProfile {
    pub site: SiteId,
    /// Bound-state energy ω_ψ.
    pub omega: f64,
    /// Normalized state embedded on the full bath (zero at `site`).
    pub psi_on_bath: Vec<Complex64>,
    /// Same state indexed on B_ν.
    pub psi_reduced: Vec<Complex64>,
    pub vac: VacancyBath,
}

/// The unique in-gap eigenstate of the bath with a vacancy at `nu`.
pub fn vacancy_profile(
    bath: &BathGraph,
    nu: SiteId,
    gap: &GapInfo,
) -> Result<VacancyProfile, EffError> {
    let vac = bath.remove_site(nu)?;
    let es = diagonalize(&assemble_bath(&vac.bath))?;
    let ingap = find_ingap_states(&es, gap, EFF_GAP_MARGIN);
    match ingap.len() {
        0 => Err(EffError::NoVacancyBoundState(nu.0)),
        1 => {
            let (omega, view) = (ingap[0].0, ingap[0].1);
            let psi_reduced = view.to_vec();
            let psi_on_bath = vac.embed(&psi_reduced)?;
            Ok(VacancyProfile {
                site: nu,
                omega,
                psi_on_bath,
                psi_reduced,
                vac,
            })
        }
        n => Err(EffError::AmbiguousVacancyState { site: nu.0, count: n }),
    }
}

/// Effective coupling matrix over an atom registry.
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    pub k: Array2<Complex64>,
    pub atoms: Vec<AtomSpec>,
    /// ω_ψ per atom, for tuning checks.
    pub omegas: Vec<f64>,
}

/// K_{ν'ν} for every atom pair; diagonal zero.
pub fn coupling_matrix(
    bath: &BathGraph,
    atoms: &[AtomSpec],
    gap: &GapInfo,
) -> Result<CouplingMatrix, EffError> {
    for a in atoms.iter().skip(1) {
        if a.g != atoms[0].g {
            return Err(EffError::UnequalCouplings(atoms[0].g, a.g));
        }
    }
    let n = atoms.len();
    let mut k = Array2::zeros((n, n));
    let mut omegas = Vec::with_capacity(n);
    for (col, atom) in atoms.iter().enumerate() {
        let prof = vacancy_profile(bath, atom.site, gap)?;
        omegas.push(prof.omega);
        let bd = boundary_element(bath, &prof.vac, &prof.psi_reduced)?;
        if bd.norm() == 0.0 {
            return Err(EffError::VanishingBoundary(atom.site.0));
        }
        let pref = -Complex64::new(atom.g * atom.g / 2.0, 0.0) / bd;
        for (row, other) in atoms.iter().enumerate() {
            if row != col {
                k[[row, col]] = pref * prof.psi_on_bath[other.site.0];
            }
        }
    }
    Ok(CouplingMatrix {
        k,
        atoms: atoms.to_vec(),
        omegas,
    })
}

/// Two-atom coupling recovered from exact diagonalization.
#[derive(Debug, Clone)]
pub struct SplittingEstimate {
    /// |K| in the Eq.-style normalization (quarter of the full level
    /// splitting); an upper bound when `resolved` is false.
    pub magnitude: f64,
    /// arg K from the upper dressed eigenvector; absent when unresolved.
    pub phase: Option<f64>,
    /// Full distance between the two in-gap levels.
    pub raw_splitting: f64,
    pub resolved: bool,
}

/// Independent oracle: diagonalize the full two-atom Hamiltonian and read
/// the coupling off the in-gap doublet. The pairwise exchange element is
/// 2K, so the levels sit at ω₀ ± |2K| and |K| = (E₊ − E₋)/4.
pub fn splitting_oracle(
    bath: &BathGraph,
    atoms: &[AtomSpec],
    gap: &GapInfo,
) -> Result<SplittingEstimate, EffError> {
    if atoms.len() != 2 {
        return Err(EffError::NotTwoAtoms(atoms.len()));
    }
    let m = bath.site_count();
    let es = diagonalize(&assemble_full(bath, atoms)?)?;
    let ingap = find_ingap_states(&es, gap, EFF_GAP_MARGIN);
    if ingap.len() != 2 {
        return Err(EffError::UnexpectedInGapCount(ingap.len()));
    }
    let (e_lo, e_hi) = (ingap[0].0, ingap[1].0);
    let raw = e_hi - e_lo;
    if raw < SPLITTING_RESOLUTION {
        return Ok(SplittingEstimate {
            magnitude: raw / 4.0,
            phase: None,
            raw_splitting: raw,
            resolved: false,
        });
    }
    // Phase from the atomic amplitudes of the upper level. The exchange
    // element that carries the bound-state profile is the ν→ν' hop
    // ⟨e_{ν'}|H_eff|e_ν⟩ = 2K_{ν'ν}; with the two-level block
    // [[ω₀, 2K*], [2K, ω₀]] in the (e_ν, e_{ν'}) basis, the upper
    // eigenvector is (1, e^{+i arg K}).
    let upper = ingap[1].1;
    let (eps1, eps2) = (upper[m], upper[m + 1]);
    let phase = if eps1.norm() > 1e-12 && eps2.norm() > 1e-12 {
        Some((eps2 * eps1.conj()).arg())
    } else {
        None
    };
    Ok(SplittingEstimate {
        magnitude: raw / 4.0,
        phase,
        raw_splitting: raw,
        resolved: true,
    })
}
