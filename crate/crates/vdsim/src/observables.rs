//! Photon probability densities and bond-current fields.
//!
//! The bond current is fixed by the lattice continuity equation: under
//! ψ̇ = −iHψ, the site probability obeys d|ψ_i|²/dt = −Σ_j I(i→j) with
//!
//!   I(i→j) = −2 Im[ψ_i* J_ij ψ_j],
//!
//! positive when probability flows from i to j. Stationary states satisfy
//! Kirchhoff's law at every site.

use crate::graph::{BathGraph, SiteId};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ObservableError {
    #[error("state has dimension {got}, bath has {expected} sites")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("loop edge ({0},{1}) is not a stored bath coupling")]
    MissingEdge(usize, usize),
    #[error("loop needs at least 3 sites")]
    DegenerateLoop,
    #[error("empty current field")]
    EmptyField,
}

/// Antisymmetric bond currents on the stored edges of a bath.
#[derive(Debug, Clone, Serialize)]
pub struct CurrentField {
    /// (i, j, I(i→j)) for each stored coupling, in storage order.
    pub edges: Vec<(usize, usize, f64)>,
}

impl CurrentField {
    /// I(a→b) for an arbitrary orientation of a stored edge.
    pub fn between(&self, a: usize, b: usize) -> Option<f64> {
        for &(i, j, val) in &self.edges {
            if (i, j) == (a, b) {
                return Some(val);
            }
            if (i, j) == (b, a) {
                return Some(-val);
            }
        }
        None
    }

    /// Field rescaled to its maximum |I|; zero fields pass through.
    pub fn rescaled(&self) -> CurrentField {
        let max = self
            .edges
            .iter()
            .map(|e| e.2.abs())
            .fold(0.0f64, f64::max);
        if max == 0.0 {
            return self.clone();
        }
        CurrentField {
            edges: self
                .edges
                .iter()
                .map(|&(i, j, v)| (i, j, v / max))
                .collect(),
        }
    }
}

/// Per-site probabilities |ψ_i|².
pub fn probability_density(psi: &[Complex64]) -> Vec<f64> {
    psi.iter().map(|c| c.norm_sqr()).collect()
}

/// Bond currents of a photonic state on the bath's stored edges.
pub fn bond_currents(bath: &BathGraph, psi: &[Complex64]) -> Result<CurrentField, ObservableError> {
    if psi.len() != bath.site_count() {
        return Err(ObservableError::DimensionMismatch {
            expected: bath.site_count(),
            got: psi.len(),
        });
    }
    let edges = bath
        .couplings()
        .iter()
        .map(|c| {
            let val = -2.0 * (psi[c.i].conj() * c.amp * psi[c.j]).im;
            (c.i, c.j, val)
        })
        .collect();
    Ok(CurrentField { edges })
}

/// Net outflow Σ_j I(i→j) per site; ~0 everywhere for eigenstates.
pub fn site_divergence(bath: &BathGraph, field: &CurrentField) -> Vec<f64> {
    let mut div = vec![0.0; bath.site_count()];
    for &(i, j, val) in &field.edges {
        div[i] += val;
        div[j] -= val;
    }
    div
}

/// Largest |divergence| over all sites (Kirchhoff check).
pub fn kirchhoff_residual(bath: &BathGraph, field: &CurrentField) -> f64 {
    site_divergence(bath, field)
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
}

/// Signed sum of I along an oriented closed loop of sites.
pub fn circulation(
    field: &CurrentField,
    loop_sites: &[SiteId],
) -> Result<f64, ObservableError> {
    if loop_sites.len() < 3 {
        return Err(ObservableError::DegenerateLoop);
    }
    let mut total = 0.0;
    for w in 0..loop_sites.len() {
        let a = loop_sites[w].0;
        let b = loop_sites[(w + 1) % loop_sites.len()].0;
        total += field
            .between(a, b)
            .ok_or(ObservableError::MissingEdge(a, b))?;
    }
    Ok(total)
}

/// Edge carrying the maximal |I|, with its signed value.
pub fn current_extremum(field: &CurrentField) -> Result<(usize, usize, f64), ObservableError> {
    field
        .edges
        .iter()
        .cloned()
        .max_by(|a, b| a.2.abs().partial_cmp(&b.2.abs()).unwrap())
        .ok_or(ObservableError::EmptyField)
}
