//! Exact diagonalization, bandgap location, in-gap state detection and
//! localization measures.

use crate::graph::{BathGraph, SiteId};
use crate::linalg;
use crate::operator::HermitianOperator;
use ndarray::{Array2, ArrayView1, ShapeBuilder};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Per-pair eigen-residual allowance, scaled by dimension.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;
pub const ORTHONORMALITY_TOL: f64 = 1e-10;
/// Eigenvalues closer than this (in energy units) count as one level.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Default margin (fraction of gap width per side) when detecting in-gap
/// states; keeps finite-size band tails out of the window.
pub const DEFAULT_GAP_MARGIN: f64 = 0.01;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("LAPACK zheevd failed to converge (info = {0})")]
    LapackInfo(i32),
    #[error("eigen-residual {achieved:e} exceeds tolerance {allowed:e}")]
    ResidualTooLarge { achieved: f64, allowed: f64 },
    #[error("eigenvector basis deviates from orthonormality by {0:e}")]
    NotOrthonormal(f64),
    #[error("state has dimension {got}, bath has {expected} sites")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("localization center {0} out of range")]
    BadCenter(usize),
}

/// Eigenvalue-free interval reported as midpoint and width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapInfo {
    pub mid: f64,
    pub width: f64,
}

impl GapInfo {
    pub fn lower_edge(&self) -> f64 {
        self.mid - 0.5 * self.width
    }
    pub fn upper_edge(&self) -> f64 {
        self.mid + 0.5 * self.width
    }
    pub fn contains(&self, x: f64) -> bool {
        x > self.lower_edge() && x < self.upper_edge()
    }
}

/// Ascending eigenvalues with matching orthonormal eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct EigenSystem {
    values: Vec<f64>,
    vectors: Array2<Complex64>,
}

impl EigenSystem {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vector(&self, k: usize) -> ArrayView1<'_, Complex64> {
        self.vectors.column(k)
    }

    pub fn vectors(&self) -> &Array2<Complex64> {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Indices of eigenvalues within `tol` of `target`.
    pub fn indices_near(&self, target: f64, tol: f64) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| (v - target).abs() <= tol)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Fix each eigenvector's global phase: the largest-magnitude component is
/// made real positive, ties broken by lowest index. Keeps serialized output
/// independent of LAPACK's internal phase choices.
fn normalize_phases(n: usize, vecs: &mut [Complex64]) {
    for col in 0..n {
        let v = &mut vecs[col * n..(col + 1) * n];
        let mut best = 0usize;
        let mut best_norm = v[0].norm_sqr();
        for (i, c) in v.iter().enumerate().skip(1) {
            let ns = c.norm_sqr();
            if ns > best_norm {
                best_norm = ns;
                best = i;
            }
        }
        let pivot = v[best];
        let mag = pivot.norm();
        if mag > 0.0 {
            let rot = pivot.conj() / mag;
            for c in v.iter_mut() {
                *c *= rot;
            }
        }
    }
}

/// Full Hermitian eigendecomposition with result verification.
///
/// Residuals ‖Hx − λx‖ are checked for every pair against
/// `EIGEN_RESIDUAL_TOL * dim`, and the eigenbasis against orthonormality.
pub fn diagonalize(op: &HermitianOperator) -> Result<EigenSystem, SpectraError> {
    let n = op.dim();
    // Row-major Hermitian buffer reinterpreted column-major is the
    // transpose, i.e. the conjugate; conjugating the returned vectors
    // recovers eigenvectors of H itself.
    let mut a: Vec<Complex64> = op.matrix().iter().copied().collect();
    let values = linalg::zheevd_colmajor(n, &mut a, true).map_err(SpectraError::LapackInfo)?;
    for c in a.iter_mut() {
        *c = c.conj();
    }
    normalize_phases(n, &mut a);

    // Verification: one GEMM for H X, one for X^H X.
    let h: Vec<Complex64> = {
        // column-major copy of H
        let m = op.matrix();
        let mut buf = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            for i in 0..n {
                buf[j * n + i] = m[[i, j]];
            }
        }
        buf
    };
    let mut hx = vec![Complex64::new(0.0, 0.0); n * n];
    linalg::zgemm_nn(n, &h, &a, &mut hx);
    let mut worst = 0.0f64;
    for k in 0..n {
        let lam = values[k];
        let mut acc = 0.0;
        for i in 0..n {
            acc += (hx[k * n + i] - lam * a[k * n + i]).norm_sqr();
        }
        worst = worst.max(acc.sqrt());
    }
    let allowed = EIGEN_RESIDUAL_TOL * n as f64;
    if worst > allowed {
        return Err(SpectraError::ResidualTooLarge {
            achieved: worst,
            allowed,
        });
    }
    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    linalg::zgemm_hn(n, &a, &a, &mut gram);
    let mut dev = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((gram[j * n + i] - want).norm());
        }
    }
    if dev > ORTHONORMALITY_TOL {
        return Err(SpectraError::NotOrthonormal(dev));
    }

    let vectors = Array2::from_shape_vec((n, n).f(), a).expect("square buffer");
    Ok(EigenSystem { values, vectors })
}

/// Eigenvalues only (no vectors, no verification GEMMs); used by sweeps
/// that merely count in-gap levels.
pub fn eigenvalues_only(op: &HermitianOperator) -> Result<Vec<f64>, SpectraError> {
    let n = op.dim();
    let mut a: Vec<Complex64> = op.matrix().iter().copied().collect();
    linalg::zheevd_colmajor(n, &mut a, false).map_err(SpectraError::LapackInfo)
}

/// Maximal eigenvalue-free internal intervals wider than `min_width`.
pub fn find_gaps(es: &EigenSystem, min_width: f64) -> Vec<GapInfo> {
    gaps_in_sorted(es.values(), min_width)
}

/// Same as [`find_gaps`] but on a plain sorted eigenvalue list.
pub fn gaps_in_sorted(values: &[f64], min_width: f64) -> Vec<GapInfo> {
    let mut out = Vec::new();
    for w in values.windows(2) {
        let width = w[1] - w[0];
        if width > min_width {
            out.push(GapInfo {
                mid: 0.5 * (w[0] + w[1]),
                width,
            });
        }
    }
    out
}

/// Eigenpairs strictly inside `gap` shrunk by `margin` (fraction of width)
/// on each side.
pub fn find_ingap_states<'a>(
    es: &'a EigenSystem,
    gap: &GapInfo,
    margin: f64,
) -> Vec<(f64, ArrayView1<'a, Complex64>)> {
    let lo = gap.lower_edge() + margin * gap.width;
    let hi = gap.upper_edge() - margin * gap.width;
    es.values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > lo && v < hi)
        .map(|(k, &v)| (v, es.vector(k)))
        .collect()
}

/// Count of in-gap eigenvalues from a plain sorted list, with levels closer
/// than [`DEGENERACY_TOL`] merged into one.
pub fn count_ingap_levels(values: &[f64], gap: &GapInfo, margin: f64, degeneracy_tol: f64) -> usize {
    let lo = gap.lower_edge() + margin * gap.width;
    let hi = gap.upper_edge() - margin * gap.width;
    let mut count = 0usize;
    let mut last: Option<f64> = None;
    for &v in values {
        if v > lo && v < hi {
            match last {
                Some(prev) if (v - prev).abs() <= degeneracy_tol => {}
                _ => count += 1,
            }
            last = Some(v);
        }
    }
    count
}

/// Inverse participation ratio and fitted exponential decay length.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocalizationMetrics {
    /// Σ|ψ_i|⁴ of the normalized state; 1/M for uniform, 1 for one site.
    pub ipr: f64,
    /// Amplitude e-folding length in unit cells, from a least-squares fit
    /// of ln p(d) = c − 2 d / ξ on cell-summed probabilities. `None` when
    /// fewer than three distinct distances carry weight.
    pub decay_length: Option<f64>,
    pub center: SiteId,
}

/// Relative probability floor below which cells are excluded from the
/// decay fit (guards the log against underflowed tails).
const FIT_FLOOR_REL: f64 = 1e-20;

/// Localization metrics of a normalized state on `bath`, measured from
/// `center`. Distances are unweighted shortest paths on the quotient cell
/// graph when cell labels are attached, otherwise site hops.
pub fn localization(
    state: &[Complex64],
    bath: &BathGraph,
    center: SiteId,
) -> Result<LocalizationMetrics, SpectraError> {
    let m = bath.site_count();
    if state.len() != m {
        return Err(SpectraError::DimensionMismatch {
            expected: m,
            got: state.len(),
        });
    }
    if center.0 >= m {
        return Err(SpectraError::BadCenter(center.0));
    }
    let ipr = state.iter().map(|c| c.norm_sqr().powi(2)).sum::<f64>();

    let site_dist = bath.bfs_distances(center);
    // Quotient distance per cell: min site distance within the cell, then
    // normalized by cell size so one cell step costs one unit.
    let cell_of: Vec<Option<[i64; 2]>> = match bath.labels() {
        Some(labels) => labels.iter().map(|l| Some(l.cell)).collect(),
        None => vec![None; m],
    };
    use std::collections::HashMap;
    let mut cell_prob: HashMap<(i64, i64, bool), (usize, f64)> = HashMap::new();
    let d = bath.meta().cell_size.max(1);
    for i in 0..m {
        if site_dist[i] == usize::MAX {
            continue;
        }
        let key = match cell_of[i] {
            Some(c) => (c[0], c[1], true),
            None => (i as i64, 0, false),
        };
        let dist_cells = site_dist[i] / d;
        let p = state[i].norm_sqr();
        cell_prob
            .entry(key)
            .and_modify(|e| {
                e.0 = e.0.min(dist_cells);
                e.1 += p;
            })
            .or_insert((dist_cells, p));
    }
    // Aggregate probability by distance.
    let mut by_dist: HashMap<usize, f64> = HashMap::new();
    for (_, (dist, p)) in cell_prob {
        *by_dist.entry(dist).or_insert(0.0) += p;
    }
    let pmax = by_dist.values().cloned().fold(0.0f64, f64::max);
    let mut pts: Vec<(f64, f64)> = by_dist
        .into_iter()
        .filter(|&(_, p)| p > pmax * FIT_FLOOR_REL && p > 0.0)
        .map(|(dd, p)| (dd as f64, p.ln()))
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let decay_length = if pts.len() < 3 {
        None
    } else {
        // least squares ln p = c + s * d  ->  xi = -2 / s
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        if denom.abs() < 1e-300 {
            None
        } else {
            let slope = (n * sxy - sx * sy) / denom;
            if slope < 0.0 {
                Some(-2.0 / slope)
            } else {
                None
            }
        }
    };

    Ok(LocalizationMetrics {
        ipr,
        decay_length,
        center,
    })
}
