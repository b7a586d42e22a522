//! Coupled-cavity bath graphs.
//!
//! A bath is a network of cavities i with frequencies ω_i and complex
//! couplings J_ij = ⟨i|H|j⟩ obeying J_ji = J_ij*. Couplings are stored once
//! per unordered pair in a canonical orientation (lower index first), so the
//! graph is Hermitian by construction and the diagonal lives entirely in the
//! per-site frequencies.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

/// Index of a cavity within a bath; dense in `0..site_count()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SiteId(pub usize);

/// Sublattice tag for two-site unit cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sublattice {
    A,
    B,
}

/// Structured site label: unit-cell index plus sublattice tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SiteLabel {
    pub cell: [i64; 2],
    pub sub: Sublattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

/// Graph-level metadata: unit-cell size d, interaction range R (in cells),
/// boundary condition, and a free-form model tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathMeta {
    pub cell_size: usize,
    pub range: usize,
    pub bc: Boundary,
    pub model: String,
}

impl BathMeta {
    pub fn new(cell_size: usize, range: usize, bc: Boundary, model: &str) -> Self {
        Self {
            cell_size,
            range,
            bc,
            model: model.to_string(),
        }
    }
}

/// One stored coupling: the matrix element ⟨i|H|j⟩ = amp with i < j.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub amp: Complex64,
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("site index {0} out of range for {1}-site bath")]
    SiteOutOfRange(usize, usize),
    #[error("self-coupling on site {0}; diagonal terms belong in omega")]
    SelfCoupling(usize),
    #[error("couplings ({i},{j}) and ({j},{i}) conflict: {a} vs conj {b} — not Hermitian")]
    NonHermitianPair {
        i: usize,
        j: usize,
        a: Complex64,
        b: Complex64,
    },
    #[error("duplicate coupling entry for pair ({0},{1})")]
    DuplicateCoupling(usize, usize),
    #[error("expected {expected} frequencies/labels, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("site labels are not bijective: label {0:?} appears twice")]
    DuplicateLabel(SiteLabel),
    #[error("state has dimension {got}, bath has {expected} sites")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("atoms {0} and {1} attached to the same site")]
    DuplicateAtomSite(usize, usize),
    #[error("atom coupling g must be finite and >= 0, got {0}")]
    InvalidAtomCoupling(f64),
}

/// Photonic bath: per-site frequencies plus Hermitian couplings.
///
/// Immutable after construction; all queries are pure.
#[derive(Debug, Clone)]
pub struct BathGraph {
    omega: Vec<f64>,
    couplings: Vec<Coupling>,
    labels: Option<Vec<SiteLabel>>,
    positions: Option<Vec<[f64; 2]>>,
    meta: BathMeta,
    /// Neighbor list: for each site i, the pairs (j, ⟨i|H|j⟩).
    adjacency: Vec<Vec<(usize, Complex64)>>,
}

impl BathGraph {
    /// Build a bath from frequencies and a coupling list.
    ///
    /// Entries may come in either orientation; each is canonicalized to
    /// ⟨min|H|max⟩. A second entry for the same pair is rejected: as a
    /// duplicate when consistent, as a non-Hermitian conflict otherwise.
    pub fn new(
        omega: Vec<f64>,
        couplings: Vec<(usize, usize, Complex64)>,
        meta: BathMeta,
    ) -> Result<Self, GraphError> {
        let m = omega.len();
        let mut seen: HashMap<(usize, usize), Complex64> = HashMap::new();
        let mut canonical = Vec::with_capacity(couplings.len());
        for &(i, j, amp) in &couplings {
            if i >= m {
                return Err(GraphError::SiteOutOfRange(i, m));
            }
            if j >= m {
                return Err(GraphError::SiteOutOfRange(j, m));
            }
            if i == j {
                return Err(GraphError::SelfCoupling(i));
            }
            let (lo, hi, c) = if i < j { (i, j, amp) } else { (j, i, amp.conj()) };
            if let Some(&prev) = seen.get(&(lo, hi)) {
                if prev == c {
                    return Err(GraphError::DuplicateCoupling(lo, hi));
                }
                return Err(GraphError::NonHermitianPair {
                    i: lo,
                    j: hi,
                    a: prev,
                    b: c.conj(),
                });
            }
            seen.insert((lo, hi), c);
            canonical.push(Coupling { i: lo, j: hi, amp: c });
        }
        let mut adjacency = vec![Vec::new(); m];
        for c in &canonical {
            adjacency[c.i].push((c.j, c.amp));
            adjacency[c.j].push((c.i, c.amp.conj()));
        }
        Ok(Self {
            omega,
            couplings: canonical,
            labels: None,
            positions: None,
            meta,
            adjacency,
        })
    }

    pub fn with_labels(mut self, labels: Vec<SiteLabel>) -> Result<Self, GraphError> {
        if labels.len() != self.site_count() {
            return Err(GraphError::LengthMismatch {
                expected: self.site_count(),
                got: labels.len(),
            });
        }
        let mut seen = HashMap::new();
        for (idx, lab) in labels.iter().enumerate() {
            if seen.insert(*lab, idx).is_some() {
                return Err(GraphError::DuplicateLabel(*lab));
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_positions(mut self, positions: Vec<[f64; 2]>) -> Result<Self, GraphError> {
        if positions.len() != self.site_count() {
            return Err(GraphError::LengthMismatch {
                expected: self.site_count(),
                got: positions.len(),
            });
        }
        self.positions = Some(positions);
        Ok(self)
    }

    pub fn site_count(&self) -> usize {
        self.omega.len()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn labels(&self) -> Option<&[SiteLabel]> {
        self.labels.as_deref()
    }

    pub fn positions(&self) -> Option<&[[f64; 2]]> {
        self.positions.as_deref()
    }

    pub fn meta(&self) -> &BathMeta {
        &self.meta
    }

    /// Neighbors of site i with matrix elements ⟨i|H|j⟩.
    pub fn neighbors(&self, i: SiteId) -> &[(usize, Complex64)] {
        &self.adjacency[i.0]
    }

    pub fn contains(&self, v: SiteId) -> bool {
        v.0 < self.site_count()
    }

    /// Site index for a label, when labels are attached.
    pub fn site_by_label(&self, label: &SiteLabel) -> Option<SiteId> {
        self.labels
            .as_ref()?
            .iter()
            .position(|l| l == label)
            .map(SiteId)
    }

    /// Average cavity frequency Tr H_B / M.
    pub fn mean_omega(&self) -> f64 {
        self.omega.iter().sum::<f64>() / self.site_count() as f64
    }

    /// Delete site v and every coupling touching it; remaining sites are
    /// re-densified and the old→new index map recorded.
    pub fn remove_site(&self, v: SiteId) -> Result<VacancyBath, GraphError> {
        if !self.contains(v) {
            return Err(GraphError::SiteOutOfRange(v.0, self.site_count()));
        }
        let m = self.site_count();
        let mut old_to_new = vec![None; m];
        let mut new_to_old = Vec::with_capacity(m - 1);
        for old in 0..m {
            if old != v.0 {
                old_to_new[old] = Some(new_to_old.len());
                new_to_old.push(old);
            }
        }
        let omega = new_to_old.iter().map(|&o| self.omega[o]).collect();
        let couplings = self
            .couplings
            .iter()
            .filter(|c| c.i != v.0 && c.j != v.0)
            .map(|c| {
                (
                    old_to_new[c.i].expect("kept site"),
                    old_to_new[c.j].expect("kept site"),
                    c.amp,
                )
            })
            .collect();
        let mut meta = self.meta.clone();
        meta.model = format!("{}-vacancy", meta.model);
        let mut bath = BathGraph::new(omega, couplings, meta)?;
        if let Some(labels) = &self.labels {
            bath = bath.with_labels(new_to_old.iter().map(|&o| labels[o]).collect())?;
        }
        if let Some(pos) = &self.positions {
            bath = bath.with_positions(new_to_old.iter().map(|&o| pos[o]).collect())?;
        }
        Ok(VacancyBath {
            bath,
            removed: v,
            old_to_new,
            new_to_old,
        })
    }

    /// Unweighted BFS distances on the coupling graph from `start`.
    /// Unreachable sites get `usize::MAX`.
    pub fn bfs_distances(&self, start: SiteId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.site_count()];
        let mut queue = std::collections::VecDeque::new();
        dist[start.0] = 0;
        queue.push_back(start.0);
        while let Some(i) = queue.pop_front() {
            for &(j, _) in &self.adjacency[i] {
                if dist[j] == usize::MAX {
                    dist[j] = dist[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        dist
    }
}

/// Result of punching a vacancy: the reduced bath plus index maps back to
/// the original graph.
#[derive(Debug, Clone)]
pub struct VacancyBath {
    pub bath: BathGraph,
    pub removed: SiteId,
    pub old_to_new: Vec<Option<usize>>,
    pub new_to_old: Vec<usize>,
}

impl VacancyBath {
    /// Embed a state on B_v into the original bath's indexing, with an
    /// explicit zero at the removed site.
    pub fn embed(&self, psi: &[Complex64]) -> Result<Vec<Complex64>, GraphError> {
        if psi.len() != self.bath.site_count() {
            return Err(GraphError::DimensionMismatch {
                expected: self.bath.site_count(),
                got: psi.len(),
            });
        }
        let mut full = vec![Complex64::new(0.0, 0.0); self.old_to_new.len()];
        for (new, &old) in self.new_to_old.iter().enumerate() {
            full[old] = psi[new];
        }
        Ok(full)
    }
}

/// Two-level emitter locally coupled to one cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub omega0: f64,
    pub g: f64,
    pub site: SiteId,
}

impl AtomSpec {
    pub fn new(omega0: f64, g: f64, site: SiteId) -> Self {
        Self { omega0, g, site }
    }

    /// g is taken real and non-negative; a coupling phase is a local gauge
    /// on the attachment cavity, so nothing is lost.
    pub fn validate(&self, bath: &BathGraph) -> Result<(), GraphError> {
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(GraphError::InvalidAtomCoupling(self.g));
        }
        if !bath.contains(self.site) {
            return Err(GraphError::SiteOutOfRange(self.site.0, bath.site_count()));
        }
        Ok(())
    }
}
