//! Assembly of single-excitation Hamiltonians.
//!
//! The single-excitation sector of n atoms coupled to an M-cavity bath is
//! spanned by the M one-photon states |i⟩ followed by the n atomic
//! excitations |e_ν⟩. Each atom row couples only to its attachment cavity
//! with real amplitude g.

use crate::graph::{AtomSpec, BathGraph, GraphError, SiteId, VacancyBath};
use ndarray::Array2;
use num_complex::Complex64;

pub const HERMITICITY_TOL: f64 = 1e-12;

/// Basis slot of an assembled operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisLabel {
    /// One-photon amplitude on a bath site.
    Site(SiteId),
    /// Excited-atom amplitude, by atom index.
    Atom(usize),
}

/// Dense Hermitian operator with labeled basis slots.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: Array2<Complex64>,
    basis: Vec<BasisLabel>,
}

#[derive(Debug, thiserror::Error)]
pub enum OperatorError {
    #[error("matrix entry ({i},{j}) breaks Hermiticity by {dev:e}")]
    NotHermitian { i: usize, j: usize, dev: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl HermitianOperator {
    /// Wrap a dense matrix, checking H = H† entrywise to 1e-12.
    pub fn new(
        matrix: Array2<Complex64>,
        basis: Vec<BasisLabel>,
    ) -> Result<Self, OperatorError> {
        let n = matrix.nrows();
        assert_eq!(n, matrix.ncols());
        assert_eq!(n, basis.len());
        for i in 0..n {
            for j in i..n {
                let dev = (matrix[[i, j]] - matrix[[j, i]].conj()).norm();
                if dev > HERMITICITY_TOL {
                    return Err(OperatorError::NotHermitian { i, j, dev });
                }
            }
        }
        Ok(Self { matrix, basis })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn basis(&self) -> &[BasisLabel] {
        &self.basis
    }

    /// y = H x.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.matrix[[i, j]] * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// ‖H x − λ x‖₂.
    pub fn eigen_residual(&self, x: &[Complex64], lambda: f64) -> f64 {
        self.apply(x)
            .iter()
            .zip(x.iter())
            .map(|(hx, xi)| (hx - lambda * xi).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Bath free Hamiltonian: ω_i on the diagonal, J_ij off-diagonal.
pub fn assemble_bath(bath: &BathGraph) -> HermitianOperator {
    let m = bath.site_count();
    let mut h = Array2::zeros((m, m));
    for (i, &w) in bath.omega().iter().enumerate() {
        h[[i, i]] = Complex64::new(w, 0.0);
    }
    for c in bath.couplings() {
        h[[c.i, c.j]] = c.amp;
        h[[c.j, c.i]] = c.amp.conj();
    }
    let basis = (0..m).map(|i| BasisLabel::Site(SiteId(i))).collect();
    HermitianOperator::new(h, basis).expect("bath graph is Hermitian by construction")
}

/// Full atom+bath Hamiltonian over basis {|i⟩} ⊕ {|e_ν⟩}.
pub fn assemble_full(
    bath: &BathGraph,
    atoms: &[AtomSpec],
) -> Result<HermitianOperator, OperatorError> {
    let m = bath.site_count();
    for (idx, a) in atoms.iter().enumerate() {
        a.validate(bath)?;
        for (jdx, b) in atoms.iter().enumerate().skip(idx + 1) {
            if a.site == b.site {
                return Err(GraphError::DuplicateAtomSite(idx, jdx).into());
            }
        }
    }
    let n = m + atoms.len();
    let mut h = Array2::zeros((n, n));
    for (i, &w) in bath.omega().iter().enumerate() {
        h[[i, i]] = Complex64::new(w, 0.0);
    }
    for c in bath.couplings() {
        h[[c.i, c.j]] = c.amp;
        h[[c.j, c.i]] = c.amp.conj();
    }
    let mut basis: Vec<BasisLabel> = (0..m).map(|i| BasisLabel::Site(SiteId(i))).collect();
    for (idx, a) in atoms.iter().enumerate() {
        let row = m + idx;
        h[[row, row]] = Complex64::new(a.omega0, 0.0);
        h[[row, a.site.0]] = Complex64::new(a.g, 0.0);
        h[[a.site.0, row]] = Complex64::new(a.g, 0.0);
        basis.push(BasisLabel::Atom(idx));
    }
    HermitianOperator::new(h, basis)
}

/// Boundary matrix element ⟨v|H_B|ψ⟩ = Σ_{i≠v} J_{v,i} ψ_i for a state ψ
/// indexed on B_v.
pub fn boundary_element(
    bath: &BathGraph,
    vac: &VacancyBath,
    psi: &[Complex64],
) -> Result<Complex64, GraphError> {
    if psi.len() != vac.bath.site_count() {
        return Err(GraphError::DimensionMismatch {
            expected: vac.bath.site_count(),
            got: psi.len(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for &(j, amp) in bath.neighbors(vac.removed) {
        if let Some(new) = vac.old_to_new[j] {
            acc += amp * psi[new];
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{BathMeta, Boundary};
    use approx::assert_abs_diff_eq;

    fn dimer(j: f64) -> BathGraph {
        BathGraph::new(
            vec![0.0, 0.0],
            vec![(0, 1, Complex64::new(-j, 0.0))],
            BathMeta::new(1, 1, Boundary::Open, "dimer"),
        )
        .unwrap()
    }

    #[test]
    fn assemble_dimer() {
        let h = assemble_bath(&dimer(1.0));
        assert_eq!(h.dim(), 2);
        assert_abs_diff_eq!(h.matrix()[[0, 1]].re, -1.0);
        assert_abs_diff_eq!(h.matrix()[[1, 0]].re, -1.0);
        assert_abs_diff_eq!(h.matrix()[[0, 0]].re, 0.0);
    }

    #[test]
    fn assemble_uncoupled_is_diagonal() {
        let g = BathGraph::new(
            vec![1.0, 2.0, 3.0],
            vec![],
            BathMeta::new(1, 0, Boundary::Open, "uncoupled"),
        )
        .unwrap();
        let h = assemble_bath(&g);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { (i + 1) as f64 } else { 0.0 };
                assert_abs_diff_eq!(h.matrix()[[i, j]].re, want);
                assert_abs_diff_eq!(h.matrix()[[i, j]].im, 0.0);
            }
        }
    }

    #[test]
    fn full_with_no_atoms_equals_bath() {
        let g = dimer(0.7);
        let a = assemble_bath(&g);
        let b = assemble_full(&g, &[]).unwrap();
        assert_eq!(a.dim(), b.dim());
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(a.matrix()[[i, j]], b.matrix()[[i, j]]);
            }
        }
    }

    #[test]
    fn full_decoupled_atom_block_diagonal() {
        let g = dimer(1.0);
        let atom = AtomSpec::new(0.3, 0.0, SiteId(0));
        let h = assemble_full(&g, &[atom]).unwrap();
        assert_eq!(h.dim(), 3);
        assert_abs_diff_eq!(h.matrix()[[2, 2]].re, 0.3);
        assert_abs_diff_eq!(h.matrix()[[2, 0]].norm(), 0.0);
        assert_abs_diff_eq!(h.matrix()[[2, 1]].norm(), 0.0);
    }

    #[test]
    fn duplicate_atom_sites_rejected() {
        let g = dimer(1.0);
        let a = AtomSpec::new(0.0, 0.5, SiteId(0));
        let err = assemble_full(&g, &[a, a]).unwrap_err();
        assert!(matches!(
            err,
            OperatorError::Graph(GraphError::DuplicateAtomSite(0, 1))
        ));
    }

    #[test]
    fn boundary_element_dimer() {
        // psi = |1>, J_{v1} = -J  ->  -J
        let g = dimer(1.0);
        let vac = g.remove_site(SiteId(0)).unwrap();
        let bd = boundary_element(&g, &vac, &[Complex64::new(1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(bd.re, -1.0);
        assert_abs_diff_eq!(bd.im, 0.0);
    }

    #[test]
    fn boundary_element_no_overlap() {
        // 4-chain, remove site 0; support on far sites gives 0.
        let mut cpl = Vec::new();
        for i in 0..3 {
            cpl.push((i, i + 1, Complex64::new(-1.0, 0.0)));
        }
        let g = BathGraph::new(
            vec![0.0; 4],
            cpl,
            BathMeta::new(1, 1, Boundary::Open, "chain"),
        )
        .unwrap();
        let vac = g.remove_site(SiteId(0)).unwrap();
        let psi = [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.6, 0.0),
            Complex64::new(0.8, 0.0),
        ];
        let bd = boundary_element(&g, &vac, &psi).unwrap();
        assert_abs_diff_eq!(bd.norm(), 0.0);
    }

    #[test]
    fn boundary_element_dimension_check() {
        let g = dimer(1.0);
        let vac = g.remove_site(SiteId(0)).unwrap();
        assert!(boundary_element(&g, &vac, &[]).is_err());
    }

    #[test]
    fn readding_removed_site_restores_operator() {
        // remove_site then re-add with original couplings reproduces H entrywise.
        let g = BathGraph::new(
            vec![0.1, 0.2, 0.3],
            vec![
                (0, 1, Complex64::new(-1.0, 0.0)),
                (1, 2, Complex64::new(0.0, 0.4)),
                (0, 2, Complex64::new(0.2, -0.1)),
            ],
            BathMeta::new(1, 1, Boundary::Open, "triangle"),
        )
        .unwrap();
        let v = SiteId(1);
        let vac = g.remove_site(v).unwrap();
        // Rebuild: reduced couplings mapped back plus v's original row.
        let mut cpl: Vec<(usize, usize, Complex64)> = vac
            .bath
            .couplings()
            .iter()
            .map(|c| (vac.new_to_old[c.i], vac.new_to_old[c.j], c.amp))
            .collect();
        for &(j, amp) in g.neighbors(v) {
            cpl.push((v.0, j, amp));
        }
        let rebuilt = BathGraph::new(
            g.omega().to_vec(),
            cpl,
            BathMeta::new(1, 1, Boundary::Open, "triangle"),
        )
        .unwrap();
        let a = assemble_bath(&g);
        let b = assemble_bath(&rebuilt);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a.matrix()[[i, j]], b.matrix()[[i, j]]);
            }
        }
    }
}
