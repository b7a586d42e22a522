//! The bath zoo: dimer, tight-binding chain, SSH chain, Creutz ladder and
//! Haldane honeycomb, with their closed-form gap data.
//!
//! Conventions fixed here and relied on elsewhere:
//! - chain/dimer nearest-neighbor coupling is −J, so ω_k = ω_c − 2J cos k;
//! - SSH intracell coupling J(1−δ), intercell J(1+δ), both real;
//! - Creutz upper-row hop ⟨a_{n+1}|H|a_n⟩ = J e^{−iα}, lower row J e^{+iα},
//!   vertical −2mJ, diagonals J;
//! - Haldane nearest-neighbor coupling J; next-nearest ⟨i|H|j⟩ acquires
//!   e^{+iφ} when j→i advances counter-clockwise around a hexagon on
//!   sublattice a, mirrored (e^{−iφ}) on sublattice b. The sublattice offset
//!   and NNN amplitude are normalized so that the Dirac mass at the K point
//!   is (m − 3√3 t sin φ)J/2: on-site ω_{a,b} = ω_c ± mJ/2 and NNN amplitude
//!   (t/2)e^{iφ}J. This makes the bandgap exactly ||m| − 3√3 t|sinφ|| J,
//!   closing on |m| = 3√3 t|sinφ|, with midpoint ω_c − (3/2) t cos φ J.

use crate::graph::{BathGraph, BathMeta, Boundary, GraphError, SiteId, SiteLabel, Sublattice};
use crate::spectra::GapInfo;
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("operation unsupported for variant `{0}`")]
    Unsupported(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Parameters of one bath from the zoo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum ModelParams {
    Dimer {
        #[serde(default)]
        omega_c: f64,
        #[serde(default = "default_j")]
        j: f64,
    },
    Chain {
        n: usize,
        #[serde(default)]
        omega_c: f64,
        #[serde(default = "default_j")]
        j: f64,
        #[serde(default = "default_bc")]
        bc: Boundary,
    },
    Ssh {
        n: usize,
        delta: f64,
        #[serde(default)]
        omega_c: f64,
        #[serde(default = "default_j")]
        j: f64,
        #[serde(default = "default_bc")]
        bc: Boundary,
    },
    Creutz {
        n: usize,
        m: f64,
        alpha: f64,
        #[serde(default)]
        omega_c: f64,
        #[serde(default = "default_j")]
        j: f64,
        #[serde(default = "default_bc")]
        bc: Boundary,
    },
    Haldane {
        nx: usize,
        ny: usize,
        m: f64,
        t: f64,
        phi: f64,
        #[serde(default)]
        omega_c: f64,
        #[serde(default = "default_j")]
        j: f64,
        #[serde(default = "default_bc")]
        bc: Boundary,
    },
}

fn default_j() -> f64 {
    1.0
}

fn default_bc() -> Boundary {
    Boundary::Periodic
}

impl ModelParams {
    pub fn variant_name(&self) -> &'static str {
        match self {
            ModelParams::Dimer { .. } => "dimer",
            ModelParams::Chain { .. } => "chain",
            ModelParams::Ssh { .. } => "ssh",
            ModelParams::Creutz { .. } => "creutz",
            ModelParams::Haldane { .. } => "haldane",
        }
    }

    pub fn j(&self) -> f64 {
        match *self {
            ModelParams::Dimer { j, .. }
            | ModelParams::Chain { j, .. }
            | ModelParams::Ssh { j, .. }
            | ModelParams::Creutz { j, .. }
            | ModelParams::Haldane { j, .. } => j,
        }
    }

    pub fn omega_c(&self) -> f64 {
        match *self {
            ModelParams::Dimer { omega_c, .. }
            | ModelParams::Chain { omega_c, .. }
            | ModelParams::Ssh { omega_c, .. }
            | ModelParams::Creutz { omega_c, .. }
            | ModelParams::Haldane { omega_c, .. } => omega_c,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let j = self.j();
        if !j.is_finite() || j < 0.0 {
            return Err(ModelError::BadParameter(format!("J must be >= 0, got {j}")));
        }
        match *self {
            ModelParams::Dimer { .. } => Ok(()),
            ModelParams::Chain { n, .. } => {
                if n < 2 {
                    return Err(ModelError::BadParameter(format!("chain needs n >= 2, got {n}")));
                }
                Ok(())
            }
            ModelParams::Ssh { n, delta, .. } => {
                if n < 2 {
                    return Err(ModelError::BadParameter(format!("ssh needs n >= 2 cells, got {n}")));
                }
                if !(delta.is_finite() && delta.abs() <= 1.0) {
                    return Err(ModelError::BadParameter(format!("ssh needs |delta| <= 1, got {delta}")));
                }
                Ok(())
            }
            ModelParams::Creutz { n, m, alpha, .. } => {
                if n < 2 {
                    return Err(ModelError::BadParameter(format!("creutz needs n >= 2 cells, got {n}")));
                }
                if !(m.is_finite() && m.abs() <= 1.0) {
                    return Err(ModelError::BadParameter(format!("creutz needs |m| <= 1, got {m}")));
                }
                if !alpha.is_finite() {
                    return Err(ModelError::BadParameter("creutz alpha must be finite".into()));
                }
                Ok(())
            }
            ModelParams::Haldane { nx, ny, m, t, phi, .. } => {
                if nx < 2 || ny < 2 {
                    return Err(ModelError::BadParameter(format!(
                        "haldane needs nx, ny >= 2, got {nx}x{ny}"
                    )));
                }
                if !(t.is_finite() && t >= 0.0) {
                    return Err(ModelError::BadParameter(format!("haldane needs t >= 0, got {t}")));
                }
                if !m.is_finite() || !phi.is_finite() {
                    return Err(ModelError::BadParameter("haldane m, phi must be finite".into()));
                }
                Ok(())
            }
        }
    }
}

/// Coupling accumulator that merges contributions landing on the same pair
/// (wrapped bonds on small periodic lattices add up).
struct CouplingAcc {
    map: HashMap<(usize, usize), Complex64>,
    order: Vec<(usize, usize)>,
}

impl CouplingAcc {
    fn new() -> Self {
        Self {
            map: HashMap::new(),
            order: Vec::new(),
        }
    }

    /// Add ⟨i|H|j⟩ += amp.
    fn add(&mut self, i: usize, j: usize, amp: Complex64) {
        if i == j {
            return; // wrapped bond onto itself (n=1 rings are rejected earlier)
        }
        let (lo, hi, c) = if i < j { (i, j, amp) } else { (j, i, amp.conj()) };
        match self.map.entry((lo, hi)) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
                self.order.push((lo, hi));
            }
        }
    }

    fn into_list(self) -> Vec<(usize, usize, Complex64)> {
        self.order
            .into_iter()
            .map(|k| (k.0, k.1, self.map[&k]))
            .collect()
    }
}

/// Build the bath graph for a zoo member.
pub fn build_model(p: &ModelParams) -> Result<BathGraph, ModelError> {
    p.validate()?;
    match *p {
        ModelParams::Dimer { omega_c, j } => {
            let bath = BathGraph::new(
                vec![omega_c, omega_c],
                vec![(0, 1, Complex64::new(-j, 0.0))],
                BathMeta::new(1, 1, Boundary::Open, "dimer"),
            )?
            .with_labels(vec![
                SiteLabel { cell: [0, 0], sub: Sublattice::A },
                SiteLabel { cell: [0, 0], sub: Sublattice::B },
            ])?
            .with_positions(vec![[0.0, 0.0], [1.0, 0.0]])?;
            Ok(bath)
        }
        ModelParams::Chain { n, omega_c, j, bc } => {
            let mut acc = CouplingAcc::new();
            for i in 0..n - 1 {
                acc.add(i + 1, i, Complex64::new(-j, 0.0));
            }
            if bc == Boundary::Periodic {
                acc.add(0, n - 1, Complex64::new(-j, 0.0));
            }
            let bath = BathGraph::new(
                vec![omega_c; n],
                acc.into_list(),
                BathMeta::new(1, 1, bc, "chain"),
            )?
            .with_labels(
                (0..n)
                    .map(|i| SiteLabel { cell: [i as i64, 0], sub: Sublattice::A })
                    .collect(),
            )?
            .with_positions((0..n).map(|i| [i as f64, 0.0]).collect())?;
            Ok(bath)
        }
        ModelParams::Ssh { n, delta, omega_c, j, bc } => {
            let intra = Complex64::new(j * (1.0 - delta), 0.0);
            let inter = Complex64::new(j * (1.0 + delta), 0.0);
            let a = |c: usize| 2 * c;
            let b = |c: usize| 2 * c + 1;
            let mut acc = CouplingAcc::new();
            for c in 0..n {
                acc.add(a(c), b(c), intra);
                if c + 1 < n {
                    acc.add(b(c), a(c + 1), inter);
                } else if bc == Boundary::Periodic {
                    acc.add(b(c), a(0), inter);
                }
            }
            let mut labels = Vec::with_capacity(2 * n);
            let mut pos = Vec::with_capacity(2 * n);
            for c in 0..n {
                labels.push(SiteLabel { cell: [c as i64, 0], sub: Sublattice::A });
                labels.push(SiteLabel { cell: [c as i64, 0], sub: Sublattice::B });
                pos.push([c as f64, 0.0]);
                pos.push([c as f64 + 0.5, 0.0]);
            }
            let bath = BathGraph::new(
                vec![omega_c; 2 * n],
                acc.into_list(),
                BathMeta::new(2, 1, bc, "ssh"),
            )?
            .with_labels(labels)?
            .with_positions(pos)?;
            Ok(bath)
        }
        ModelParams::Creutz { n, m, alpha, omega_c, j, bc } => {
            let a = |c: usize| 2 * c;
            let b = |c: usize| 2 * c + 1;
            let hop_a = Complex64::from_polar(j, -alpha); // ⟨a_{n+1}|H|a_n⟩
            let hop_b = Complex64::from_polar(j, alpha); // ⟨b_{n+1}|H|b_n⟩
            let diag = Complex64::new(j, 0.0);
            let vert = Complex64::new(-2.0 * m * j, 0.0);
            let mut acc = CouplingAcc::new();
            for c in 0..n {
                acc.add(a(c), b(c), vert);
                let next = if c + 1 < n {
                    c + 1
                } else if bc == Boundary::Periodic {
                    0
                } else {
                    continue;
                };
                acc.add(a(next), a(c), hop_a);
                acc.add(b(next), b(c), hop_b);
                acc.add(b(next), a(c), diag);
                acc.add(a(next), b(c), diag);
            }
            let mut labels = Vec::with_capacity(2 * n);
            let mut pos = Vec::with_capacity(2 * n);
            for c in 0..n {
                labels.push(SiteLabel { cell: [c as i64, 0], sub: Sublattice::A });
                labels.push(SiteLabel { cell: [c as i64, 0], sub: Sublattice::B });
                pos.push([c as f64, 0.5]);
                pos.push([c as f64, -0.5]);
            }
            let bath = BathGraph::new(
                vec![omega_c; 2 * n],
                acc.into_list(),
                BathMeta::new(2, 1, bc, "creutz"),
            )?
            .with_labels(labels)?
            .with_positions(pos)?;
            Ok(bath)
        }
        ModelParams::Haldane { nx, ny, m, t, phi, omega_c, j, bc } => {
            let idx = |n1: usize, n2: usize, s: usize| 2 * (n1 * ny + n2) + s;
            // Cell displacement sets; see module docs for orientation.
            const NN: [(i64, i64); 3] = [(0, 0), (0, -1), (1, -1)]; // a(c) – b(c+Δ)
            const NNN: [(i64, i64); 3] = [(-1, 0), (1, -1), (0, 1)]; // ⟨s(c+Δ)|H|s(c)⟩
            let wrap = |v: i64, len: usize| -> Option<usize> {
                if bc == Boundary::Periodic {
                    Some(v.rem_euclid(len as i64) as usize)
                } else if v >= 0 && (v as usize) < len {
                    Some(v as usize)
                } else {
                    None
                }
            };
            let nnn_a = Complex64::from_polar(0.5 * j * t, phi);
            let nnn_b = Complex64::from_polar(0.5 * j * t, -phi);
            let nn = Complex64::new(j, 0.0);
            let mut acc = CouplingAcc::new();
            for n1 in 0..nx {
                for n2 in 0..ny {
                    for &(d1, d2) in &NN {
                        if let (Some(c1), Some(c2)) =
                            (wrap(n1 as i64 + d1, nx), wrap(n2 as i64 + d2, ny))
                        {
                            acc.add(idx(n1, n2, 0), idx(c1, c2, 1), nn);
                        }
                    }
                    for &(d1, d2) in &NNN {
                        if let (Some(c1), Some(c2)) =
                            (wrap(n1 as i64 + d1, nx), wrap(n2 as i64 + d2, ny))
                        {
                            acc.add(idx(c1, c2, 0), idx(n1, n2, 0), nnn_a);
                            acc.add(idx(c1, c2, 1), idx(n1, n2, 1), nnn_b);
                        }
                    }
                }
            }
            let mut omega = vec![0.0; 2 * nx * ny];
            let mut labels = vec![SiteLabel { cell: [0, 0], sub: Sublattice::A }; 2 * nx * ny];
            let mut pos = vec![[0.0, 0.0]; 2 * nx * ny];
            let a1 = [3.0f64.sqrt(), 0.0];
            let a2 = [0.5 * 3.0f64.sqrt(), 1.5];
            for n1 in 0..nx {
                for n2 in 0..ny {
                    let base = [
                        n1 as f64 * a1[0] + n2 as f64 * a2[0],
                        n1 as f64 * a1[1] + n2 as f64 * a2[1],
                    ];
                    let ia = idx(n1, n2, 0);
                    let ib = idx(n1, n2, 1);
                    omega[ia] = omega_c + 0.5 * m * j;
                    omega[ib] = omega_c - 0.5 * m * j;
                    labels[ia] = SiteLabel { cell: [n1 as i64, n2 as i64], sub: Sublattice::A };
                    labels[ib] = SiteLabel { cell: [n1 as i64, n2 as i64], sub: Sublattice::B };
                    pos[ia] = base;
                    pos[ib] = [base[0], base[1] + 1.0];
                }
            }
            let bath = BathGraph::new(omega, acc.into_list(), BathMeta::new(2, 1, bc, "haldane"))?
                .with_labels(labels)?
                .with_positions(pos)?;
            Ok(bath)
        }
    }
}

/// Closed-form bandgap (midpoint, width) for the gapped zoo members.
pub fn analytic_gap(p: &ModelParams) -> Result<GapInfo, ModelError> {
    p.validate()?;
    match *p {
        ModelParams::Ssh { delta, omega_c, j, .. } => Ok(GapInfo {
            mid: omega_c,
            width: 4.0 * delta.abs() * j,
        }),
        ModelParams::Creutz { m, alpha, omega_c, j, .. } => {
            // Band extrema sit at k = 0 and k = π for every |m| <= 1, so the
            // gap is the smallest of the four edge combinations
            // 4δ± J and 2(δ₊ + δ₋ ± 2cos α) J with δ± = |m ± 1|; the matching
            // midpoints are ω_c ± 2J cos α (direct) and ω_c ∓ 2mJ (indirect).
            let dp = (m + 1.0).abs();
            let dm = (m - 1.0).abs();
            let ca = alpha.cos();
            let cands = [
                (4.0 * dm, omega_c + 2.0 * ca * j), // both edges at k = 0
                (4.0 * dp, omega_c - 2.0 * ca * j), // both edges at k = π
                (2.0 * (dp + dm + 2.0 * ca), omega_c - 2.0 * m * j),
                (2.0 * (dp + dm - 2.0 * ca), omega_c + 2.0 * m * j),
            ];
            let (width, mid) = cands
                .iter()
                .cloned()
                .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
                .unwrap();
            Ok(GapInfo {
                mid,
                width: (width * j).max(0.0),
            })
        }
        ModelParams::Haldane { m, t, phi, omega_c, j, .. } => Ok(GapInfo {
            mid: omega_c - 1.5 * t * phi.cos() * j,
            width: (m.abs() - 3.0 * 3.0f64.sqrt() * t * phi.sin().abs()).abs() * j,
        }),
        ModelParams::Dimer { .. } => Err(ModelError::Unsupported("dimer")),
        ModelParams::Chain { .. } => Err(ModelError::Unsupported("chain")),
    }
}

/// Chain dispersion ω_k = ω_c − 2J cos k under the −J hopping convention.
pub fn chain_dispersion(p: &ModelParams, k: f64) -> Result<f64, ModelError> {
    match *p {
        ModelParams::Chain { omega_c, j, .. } => Ok(omega_c - 2.0 * j * k.cos()),
        _ => Err(ModelError::Unsupported(p.variant_name())),
    }
}

/// Bloch Hamiltonian at reduced wavevector (f1, f2) ∈ [0,1)², i.e.
/// k = f1 b1 + f2 b2. One-dimensional models ignore f2.
pub fn bloch_h(p: &ModelParams, f1: f64, f2: f64) -> Result<Array2<Complex64>, ModelError> {
    p.validate()?;
    let phase = |f: f64| Complex64::from_polar(1.0, 2.0 * PI * f);
    match *p {
        ModelParams::Chain { omega_c, j, .. } => {
            let k = 2.0 * PI * f1;
            let mut h = Array2::zeros((1, 1));
            h[[0, 0]] = Complex64::new(omega_c - 2.0 * j * k.cos(), 0.0);
            Ok(h)
        }
        ModelParams::Ssh { delta, omega_c, j, .. } => {
            let q = Complex64::new(j * (1.0 - delta), 0.0)
                + Complex64::new(j * (1.0 + delta), 0.0) * phase(-f1);
            let mut h = Array2::zeros((2, 2));
            h[[0, 0]] = Complex64::new(omega_c, 0.0);
            h[[1, 1]] = Complex64::new(omega_c, 0.0);
            h[[0, 1]] = q;
            h[[1, 0]] = q.conj();
            Ok(h)
        }
        ModelParams::Creutz { m, alpha, omega_c, j, .. } => {
            let k = 2.0 * PI * f1;
            let mut h = Array2::zeros((2, 2));
            h[[0, 0]] = Complex64::new(omega_c + 2.0 * j * (k + alpha).cos(), 0.0);
            h[[1, 1]] = Complex64::new(omega_c + 2.0 * j * (k - alpha).cos(), 0.0);
            let off = Complex64::new(-2.0 * m * j + 2.0 * j * k.cos(), 0.0);
            h[[0, 1]] = off;
            h[[1, 0]] = off;
            Ok(h)
        }
        ModelParams::Haldane { m, t, phi, omega_c, j, .. } => {
            // Cell displacements as in build_model.
            const NN: [(f64, f64); 3] = [(0.0, 0.0), (0.0, -1.0), (1.0, -1.0)];
            const NNN: [(f64, f64); 3] = [(-1.0, 0.0), (1.0, -1.0), (0.0, 1.0)];
            let mut h = Array2::zeros((2, 2));
            let mut ab = Complex64::new(0.0, 0.0);
            for &(d1, d2) in &NN {
                ab += Complex64::new(j, 0.0) * phase(f1 * d1 + f2 * d2);
            }
            let mut aa = Complex64::new(0.0, 0.0);
            let mut bb = Complex64::new(0.0, 0.0);
            for &(d1, d2) in &NNN {
                // ⟨s(c+Δ)|H|s(c)⟩ contributes e^{-ik·Δ} on the diagonal;
                // adding the reverse hops doubles the real part.
                aa += Complex64::from_polar(0.5 * j * t, phi) * phase(-(f1 * d1 + f2 * d2));
                bb += Complex64::from_polar(0.5 * j * t, -phi) * phase(-(f1 * d1 + f2 * d2));
            }
            h[[0, 0]] = Complex64::new(omega_c + 0.5 * m * j + 2.0 * aa.re, 0.0);
            h[[1, 1]] = Complex64::new(omega_c - 0.5 * m * j + 2.0 * bb.re, 0.0);
            h[[0, 1]] = ab;
            h[[1, 0]] = ab.conj();
            Ok(h)
        }
        ModelParams::Dimer { .. } => Err(ModelError::Unsupported("dimer")),
    }
}

fn eig2_hermitian(h: &Array2<Complex64>) -> (f64, f64) {
    debug_assert_eq!(h.nrows(), 2);
    let avg = 0.5 * (h[[0, 0]].re + h[[1, 1]].re);
    let dz = 0.5 * (h[[0, 0]].re - h[[1, 1]].re);
    let r = (dz * dz + h[[0, 1]].norm_sqr()).sqrt();
    (avg - r, avg + r)
}

/// Numerical bandgap by dense Bloch sampling (nk points per BZ axis).
/// Equals the real-space periodic spectrum when nk matches the cell count.
pub fn bloch_gap(p: &ModelParams, nk: usize) -> Result<GapInfo, ModelError> {
    p.validate()?;
    let two_d = matches!(p, ModelParams::Haldane { .. });
    let mut lower_max = f64::NEG_INFINITY;
    let mut upper_min = f64::INFINITY;
    let nk2 = if two_d { nk } else { 1 };
    for q1 in 0..nk {
        for q2 in 0..nk2 {
            let h = bloch_h(p, q1 as f64 / nk as f64, q2 as f64 / nk2 as f64)?;
            if h.nrows() == 1 {
                return Err(ModelError::Unsupported(p.variant_name()));
            }
            let (lo, hi) = eig2_hermitian(&h);
            lower_max = lower_max.max(lo);
            upper_min = upper_min.min(hi);
        }
    }
    let width = (upper_min - lower_max).max(0.0);
    Ok(GapInfo {
        mid: 0.5 * (upper_min + lower_max),
        width,
    })
}

/// Per-k Bloch Hamiltonians on an Nk (× Nk) reciprocal grid; exactly
/// periodic under k → k + G by construction.
pub struct BlochMap {
    pub nk1: usize,
    pub nk2: usize,
    pub dim: usize,
    h: Vec<Array2<Complex64>>,
}

impl BlochMap {
    pub fn build(p: &ModelParams, nk: usize) -> Result<Self, ModelError> {
        let two_d = matches!(p, ModelParams::Haldane { .. });
        let nk2 = if two_d { nk } else { 1 };
        let mut h = Vec::with_capacity(nk * nk2);
        for q1 in 0..nk {
            for q2 in 0..nk2 {
                h.push(bloch_h(p, q1 as f64 / nk as f64, q2 as f64 / nk2 as f64)?);
            }
        }
        let dim = h[0].nrows();
        Ok(Self { nk1: nk, nk2, dim, h })
    }

    pub fn at(&self, q1: usize, q2: usize) -> &Array2<Complex64> {
        &self.h[(q1 % self.nk1) * self.nk2 + (q2 % self.nk2)]
    }
}

/// The vacancy site scenarios default to: a central a-site.
pub fn default_vacancy_site(p: &ModelParams, bath: &BathGraph) -> SiteId {
    match *p {
        ModelParams::Dimer { .. } => SiteId(0),
        ModelParams::Chain { n, .. } => SiteId(n / 2),
        ModelParams::Ssh { .. } | ModelParams::Creutz { .. } => SiteId(0),
        ModelParams::Haldane { nx, ny, .. } => bath
            .site_by_label(&SiteLabel {
                cell: [(nx / 2) as i64, (ny / 2) as i64],
                sub: Sublattice::A,
            })
            .unwrap_or(SiteId(0)),
    }
}
