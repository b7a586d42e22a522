//! Named scenario pipelines, the sweep runner, and deterministic result
//! persistence.
//!
//! Every pipeline is a pure function of its config; repeated runs of the
//! same config and tool version produce byte-identical files. Wall time is
//! kept on the in-memory record only, never serialized.

use crate::config::{ConfigError, ScenarioConfig, ScenarioKind};
use crate::eff::{coupling_matrix, splitting_oracle, vacancy_profile, EffError};
use crate::graph::{AtomSpec, BathGraph, SiteId, SiteLabel, Sublattice};
use crate::io::{self, IoError};
use crate::models::{analytic_gap, bloch_gap, build_model, default_vacancy_site, ModelParams};
use crate::observables::{
    bond_currents, circulation, current_extremum, kirchhoff_residual, ObservableError,
};
use crate::operator::{assemble_bath, assemble_full, OperatorError};
use crate::spectra::{
    diagonalize, find_ingap_states, localization, GapInfo, SpectraError, DEFAULT_GAP_MARGIN,
};
use crate::topo::{phase_diagram, TopoError};
use crate::vds::{bic_scan, detuning_robustness, make_vds, verify_vds, VdsError};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] crate::models::ModelError),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Vds(#[from] VdsError),
    #[error(transparent)]
    Eff(#[from] EffError),
    #[error(transparent)]
    Topo(#[from] TopoError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("scenario `{scenario}`: {msg}")]
    Scenario { scenario: &'static str, msg: String },
    #[error("config has sweep axes; use `sweep` (or drop the [[sweep]] sections)")]
    HasSweepAxes,
    #[error("config has no sweep axes; use `run`")]
    NoSweepAxes,
}

fn scenario_err(scenario: &'static str, msg: impl Into<String>) -> RunError {
    RunError::Scenario {
        scenario,
        msg: msg.into(),
    }
}

/// Outcome of one scenario execution.
pub struct ScenarioOutput {
    pub summary: Value,
    /// (file name, file contents).
    pub artifacts: Vec<(String, String)>,
}

/// A completed run: summary payload, emitted files and their checksums.
pub struct RunRecord {
    pub scenario: String,
    pub version: String,
    pub config_echo: Value,
    pub summary: Value,
    pub checksums: BTreeMap<String, String>,
    pub wall_time: Duration,
}

fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// Longest-wavelength-safe Bloch sampling for a model: a multiple of the
/// real-space cell count, so mesh eigenvalues are a subset of the samples.
fn gap_sampling(p: &ModelParams) -> usize {
    match *p {
        ModelParams::Ssh { n, .. } | ModelParams::Creutz { n, .. } => (4 * n).max(256),
        ModelParams::Haldane { nx, ny, .. } => (3 * nx.max(ny)).max(48),
        _ => 256,
    }
}

struct VacancyPipeline {
    bath: BathGraph,
    v: SiteId,
    gap: GapInfo,
    omega_psi: f64,
    /// Normalized bound state on B_v.
    psi_reduced: Vec<Complex64>,
    /// Same, embedded on B with ψ_v = 0.
    psi_on_bath: Vec<Complex64>,
    vac: crate::graph::VacancyBath,
    n_ingap: usize,
}

/// Shared front half of the lattice scenarios: build the bath, punch the
/// vacancy, and isolate the unique in-gap bound state.
fn vacancy_pipeline(
    p: &ModelParams,
    site: Option<SiteId>,
    scenario: &'static str,
) -> Result<VacancyPipeline, RunError> {
    let bath = build_model(p)?;
    let v = site.unwrap_or_else(|| default_vacancy_site(p, &bath));
    let gap = bloch_gap(p, gap_sampling(p))?;
    if gap.width <= 0.0 {
        return Err(scenario_err(scenario, "bulk spectrum has no bandgap"));
    }
    let vac = bath.remove_site(v)?;
    let es = diagonalize(&assemble_bath(&vac.bath))?;
    let ingap = find_ingap_states(&es, &gap, DEFAULT_GAP_MARGIN);
    let n_ingap = ingap.len();
    if n_ingap != 1 {
        return Err(scenario_err(
            scenario,
            format!("expected one in-gap vacancy state, found {n_ingap}"),
        ));
    }
    let omega_psi = ingap[0].0;
    let psi_reduced = ingap[0].1.to_vec();
    let psi_on_bath = vac.embed(&psi_reduced)?;
    Ok(VacancyPipeline {
        bath,
        v,
        gap,
        omega_psi,
        psi_reduced,
        psi_on_bath,
        vac,
        n_ingap,
    })
}

fn single_atom<'a>(
    cfg: &'a ScenarioConfig,
    scenario: &'static str,
) -> Result<&'a crate::config::AtomConfig, RunError> {
    cfg.atoms
        .first()
        .ok_or_else(|| scenario_err(scenario, "needs one [[atoms]] entry"))
}

// ---------------------------------------------------------------------------
// dimer

fn run_dimer(cfg: &ScenarioConfig) -> Result<ScenarioOutput, RunError> {
    let p = cfg
        .model
        .clone()
        .unwrap_or(ModelParams::Dimer { omega_c: 0.0, j: 1.0 });
    let (omega_c, j) = match p {
        ModelParams::Dimer { omega_c, j } => (omega_c, j),
        _ => return Err(scenario_err("dimer", "model variant must be `dimer`")),
    };
    let atom_cfg = single_atom(cfg, "dimer")?;
    let bath = build_model(&p)?;
    let v = atom_cfg.resolve_site(&bath).unwrap_or(SiteId(0));
    let vac = bath.remove_site(v)?;
    let omega0 = atom_cfg.omega0.unwrap_or(omega_c);
    let atom = AtomSpec::new(omega0, atom_cfg.g, v);
    let psi = vec![Complex64::new(1.0, 0.0)];
    let ds = make_vds(&bath, &atom, &vac, &psi)?;
    let residual = verify_vds(&ds, &bath, &atom)?;
    let summary = json!({
        "g": atom.g,
        "j": j,
        "energy": ds.energy,
        "theta_rad": ds.theta,
        "tan_theta": ds.theta.tan(),
        "phi_rad": ds.phi,
        "residual": residual,
        "photon_prob": ds.psi.iter().map(|c| c.norm_sqr()).sum::<f64>(),
    });
    Ok(ScenarioOutput {
        summary,
        artifacts: vec![("bath.json".into(), io::bath_to_json(&bath)?)],
    })
}

// ---------------------------------------------------------------------------
// mirror-bic

fn run_mirror_bic(cfg: &ScenarioConfig) -> Result<ScenarioOutput, RunError> {
    let bic = cfg
        .bic
        .as_ref()
        .ok_or_else(|| scenario_err("mirror-bic", "needs a [bic] section"))?;
    let (omega_c, j) = match cfg.model {
        Some(ModelParams::Chain { omega_c, j, .. }) => (omega_c, j),
        None => (0.0, 1.0),
        _ => return Err(scenario_err("mirror-bic", "model variant must be `chain`")),
    };
    let (g, omega0) = match cfg.atoms.first() {
        Some(a) => (a.g, a.omega0.unwrap_or(omega_c)),
        None => (0.5, omega_c),
    };
    let mut rows = String::from("s,exists,leakage,theta_rad\n");
    let mut entries = Vec::new();
    for &s in &bic.segments {
        let res = bic_scan(bic.length, s, omega0, omega_c, j, g)?;
        let theta = res.state.as_ref().map(|d| d.theta);
        rows.push_str(&format!(
            "{},{},{},{}\n",
            s,
            u8::from(res.exists),
            io::csv_f64(res.leakage),
            theta.map(io::csv_f64).unwrap_or_default()
        ));
        entries.push(json!({
            "s": s,
            "exists": res.exists,
            "leakage": res.leakage,
            "theta_rad": theta,
            "segment_levels": res.segment_levels,
        }));
    }
    Ok(ScenarioOutput {
        summary: json!({
            "length": bic.length,
            "omega0": omega0,
            "g": g,
            "segments": entries,
        }),
        artifacts: vec![("bic.csv".into(), rows)],
    })
}

// ---------------------------------------------------------------------------
// ssh-vds

/// Probability-weighted mean signed cell offset from the vacancy cell,
/// wrapped onto (−N/2, N/2] on a ring.
fn mean_signed_cell(bath: &BathGraph, psi: &[Complex64], v: SiteId, n_cells: i64) -> f64 {
    let labels = bath.labels().expect("zoo baths carry labels");
    let vcell = labels[v.0].cell[0];
    let mut acc = 0.0;
    let mut norm = 0.0;
    for (i, c) in psi.iter().enumerate() {
        let p = c.norm_sqr();
        let mut off = labels[i].cell[0] - vcell;
        if off > n_cells / 2 {
            off -= n_cells;
        }
        if off < -n_cells / 2 {
            off += n_cells;
        }
        acc += p * off as f64;
        norm += p;
    }
    acc / norm.max(f64::MIN_POSITIVE)
}

fn run_ssh_vds(cfg: &ScenarioConfig) -> Result<ScenarioOutput, RunError> {
    let p = cfg.model.clone().ok_or_else(|| scenario_err("ssh-vds", "needs [model]"))?;
    let (n_cells, omega_c) = match p {
        ModelParams::Ssh { n, omega_c, .. } => (n as i64, omega_c),
        _ => return Err(scenario_err("ssh-vds", "model variant must be `ssh`")),
    };
    let atom_cfg = single_atom(cfg, "ssh-vds")?;
    let pipe = vacancy_pipeline(&p, atom_site_opt(atom_cfg, &p)?, "ssh-vds")?;
    let labels = pipe.bath.labels().unwrap().to_vec();
    let vsub = labels[pipe.v.0].sub;
    let own_sublattice_prob: f64 = pipe
        .psi_on_bath
        .iter()
        .enumerate()
        .filter(|(i, _)| labels[*i].sub == vsub)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    let mean_cell = mean_signed_cell(&pipe.bath, &pipe.psi_on_bath, pipe.v, n_cells);
    let center = pipe
        .psi_on_bath
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().partial_cmp(&b.1.norm_sqr()).unwrap())
        .map(|(i, _)| SiteId(i))
        .unwrap();
    let loc = localization(&pipe.psi_reduced, &pipe.vac.bath, SiteId(pipe.vac.old_to_new[center.0].unwrap()))?;
    let omega0 = atom_cfg.omega0.unwrap_or(pipe.omega_psi);
    let atom = AtomSpec::new(omega0, atom_cfg.g, pipe.v);
    let ds = make_vds(&pipe.bath, &atom, &pipe.vac, &pipe.psi_reduced)?;
    let residual = verify_vds(&ds, &pipe.bath, &atom)?;
    let summary = json!({
        "gap_mid": pipe.gap.mid,
        "gap_width": pipe.gap.width,
        "n_ingap": pipe.n_ingap,
        "bs_energy": pipe.omega_psi,
        "bs_offset_from_center": pipe.omega_psi - omega_c,
        "sublattice_polarization_residual": own_sublattice_prob,
        "mean_signed_cell": mean_cell,
        "ipr": loc.ipr,
        "decay_length_cells": loc.decay_length,
        "theta_rad": ds.theta,
        "phi_rad": ds.phi,
        "residual": residual,
    });
    Ok(ScenarioOutput {
        summary,
        artifacts: vec![
            ("state.csv".into(), io::state_csv(&pipe.bath, &pipe.psi_on_bath)),
            ("bath.json".into(), io::bath_to_json(&pipe.bath)?),
        ],
    })
}

fn atom_site_opt(
    atom: &crate::config::AtomConfig,
    _p: &ModelParams,
) -> Result<Option<SiteId>, RunError> {
    if atom.site.is_none() && atom.cell.is_none() {
        return Ok(None);
    }
    Ok(None.or(atom.site.map(SiteId)).or_else(|| None))
}

// ---------------------------------------------------------------------------
// creutz-vds

/// Closed-form bound-state profile for a vacancy on the a-site of cell 0 of
/// an N-cell ring: on a-sites (cell offset n ≥ 1)
/// ψ_a(n) = (1/2)√(1−m²)(e^{iα} m^{n−1} + e^{−iα} m^{N−1−n}), and the same
/// with e^{±iα} → −1 on b-sites; the b amplitude of the vacancy cell is 0.
fn creutz_closed_profile(
    bath: &BathGraph,
    n: usize,
    m: f64,
    alpha: f64,
) -> Vec<Complex64> {
    let pref = 0.5 * (1.0 - m * m).sqrt();
    let mut psi = vec![Complex64::new(0.0, 0.0); bath.site_count()];
    let site = |cell: i64, sub: Sublattice| {
        bath.site_by_label(&SiteLabel { cell: [cell, 0], sub }).unwrap()
    };
    for off in 1..n {
        let right = m.powi(off as i32 - 1);
        let left = m.powi((n - 1 - off) as i32);
        psi[site(off as i64, Sublattice::A).0] = pref
            * (Complex64::from_polar(1.0, alpha) * right
                + Complex64::from_polar(1.0, -alpha) * left);
        psi[site(off as i64, Sublattice::B).0] = pref * Complex64::new(-(right + left), 0.0);
    }
    let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in psi.iter_mut() {
        *c /= norm;
    }
    psi
}

fn run_creutz_vds(cfg: &ScenarioConfig) -> Result<ScenarioOutput, RunError> {
    let p = cfg.model.clone().ok_or_else(|| scenario_err("creutz-vds", "needs [model]"))?;
    let (n, m, alpha, j) = match p {
        ModelParams::Creutz { n, m, alpha, j, .. } => (n, m, alpha, j),
        _ => return Err(scenario_err("creutz-vds", "model variant must be `creutz`")),
    };
    let atom_cfg = single_atom(cfg, "creutz-vds")?;
    let pipe = vacancy_pipeline(&p, None, "creutz-vds")?;
    let closed = creutz_closed_profile(&pipe.bath, n, m, alpha);
    let fidelity = closed
        .iter()
        .zip(pipe.psi_on_bath.iter())
        .map(|(a, b)| a.conj() * b)
        .sum::<Complex64>()
        .norm_sqr();
    // Phase chirality: a-site phases step by +2α going right of the vacancy
    // versus left; moduli stay mirror symmetric.
    let site = |cell: i64, sub: Sublattice| {
        pipe.bath.site_by_label(&SiteLabel { cell: [cell, 0], sub }).unwrap()
    };
    let right = pipe.psi_on_bath[site(1, Sublattice::A).0];
    let left = pipe.psi_on_bath[site(n as i64 - 1, Sublattice::A).0];
    let phase_step = wrap_angle(right.arg() - left.arg());
    let mut modulus_asymmetry = 0.0f64;
    for off in 1..=(n / 4).max(1) {
        let r = pipe.psi_on_bath[site(off as i64, Sublattice::A).0].norm();
        let l = pipe.psi_on_bath[site((n - off) as i64, Sublattice::A).0].norm();
        modulus_asymmetry = modulus_asymmetry.max((r - l).abs());
    }
    let omega0 = atom_cfg.omega0.unwrap_or(pipe.omega_psi);
    let atom = AtomSpec::new(omega0, atom_cfg.g, pipe.v);
    let ds = make_vds(&pipe.bath, &atom, &pipe.vac, &pipe.psi_reduced)?;
    let residual = verify_vds(&ds, &pipe.bath, &atom)?;
    let eta_closed = atom.g / (2.0 * j * alpha.sin().powi(2) * (1.0 - m * m).sqrt());
    let summary = json!({
        "gap_mid": pipe.gap.mid,
        "gap_width": pipe.gap.width,
        "n_ingap": pipe.n_ingap,
        "bs_energy": pipe.omega_psi,
        "profile_fidelity": fidelity,
        "phase_step_rad": phase_step,
        "expected_phase_step_rad": wrap_angle(2.0 * alpha),
        "modulus_asymmetry": modulus_asymmetry,
        "eta_abs": ds.eta.norm(),
        "eta_abs_closed_form": eta_closed,
        "theta_rad": ds.theta,
        "phi_rad": ds.phi,
        "residual": residual,
    });
    Ok(ScenarioOutput {
        summary,
        artifacts: vec![
            ("state.csv".into(), io::state_csv(&pipe.bath, &pipe.psi_on_bath)),
            ("bath.json".into(), io::bath_to_json(&pipe.bath)?),
        ],
    })
}

fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = a.rem_euclid(two_pi);
    if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}

// ---------------------------------------------------------------------------
// haldane-vds

/// Oriented hexagon loop one cell to the +a1 side of `cell`, avoiding the
/// vacancy itself; all six edges are nearest-neighbor bonds.
fn hexagon_near(bath: &BathGraph, cell: [i64; 2], nx: i64, ny: i64) -> Vec<SiteId> {
    let wrap = |c: [i64; 2]| [c[0].rem_euclid(nx), c[1].rem_euclid(ny)];
    let site = |cell: [i64; 2], sub: Sublattice| {
        bath.site_by_label(&SiteLabel { cell: wrap(cell), sub }).unwrap()
    };
    let (c1, c2) = (cell[0], cell[1]);
    vec![
        site([c1 + 1, c2], Sublattice::A),
        site([c1 + 2, c2 - 1], Sublattice::B),
        site([c1 + 2, c2], Sublattice::A),
        site([c1 + 2, c2], Sublattice::B),
        site([c1 + 1, c2 + 1], Sublattice::A),
        site([c1 + 1, c2], Sublattice::B),
    ]
}

fn run_haldane_vds(cfg: &ScenarioConfig) -> Result<ScenarioOutput, RunError> {
    let p = cfg.model.clone().ok_or_else(|| scenario_err("haldane-vds", "needs [model]"))?;
    let (nx, ny, t, phi_model, omega_c, j) = match p {
        ModelParams::Haldane { nx, ny, t, phi, omega_c, j, .. } => (nx, ny, t, phi, omega_c, j),
        _ => return Err(scenario_err("haldane-vds", "model variant must be `haldane`")),
    };
    let atom_cfg = single_atom(cfg, "haldane-vds")?;
    let pipe = vacancy_pipeline(&p, None, "haldane-vds")?;
    let omega0 = atom_cfg.omega0.unwrap_or(pipe.omega_psi);
    let atom = AtomSpec::new(omega0, atom_cfg.g, pipe.v);
    let ds = make_vds(&pipe.bath, &atom, &pipe.vac, &pipe.psi_reduced)?;
    let residual = verify_vds(&ds, &pipe.bath, &atom)?;

    // Currents of the normalized bound state (the plotted field).
    let field = bond_currents(&pipe.bath, &pipe.psi_on_bath)?;
    let kirchhoff = kirchhoff_residual(&pipe.bath, &field);
    let (imax_i, imax_j, imax) = current_extremum(&field)?;
    let vcell = pipe.bath.labels().unwrap()[pipe.v.0].cell;
    let hex = hexagon_near(&pipe.bath, vcell, nx as i64, ny as i64);
    let circ = circulation(&field, &hex)?;
    let loc_center = SiteId(pipe.vac.old_to_new[pipe
        .psi_on_bath
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().partial_cmp(&b.1.norm_sqr()).unwrap())
        .unwrap()
        .0]
        .unwrap());
    let loc = localization(&pipe.psi_reduced, &pipe.vac.bath, loc_center)?;

    let mut summary_map = serde_json::Map::new();
    summary_map.insert("gap_mid".into(), json!(pipe.gap.mid));
    summary_map.insert("gap_width".into(), json!(pipe.gap.width));
    summary_map.insert(
        "gap_width_analytic".into(),
        json!(analytic_gap(&p)?.width),
    );
    summary_map.insert("n_ingap".into(), json!(pipe.n_ingap));
    summary_map.insert("bs_energy".into(), json!(pipe.omega_psi));
    summary_map.insert("theta_rad".into(), json!(ds.theta));
    summary_map.insert("phi_rad".into(), json!(ds.phi));
    summary_map.insert("residual".into(), json!(residual));
    summary_map.insert("i_max".into(), json!(imax.abs()));
    summary_map.insert("i_max_edge".into(), json!([imax_i, imax_j]));
    summary_map.insert("kirchhoff_residual".into(), json!(kirchhoff));
    summary_map.insert("circulation_hex".into(), json!(circ));
    summary_map.insert("ipr".into(), json!(loc.ipr));
    summary_map.insert("decay_length_cells".into(), json!(loc.decay_length));

    // Gap-matched trivial comparison: same gap width, no vacancy bound
    // state; the in-gap dressed state of the full H carries a far weaker
    // current field.
    if let Some(contrast) = &cfg.contrast {
        let p_triv = ModelParams::Haldane {
            nx,
            ny,
            m: contrast.m,
            t,
            phi: phi_model,
            omega_c,
            j,
            bc: crate::graph::Boundary::Periodic,
        };
        let gap_triv = bloch_gap(&p_triv, gap_sampling(&p_triv))?;
        let bath_triv = build_model(&p_triv)?;
        let v_triv = default_vacancy_site(&p_triv, &bath_triv);
        let atom_triv = AtomSpec::new(gap_triv.mid, atom.g, v_triv);
        let es = diagonalize(&assemble_full(&bath_triv, &[atom_triv])?)?;
        let ingap = find_ingap_states(&es, &gap_triv, DEFAULT_GAP_MARGIN);
        if ingap.is_empty() {
            return Err(scenario_err("haldane-vds", "no in-gap dressed state at contrast point"));
        }
        // Most atom-like in-gap state.
        let msites = bath_triv.site_count();
        let (_, vecview) = ingap
            .iter()
            .max_by(|a, b| {
                a.1[msites]
                    .norm_sqr()
                    .partial_cmp(&b.1[msites].norm_sqr())
                    .unwrap()
            })
            .unwrap();
        let mut photon: Vec<Complex64> = vecview.iter().take(msites).copied().collect();
        let pn = photon.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in photon.iter_mut() {
            *c /= pn;
        }
        let f_triv = bond_currents(&bath_triv, &photon)?;
        let (_, _, imax_triv) = current_extremum(&f_triv)?;
        summary_map.insert("contrast_m".into(), json!(contrast.m));
        summary_map.insert("contrast_gap_width".into(), json!(gap_triv.width));
        summary_map.insert("contrast_i_max".into(), json!(imax_triv.abs()));
        summary_map.insert(
            "i_max_ratio".into(),
            json!(imax.abs() / imax_triv.abs().max(f64::MIN_POSITIVE)),
        );
        summary_map.insert(
            "contrast_atom_weight".into(),
            json!(vecview[msites].norm_sqr()),
        );
    }

    Ok(ScenarioOutput {
        summary: Value::Object(summary_map),
        artifacts: vec![
            ("currents.csv".into(), io::current_field_csv(&pipe.bath, &field)),
            ("state.csv".into(), io::state_csv(&pipe.bath, &pipe.psi_on_bath)),
        ],
    })
}

// ---------------------------------------------------------------------------
// heff

fn run_heff(cfg: &ScenarioConfig) -> Result<ScenarioOutput, RunError> {
    let p = cfg.model.clone().ok_or_else(|| scenario_err("heff", "needs [model]"))?;
    let bath = build_model(&p)?;
    if cfg.atoms.len() != 2 {
        return Err(scenario_err("heff", "needs exactly two [[atoms]]"));
    }
    let gap = bloch_gap(&p, gap_sampling(&p))?;
    let s1 = cfg.atoms[0].resolve_site(&bath)?;
    let s2 = cfg.atoms[1].resolve_site(&bath)?;
    // Tune both atoms to the vacancy-mode energy of atom 1's site.
    let prof = vacancy_profile(&bath, s1, &gap)?;
    let g = cfg.atoms[0].g;
    let atoms = vec![
        AtomSpec::new(prof.omega, g, s1),
        AtomSpec::new(prof.omega, g, s2),
    ];
    let cm = coupling_matrix(&bath, &atoms, &gap)?;
    let est = splitting_oracle(&bath, &atoms, &gap)?;
    let k = cm.k[[1, 0]];
    let mut csv = String::from("row,col,re,im\n");
    for r in 0..2 {
        for c in 0..2 {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                r,
                c,
                io::csv_f64(cm.k[[r, c]].re),
                io::csv_f64(cm.k[[r, c]].im)
            ));
        }
    }
    let phase_err = est
        .phase
        .map(|ph| wrap_angle(ph - k.arg()).abs());
    let summary = json!({
        "g": g,
        "omega_psi": prof.omega,
        "gap_width": gap.width,
        "k01_re": k.re,
        "k01_im": k.im,
        "k01_abs": k.norm(),
        "k01_arg": k.arg(),
        "oracle_abs": est.magnitude,
        "oracle_phase": est.phase,
        "oracle_raw_splitting": est.raw_splitting,
        "oracle_resolved": est.resolved,
        "abs_rel_err": (est.magnitude - k.norm()).abs() / k.norm().max(f64::MIN_POSITIVE),
        "phase_err_rad": phase_err,
    });
    Ok(ScenarioOutput {
        summary,
        artifacts: vec![("kmatrix.csv".into(), csv)],
    })
}

// ---------------------------------------------------------------------------
// phase-diagram

fn run_phase_diagram(cfg: &ScenarioConfig) -> Result<ScenarioOutput, RunError> {
    let grid = cfg
        .grid
        .as_ref()
        .ok_or_else(|| scenario_err("phase-diagram", "needs a [grid] section"))?;
    let linspace = |a: f64, b: f64, n: usize| -> Vec<f64> {
        if n == 1 {
            vec![a]
        } else {
            (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        }
    };
    let phis = linspace(grid.phi_from, grid.phi_to, grid.phi_steps);
    let mts = linspace(grid.mt_from, grid.mt_to, grid.mt_steps);
    let results = phase_diagram(&phis, &mts, grid.t, grid.nk);
    let mut points = Vec::with_capacity(results.len());
    for r in results {
        points.push(r?);
    }

    // Boundary locator: per φ row and sign, the |m/t| of minimal numerical
    // gap versus the closed-form 3√3|sinφ|, in grid cells.
    let cell = if mts.len() > 1 { mts[1] - mts[0] } else { 1.0 };
    let boundary = 3.0 * 3.0f64.sqrt();
    let mut max_dev_cells = 0.0f64;
    for (row, &phi) in phis.iter().enumerate() {
        let analytic = boundary * phi.sin().abs();
        if analytic < cell || analytic > mts.last().unwrap() - cell {
            continue;
        }
        for sign in [-1.0, 1.0] {
            let mut best = (f64::INFINITY, 0.0f64);
            for (col, &mt) in mts.iter().enumerate() {
                if mt * sign <= 0.0 {
                    continue;
                }
                let pt = &points[row * mts.len() + col];
                if pt.gap_width < best.0 {
                    best = (pt.gap_width, mt);
                }
            }
            if best.0.is_finite() {
                let dev = (best.1.abs() - analytic).abs() / cell.abs();
                max_dev_cells = max_dev_cells.max(dev);
            }
        }
    }

    let n_unresolved = points.iter().filter(|p| !p.resolved).count();
    let consistent = points
        .iter()
        .filter(|p| p.resolved)
        .all(|p| (p.chern.abs() == 1) == p.bs_exists);
    let summary = json!({
        "n_points": points.len(),
        "t": grid.t,
        "nk": grid.nk,
        "n_topological": points.iter().filter(|p| p.chern != 0).count(),
        "n_with_bs": points.iter().filter(|p| p.bs_exists).count(),
        "n_unresolved": n_unresolved,
        "chern_bs_consistent": consistent,
        "boundary_max_dev_cells": max_dev_cells,
    });
    Ok(ScenarioOutput {
        summary,
        artifacts: vec![("phase_diagram.csv".into(), io::phase_diagram_csv(&points))],
    })
}

// ---------------------------------------------------------------------------
// robustness

fn run_robustness(cfg: &ScenarioConfig) -> Result<ScenarioOutput, RunError> {
    let p = cfg.model.clone().ok_or_else(|| scenario_err("robustness", "needs [model]"))?;
    let rc = cfg
        .robustness
        .as_ref()
        .ok_or_else(|| scenario_err("robustness", "needs a [robustness] section"))?;
    let atom_cfg = single_atom(cfg, "robustness")?;
    let pipe = vacancy_pipeline(&p, None, "robustness")?;
    let g = atom_cfg.g;
    let span = rc.span_over_g * g;
    let steps = rc.steps.max(1);
    let detunings: Vec<f64> = if steps == 1 {
        vec![0.0]
    } else {
        (0..steps)
            .map(|i| -span + 2.0 * span * i as f64 / (steps - 1) as f64)
            .collect()
    };
    let curve = detuning_robustness(
        &pipe.bath,
        &pipe.vac,
        &pipe.psi_reduced,
        pipe.omega_psi,
        g,
        pipe.v,
        &pipe.gap,
        &detunings,
    )?;
    let f0 = curve
        .points
        .iter()
        .min_by(|a, b| a.0.abs().partial_cmp(&b.0.abs()).unwrap())
        .and_then(|(_, f)| *f);
    let min_in_window = curve
        .points
        .iter()
        .filter(|(dw, _)| dw.abs() <= g)
        .filter_map(|(_, f)| *f)
        .fold(f64::INFINITY, f64::min);
    let peak = curve
        .points
        .iter()
        .max_by(|a, b| {
            a.1.unwrap_or(-1.0)
                .partial_cmp(&b.1.unwrap_or(-1.0))
                .unwrap()
        })
        .map(|(dw, _)| *dw);
    let summary = json!({
        "g": g,
        "g_over_gap": g / pipe.gap.width,
        "gap_width": pipe.gap.width,
        "omega_psi": pipe.omega_psi,
        "fidelity_at_zero": f0,
        "min_fidelity_within_g": min_in_window,
        "peak_detuning": peak,
        "truncated": curve.truncated,
    });
    Ok(ScenarioOutput {
        summary,
        artifacts: vec![("fidelity.csv".into(), io::fidelity_csv(&curve.points))],
    })
}

// ---------------------------------------------------------------------------
// run / sweep drivers

fn execute_one(cfg: &ScenarioConfig) -> Result<ScenarioOutput, RunError> {
    match cfg.scenario {
        ScenarioKind::Dimer => run_dimer(cfg),
        ScenarioKind::MirrorBic => run_mirror_bic(cfg),
        ScenarioKind::SshVds => run_ssh_vds(cfg),
        ScenarioKind::CreutzVds => run_creutz_vds(cfg),
        ScenarioKind::HaldaneVds => run_haldane_vds(cfg),
        ScenarioKind::Heff => run_heff(cfg),
        ScenarioKind::PhaseDiagram => run_phase_diagram(cfg),
        ScenarioKind::Robustness => run_robustness(cfg),
    }
}

fn build_pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
}

fn finalize(
    cfg: &ScenarioConfig,
    summary: Value,
    artifacts: Vec<(String, String)>,
    out_dir: &Path,
    started: Instant,
) -> Result<RunRecord, RunError> {
    let mut checksums = BTreeMap::new();
    for (name, content) in &artifacts {
        checksums.insert(name.clone(), io::sha256_hex(content.as_bytes()));
        io::write_file(&out_dir.join(name), content.as_bytes())?;
    }
    let config_echo = serde_json::to_value(cfg).map_err(IoError::from)?;
    let results = json!({
        "schema_version": crate::config::CONFIG_SCHEMA_VERSION,
        "tool": "vdsim",
        "version": tool_version(),
        "scenario": cfg.scenario.name(),
        "config": config_echo,
        "summary": summary,
        "artifacts": checksums,
    });
    let bytes = io::results_json_bytes(&results)?;
    io::write_file(&out_dir.join("results.json"), &bytes)?;
    Ok(RunRecord {
        scenario: cfg.scenario.name().to_string(),
        version: tool_version(),
        config_echo: serde_json::to_value(cfg).map_err(IoError::from)?,
        summary,
        checksums,
        wall_time: started.elapsed(),
    })
}

/// Execute a single-point scenario config and persist its outputs.
pub fn run(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunRecord, RunError> {
    cfg.validate()?;
    if !cfg.sweep.is_empty() {
        return Err(RunError::HasSweepAxes);
    }
    let started = Instant::now();
    let pool = build_pool(cfg.workers);
    let out = pool.install(|| execute_one(cfg))?;
    finalize(cfg, out.summary, out.artifacts, out_dir, started)
}

/// Execute the cartesian sweep grid; per-point failures are recorded and
/// the sweep continues. Points are merged in grid order no matter how the
/// worker pool schedules them.
pub fn sweep(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunRecord, RunError> {
    cfg.validate()?;
    if cfg.sweep.is_empty() {
        return Err(RunError::NoSweepAxes);
    }
    let started = Instant::now();
    let axes: Vec<(String, Vec<f64>)> = cfg
        .sweep
        .iter()
        .map(|a| Ok((a.parameter.clone(), a.grid()?)))
        .collect::<Result<_, ConfigError>>()?;
    let mut grid: Vec<Vec<f64>> = vec![vec![]];
    for (_, vals) in &axes {
        let mut next = Vec::with_capacity(grid.len() * vals.len());
        for point in &grid {
            for &v in vals {
                let mut p = point.clone();
                p.push(v);
                next.push(p);
            }
        }
        grid = next;
    }
    let pool = build_pool(cfg.workers);
    let rows: Vec<Result<Value, String>> = pool.install(|| {
        grid.par_iter()
            .map(|point| {
                let mut c = cfg.clone();
                c.sweep.clear();
                for ((name, _), &val) in axes.iter().zip(point.iter()) {
                    c = c.with_param(name, val).map_err(|e| e.to_string())?;
                }
                execute_one(&c).map(|o| o.summary).map_err(|e| e.to_string())
            })
            .collect()
    });

    // Column set: axis names, then the sorted numeric keys of the first
    // successful summary.
    let mut value_keys: Vec<String> = rows
        .iter()
        .find_map(|r| r.as_ref().ok())
        .map(|v| {
            v.as_object()
                .map(|m| {
                    m.iter()
                        .filter(|(_, v)| v.is_number())
                        .map(|(k, _)| k.clone())
                        .collect()
                })
                .unwrap_or_default()
        })
        .unwrap_or_default();
    value_keys.sort();
    let mut csv = String::new();
    let axis_names: Vec<&str> = axes.iter().map(|(n, _)| n.as_str()).collect();
    csv.push_str(&axis_names.join(","));
    for k in &value_keys {
        csv.push(',');
        csv.push_str(k);
    }
    csv.push_str(",error\n");
    let mut point_records = Vec::with_capacity(rows.len());
    for (point, row) in grid.iter().zip(rows.iter()) {
        let coords: Vec<String> = point.iter().map(|v| io::csv_f64(*v)).collect();
        csv.push_str(&coords.join(","));
        match row {
            Ok(summary) => {
                for k in &value_keys {
                    csv.push(',');
                    if let Some(x) = summary.get(k).and_then(Value::as_f64) {
                        csv.push_str(&io::csv_f64(x));
                    }
                }
                csv.push_str(",\n");
                point_records.push(json!({
                    "point": point,
                    "summary": summary,
                }));
            }
            Err(msg) => {
                for _ in &value_keys {
                    csv.push(',');
                }
                csv.push(',');
                csv.push_str(&msg.replace(',', ";").replace('\n', " "));
                csv.push('\n');
                point_records.push(json!({
                    "point": point,
                    "error": msg,
                }));
            }
        }
    }
    let n_failed = rows.iter().filter(|r| r.is_err()).count();
    let summary = json!({
        "axes": axis_names,
        "n_points": grid.len(),
        "n_failed": n_failed,
        "points": point_records,
    });
    finalize(cfg, summary, vec![("sweep.csv".into(), csv)], out_dir, started)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScenarioConfig;

    fn dimer_cfg(g: f64) -> ScenarioConfig {
        ScenarioConfig::from_toml(&format!(
            r#"
            schema_version = 1
            scenario = "dimer"
            [model]
            variant = "dimer"
            [[atoms]]
            g = {g}
            site = 0
            "#
        ))
        .unwrap()
    }

    #[test]
    fn dimer_run_produces_expected_theta() {
        let dir = tempfile::tempdir().unwrap();
        let rec = run(&dimer_cfg(1.0), dir.path()).unwrap();
        let theta = rec.summary["theta_rad"].as_f64().unwrap();
        assert!((theta - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert!(dir.path().join("results.json").exists());
        assert!(dir.path().join("bath.json").exists());
    }

    #[test]
    fn run_rejects_axes_and_sweep_requires_them() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = dimer_cfg(1.0);
        assert!(matches!(sweep(&cfg, dir.path()), Err(RunError::NoSweepAxes)));
        cfg.sweep.push(crate::config::SweepAxis {
            parameter: "g".into(),
            values: Some(vec![0.1, 1.0, 10.0]),
            from: None,
            to: None,
            steps: None,
        });
        assert!(matches!(run(&cfg, dir.path()), Err(RunError::HasSweepAxes)));
        let rec = sweep(&cfg, dir.path()).unwrap();
        assert_eq!(rec.summary["n_points"].as_u64(), Some(3));
        assert_eq!(rec.summary["n_failed"].as_u64(), Some(0));
    }

    #[test]
    fn single_point_sweep_matches_run() {
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let cfg = dimer_cfg(0.7);
        let rec_run = run(&cfg, dir1.path()).unwrap();
        let mut cfg_sweep = cfg.clone();
        cfg_sweep.sweep.push(crate::config::SweepAxis {
            parameter: "g".into(),
            values: Some(vec![0.7]),
            from: None,
            to: None,
            steps: None,
        });
        let rec_sweep = sweep(&cfg_sweep, dir2.path()).unwrap();
        let pt = &rec_sweep.summary["points"][0]["summary"];
        assert_eq!(pt, &rec_run.summary);
    }

    #[test]
    fn byte_identical_reruns() {
        let cfg = dimer_cfg(2.0);
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        run(&cfg, d1.path()).unwrap();
        run(&cfg, d2.path()).unwrap();
        let a = std::fs::read(d1.path().join("results.json")).unwrap();
        let b = std::fs::read(d2.path().join("results.json")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let mut cfg = dimer_cfg(1.0);
        cfg.sweep.push(crate::config::SweepAxis {
            parameter: "g".into(),
            values: None,
            from: Some(0.1),
            to: Some(2.0),
            steps: Some(8),
        });
        let d1 = tempfile::tempdir().unwrap();
        let d8 = tempfile::tempdir().unwrap();
        cfg.workers = 1;
        sweep(&cfg, d1.path()).unwrap();
        cfg.workers = 8;
        sweep(&cfg, d8.path()).unwrap();
        let a = std::fs::read(d1.path().join("sweep.csv")).unwrap();
        let b = std::fs::read(d8.path().join("sweep.csv")).unwrap();
        assert_eq!(a, b);
        // results.json differs only via the echoed workers field; the
        // summaries must agree.
        let ra: Value =
            serde_json::from_slice(&std::fs::read(d1.path().join("results.json")).unwrap()).unwrap();
        let rb: Value =
            serde_json::from_slice(&std::fs::read(d8.path().join("results.json")).unwrap()).unwrap();
        assert_eq!(ra["summary"], rb["summary"]);
    }

    #[test]
    fn sweep_records_per_point_failures() {
        let mut cfg = dimer_cfg(1.0);
        // Negative g fails atom validation at that point only.
        cfg.sweep.push(crate::config::SweepAxis {
            parameter: "g".into(),
            values: Some(vec![1.0, -1.0, 2.0]),
            from: None,
            to: None,
            steps: None,
        });
        let dir = tempfile::tempdir().unwrap();
        let rec = sweep(&cfg, dir.path()).unwrap();
        assert_eq!(rec.summary["n_failed"].as_u64(), Some(1));
        let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert_eq!(csv.lines().count(), 4);
    }
}
