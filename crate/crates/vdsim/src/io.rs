//! File formats: the bath-graph schema, deterministic results files and
//! CSV field exports.
//!
//! Two float policies coexist on purpose. The bath schema uses serde_json's
//! shortest-roundtrip encoding so serialize/deserialize is lossless. Results
//! files print floats at 15 significant digits and CSV summaries at 8, and
//! every writer is bit-deterministic for a given tool version.

use crate::graph::{BathGraph, BathMeta, GraphError, SiteLabel};
use crate::observables::CurrentField;
use crate::topo::PhasePoint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

pub const BATH_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {0}")]
    SchemaVersion(u32),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Serialize, Deserialize)]
struct SiteRecord {
    index: usize,
    omega: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<SiteLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pos: Option<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct BathRecord {
    schema_version: u32,
    metadata: BathMeta,
    sites: Vec<SiteRecord>,
    /// Couplings as [i, j, re, im] with the ⟨i|H|j⟩ = re + i·im convention.
    couplings: Vec<(usize, usize, f64, f64)>,
}

/// Serialize a bath graph to its JSON schema (lossless round-trip).
pub fn bath_to_json(bath: &BathGraph) -> Result<String, IoError> {
    let record = BathRecord {
        schema_version: BATH_SCHEMA_VERSION,
        metadata: bath.meta().clone(),
        sites: (0..bath.site_count())
            .map(|i| SiteRecord {
                index: i,
                omega: bath.omega()[i],
                label: bath.labels().map(|l| l[i]),
                pos: bath.positions().map(|p| p[i]),
            })
            .collect(),
        couplings: bath
            .couplings()
            .iter()
            .map(|c| (c.i, c.j, c.amp.re, c.amp.im))
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&record)?)
}

/// Rebuild a bath graph from its JSON schema.
pub fn bath_from_json(text: &str) -> Result<BathGraph, IoError> {
    let record: BathRecord = serde_json::from_str(text)?;
    if record.schema_version != BATH_SCHEMA_VERSION {
        return Err(IoError::SchemaVersion(record.schema_version));
    }
    let mut omega = vec![0.0; record.sites.len()];
    let mut labels = Vec::new();
    let mut positions = Vec::new();
    for s in &record.sites {
        if s.index >= omega.len() {
            return Err(GraphError::SiteOutOfRange(s.index, omega.len()).into());
        }
        omega[s.index] = s.omega;
        if let Some(l) = s.label {
            labels.push((s.index, l));
        }
        if let Some(p) = s.pos {
            positions.push((s.index, p));
        }
    }
    let couplings = record
        .couplings
        .iter()
        .map(|&(i, j, re, im)| (i, j, Complex64::new(re, im)))
        .collect();
    let mut bath = BathGraph::new(omega, couplings, record.metadata)?;
    if labels.len() == bath.site_count() {
        let mut v = vec![labels[0].1; bath.site_count()];
        for (i, l) in labels {
            v[i] = l;
        }
        bath = bath.with_labels(v)?;
    }
    if positions.len() == bath.site_count() {
        let mut v = vec![[0.0, 0.0]; bath.site_count()];
        for (i, p) in positions {
            v[i] = p;
        }
        bath = bath.with_positions(v)?;
    }
    Ok(bath)
}

/// serde_json formatter printing every float with 15 significant digits.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.14e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.14e}")
    }
}

/// Serialize a JSON value with the 15-digit float policy; keys of
/// serde_json maps iterate in sorted order, so output is deterministic.
pub fn results_json_bytes(value: &Value) -> Result<Vec<u8>, IoError> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// CSV float policy: 8 significant digits.
pub fn csv_f64(x: f64) -> String {
    format!("{x:.7e}")
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

/// Bond currents with endpoint coordinates, one row per stored edge.
pub fn current_field_csv(bath: &BathGraph, field: &CurrentField) -> String {
    let mut s = String::from("i,j,x_i,y_i,x_j,y_j,current\n");
    let pos = bath.positions();
    for &(i, j, val) in &field.edges {
        let (pi, pj) = match pos {
            Some(p) => (p[i], p[j]),
            None => ([i as f64, 0.0], [j as f64, 0.0]),
        };
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            i,
            j,
            csv_f64(pi[0]),
            csv_f64(pi[1]),
            csv_f64(pj[0]),
            csv_f64(pj[1]),
            csv_f64(val)
        ));
    }
    s
}

/// Per-site state export: index, coordinates, amplitude and probability.
pub fn state_csv(bath: &BathGraph, psi: &[Complex64]) -> String {
    let mut s = String::from("site,x,y,re,im,prob\n");
    let pos = bath.positions();
    for (i, c) in psi.iter().enumerate() {
        let p = pos.map(|p| p[i]).unwrap_or([i as f64, 0.0]);
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            i,
            csv_f64(p[0]),
            csv_f64(p[1]),
            csv_f64(c.re),
            csv_f64(c.im),
            csv_f64(c.norm_sqr())
        ));
    }
    s
}

/// Sorted eigenvalues, one per row.
pub fn eigenvalues_csv(values: &[f64]) -> String {
    let mut s = String::from("index,value\n");
    for (i, v) in values.iter().enumerate() {
        s.push_str(&format!("{},{}\n", i, csv_f64(*v)));
    }
    s
}

/// Phase-diagram grid export.
pub fn phase_diagram_csv(points: &[PhasePoint]) -> String {
    let mut s = String::from("phi,m_over_t,gap,chern,bs_exists\n");
    for p in points {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_f64(p.phi),
            csv_f64(p.m_over_t),
            csv_f64(p.gap_width),
            p.chern,
            u8::from(p.bs_exists)
        ));
    }
    s
}

/// Detuning-fidelity curve export.
pub fn fidelity_csv(points: &[(f64, Option<f64>)]) -> String {
    let mut s = String::from("detuning,fidelity,in_gap\n");
    for &(dw, f) in points {
        match f {
            Some(f) => s.push_str(&format!("{},{},1\n", csv_f64(dw), csv_f64(f))),
            None => s.push_str(&format!("{},,0\n", csv_f64(dw))),
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Boundary;
    use crate::models::{build_model, ModelParams};

    #[test]
    fn bath_json_roundtrip_lossless() {
        let p = ModelParams::Haldane {
            nx: 3,
            ny: 2,
            m: 0.123456789012345,
            t: 0.1,
            phi: 1.0471975511965976,
            omega_c: 0.0,
            j: 1.0,
            bc: Boundary::Periodic,
        };
        let bath = build_model(&p).unwrap();
        let text = bath_to_json(&bath).unwrap();
        let back = bath_from_json(&text).unwrap();
        assert_eq!(bath.site_count(), back.site_count());
        assert_eq!(bath.omega(), back.omega());
        assert_eq!(bath.couplings().len(), back.couplings().len());
        for (a, b) in bath.couplings().iter().zip(back.couplings().iter()) {
            assert_eq!((a.i, a.j), (b.i, b.j));
            assert_eq!(a.amp, b.amp); // bitwise: schema must be lossless
        }
        assert_eq!(bath.labels(), back.labels());
        assert_eq!(bath.meta(), back.meta());
        // Stability: a second serialization is byte-identical.
        assert_eq!(text, bath_to_json(&back).unwrap());
    }

    #[test]
    fn results_floats_have_15_digits() {
        let v = serde_json::json!({"x": 0.5, "y": 1.0 / 3.0});
        let bytes = results_json_bytes(&v).unwrap();
        let s = String::from_utf8(bytes).unwrap();
        assert!(s.contains("5.00000000000000e-1"), "{s}");
        assert!(s.contains("3.33333333333333e-1"), "{s}");
    }

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
