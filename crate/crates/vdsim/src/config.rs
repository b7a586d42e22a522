//! Scenario configuration files (TOML, versioned by `schema_version`).
//!
//! One scenario per config. Sweep axes name a parameter, either as an
//! inclusive linear range (`from`/`to`/`steps`) or an explicit `values`
//! list; the sweep grid is the cartesian product of all axes.

use crate::graph::{BathGraph, SiteId, SiteLabel, Sublattice};
use crate::models::ModelParams;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;
/// Cap on the total sweep grid size.
pub const SWEEP_POINT_CAP: usize = 10_000;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unsupported schema_version {0} (expected {CONFIG_SCHEMA_VERSION})")]
    SchemaVersion(u32),
    #[error("scenario `{scenario}` requires {what}")]
    Missing { scenario: &'static str, what: &'static str },
    #[error("sweep axis `{0}` does not reference a known parameter (model parameters, `g`, or `omega0`)")]
    UnknownParameter(String),
    #[error("sweep axis `{0}`: needs either `values` or `from`/`to`/`steps` with steps >= 1")]
    MalformedAxis(String),
    #[error("sweep grid has {0} points, exceeding the cap of {SWEEP_POINT_CAP}")]
    TooManyPoints(usize),
    #[error("atom site not found: {0}")]
    AtomSite(String),
    #[error("parameter `{0}` is not applicable to this model variant")]
    Inapplicable(String),
    #[error("workers must be >= 1")]
    BadWorkers,
    #[error(transparent)]
    Model(#[from] crate::models::ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Dimer,
    MirrorBic,
    SshVds,
    CreutzVds,
    HaldaneVds,
    Heff,
    PhaseDiagram,
    Robustness,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Dimer => "dimer",
            ScenarioKind::MirrorBic => "mirror-bic",
            ScenarioKind::SshVds => "ssh-vds",
            ScenarioKind::CreutzVds => "creutz-vds",
            ScenarioKind::HaldaneVds => "haldane-vds",
            ScenarioKind::Heff => "heff",
            ScenarioKind::PhaseDiagram => "phase-diagram",
            ScenarioKind::Robustness => "robustness",
        }
    }
}

/// Atom attachment: by site index or by (cell, sublattice) label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomConfig {
    /// Defaults to the scenario's resonance (the vacancy-mode energy).
    pub omega0: Option<f64>,
    pub g: f64,
    pub site: Option<usize>,
    pub cell: Option<[i64; 2]>,
    pub sub: Option<Sublattice>,
}

impl AtomConfig {
    pub fn resolve_site(&self, bath: &BathGraph) -> Result<SiteId, ConfigError> {
        if let Some(idx) = self.site {
            if idx < bath.site_count() {
                return Ok(SiteId(idx));
            }
            return Err(ConfigError::AtomSite(format!(
                "index {idx} out of range for {} sites",
                bath.site_count()
            )));
        }
        if let (Some(cell), Some(sub)) = (self.cell, self.sub) {
            return bath
                .site_by_label(&SiteLabel { cell, sub })
                .ok_or_else(|| ConfigError::AtomSite(format!("label cell={cell:?} sub={sub:?}")));
        }
        Err(ConfigError::AtomSite(
            "atom needs either `site` or `cell` + `sub`".into(),
        ))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepAxis {
    pub parameter: String,
    pub values: Option<Vec<f64>>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub steps: Option<usize>,
}

impl SweepAxis {
    pub fn grid(&self) -> Result<Vec<f64>, ConfigError> {
        if let Some(v) = &self.values {
            if v.is_empty() {
                return Err(ConfigError::MalformedAxis(self.parameter.clone()));
            }
            return Ok(v.clone());
        }
        match (self.from, self.to, self.steps) {
            (Some(a), Some(b), Some(n)) if n >= 1 => {
                if n == 1 {
                    return Ok(vec![a]);
                }
                Ok((0..n)
                    .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                    .collect())
            }
            _ => Err(ConfigError::MalformedAxis(self.parameter.clone())),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BicConfig {
    /// Chain length (sites).
    pub length: usize,
    /// Sites strictly between the open end and the atom; scanned one by one.
    pub segments: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConfig {
    pub phi_from: f64,
    pub phi_to: f64,
    pub phi_steps: usize,
    pub mt_from: f64,
    pub mt_to: f64,
    pub mt_steps: usize,
    pub t: f64,
    #[serde(default = "default_nk")]
    pub nk: usize,
}

fn default_nk() -> usize {
    crate::topo::DEFAULT_NK
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobustnessConfig {
    /// Detuning window half-width, in units of g.
    pub span_over_g: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContrastConfig {
    /// Sublattice offset of the gap-matched trivial point (units of J).
    pub m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub scenario: ScenarioKind,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    pub model: Option<ModelParams>,
    #[serde(default)]
    pub atoms: Vec<AtomConfig>,
    #[serde(default)]
    pub sweep: Vec<SweepAxis>,
    pub bic: Option<BicConfig>,
    pub grid: Option<GridConfig>,
    pub robustness: Option<RobustnessConfig>,
    pub contrast: Option<ContrastConfig>,
}

fn default_workers() -> usize {
    1
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

const SETTABLE_MODEL_PARAMS: &[&str] = &["delta", "m", "alpha", "phi", "t", "j", "omega_c"];

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text)?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// Structural validation; does not build baths.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(ConfigError::SchemaVersion(self.schema_version));
        }
        if self.workers == 0 {
            return Err(ConfigError::BadWorkers);
        }
        if let Some(m) = &self.model {
            m.validate()?;
        }
        match self.scenario {
            ScenarioKind::Dimer => {}
            ScenarioKind::MirrorBic => {
                if self.bic.is_none() {
                    return Err(ConfigError::Missing {
                        scenario: "mirror-bic",
                        what: "a [bic] section",
                    });
                }
            }
            ScenarioKind::SshVds
            | ScenarioKind::CreutzVds
            | ScenarioKind::HaldaneVds
            | ScenarioKind::Heff
            | ScenarioKind::Robustness => {
                if self.model.is_none() {
                    return Err(ConfigError::Missing {
                        scenario: self.scenario.name_static(),
                        what: "a [model] section",
                    });
                }
                if self.scenario == ScenarioKind::Heff && self.atoms.len() != 2 {
                    return Err(ConfigError::Missing {
                        scenario: "heff",
                        what: "exactly two [[atoms]]",
                    });
                }
                if self.scenario == ScenarioKind::Robustness && self.robustness.is_none() {
                    return Err(ConfigError::Missing {
                        scenario: "robustness",
                        what: "a [robustness] section",
                    });
                }
            }
            ScenarioKind::PhaseDiagram => {
                if self.grid.is_none() {
                    return Err(ConfigError::Missing {
                        scenario: "phase-diagram",
                        what: "a [grid] section",
                    });
                }
            }
        }
        // Sweep axes must reference settable parameters and stay under the cap.
        let mut total = 1usize;
        for axis in &self.sweep {
            let known = SETTABLE_MODEL_PARAMS.contains(&axis.parameter.as_str())
                || axis.parameter == "g"
                || axis.parameter == "omega0";
            if !known {
                return Err(ConfigError::UnknownParameter(axis.parameter.clone()));
            }
            total = total.saturating_mul(axis.grid()?.len());
        }
        if total > SWEEP_POINT_CAP {
            return Err(ConfigError::TooManyPoints(total));
        }
        Ok(())
    }

    /// A copy with `parameter` set to `value` (for sweep grid points).
    pub fn with_param(&self, parameter: &str, value: f64) -> Result<Self, ConfigError> {
        let mut out = self.clone();
        match parameter {
            "g" => {
                for a in out.atoms.iter_mut() {
                    a.g = value;
                }
                return Ok(out);
            }
            "omega0" => {
                for a in out.atoms.iter_mut() {
                    a.omega0 = Some(value);
                }
                return Ok(out);
            }
            _ => {}
        }
        let model = out
            .model
            .as_mut()
            .ok_or_else(|| ConfigError::Inapplicable(parameter.to_string()))?;
        let ok = match (parameter, model) {
            ("omega_c", m) => {
                set_omega_c(m, value);
                true
            }
            ("j", m) => {
                set_j(m, value);
                true
            }
            ("delta", ModelParams::Ssh { delta, .. }) => {
                *delta = value;
                true
            }
            ("m", ModelParams::Creutz { m, .. }) => {
                *m = value;
                true
            }
            ("m", ModelParams::Haldane { m, .. }) => {
                *m = value;
                true
            }
            ("alpha", ModelParams::Creutz { alpha, .. }) => {
                *alpha = value;
                true
            }
            ("phi", ModelParams::Haldane { phi, .. }) => {
                *phi = value;
                true
            }
            ("t", ModelParams::Haldane { t, .. }) => {
                *t = value;
                true
            }
            _ => false,
        };
        if !ok {
            return Err(ConfigError::Inapplicable(parameter.to_string()));
        }
        Ok(out)
    }
}

fn set_omega_c(m: &mut ModelParams, value: f64) {
    match m {
        ModelParams::Dimer { omega_c, .. }
        | ModelParams::Chain { omega_c, .. }
        | ModelParams::Ssh { omega_c, .. }
        | ModelParams::Creutz { omega_c, .. }
        | ModelParams::Haldane { omega_c, .. } => *omega_c = value,
    }
}

fn set_j(m: &mut ModelParams, value: f64) {
    match m {
        ModelParams::Dimer { j, .. }
        | ModelParams::Chain { j, .. }
        | ModelParams::Ssh { j, .. }
        | ModelParams::Creutz { j, .. }
        | ModelParams::Haldane { j, .. } => *j = value,
    }
}

impl ScenarioKind {
    fn name_static(&self) -> &'static str {
        self.name()
    }
}
