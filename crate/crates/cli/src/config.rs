//! The TOML run configuration. Per-field checks run during deserialization so
//! that a bad value is reported with its line and column.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use roa_core::{CenterSpec, Family, GridSpec, IntegratorConfig, LearnerConfig, VectorField};
use serde::{Deserialize, Deserializer, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    #[serde(default)]
    pub learner: LearnerSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default = "GridSpec::planar_default")]
    pub grid: GridSpec,
    #[serde(default)]
    pub stop: StopSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub output: OutputSection,
}

/// `id` is `paper2d` (alias `duffing2d`), `linear` or `parsed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expressions: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LearnerSection {
    #[serde(deserialize_with = "epsilon")]
    pub epsilon: f64,
    #[serde(deserialize_with = "k")]
    pub k: usize,
    #[serde(deserialize_with = "c")]
    pub c: f64,
    pub seed: u64,
    #[serde(deserialize_with = "stop_after")]
    pub stop_after: usize,
    pub k_doublings_max: usize,
    pub family: Family,
    pub centers: CenterSpec,
}

impl Default for LearnerSection {
    fn default() -> Self {
        let d = LearnerConfig::new(Family::Sphere);
        Self {
            epsilon: d.epsilon,
            k: d.k,
            c: d.c,
            seed: d.seed,
            stop_after: d.stop_after,
            k_doublings_max: d.k_doublings_max,
            family: d.family,
            centers: d.centers,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    #[serde(deserialize_with = "tau_s")]
    pub tau_s: f64,
    #[serde(deserialize_with = "substeps")]
    pub substeps: u32,
    #[serde(deserialize_with = "r_max")]
    pub r_max: f64,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self {
            tau_s: d.tau_s,
            substeps: d.substeps,
            r_max: d.r_max,
        }
    }
}

/// Optional stop rule: keep sampling past `stop_after` while a non-basin grid
/// node is still inside the set, at most `max_extensions` times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StopSection {
    pub ground_truth: bool,
    pub max_extensions: usize,
}

impl Default for StopSection {
    fn default() -> Self {
        Self {
            ground_truth: false,
            max_extensions: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    #[serde(deserialize_with = "n_probe")]
    pub n_probe: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self { n_probe: 10_000 }
    }
}

/// The directory is not echoed into result documents, so that the same
/// configuration written to two places yields identical files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    #[serde(skip_serializing)]
    pub dir: PathBuf,
    /// Write `region.csv` (grid nodes with set membership).
    pub region: bool,
    /// Write `events.csv` (one row per counter-example).
    pub events: bool,
    /// Write `grid.csv` next to the learn outputs.
    pub grid: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("roa-out"),
            region: true,
            events: true,
            grid: false,
        }
    }
}

fn checked<'de, D, T>(d: D, ok: impl Fn(&T) -> bool, msg: &str) -> Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    let v = T::deserialize(d)?;
    if ok(&v) {
        Ok(v)
    } else {
        Err(serde::de::Error::custom(msg))
    }
}

fn positive(x: &f64) -> bool {
    *x > 0.0 && x.is_finite()
}

fn epsilon<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    checked(d, positive, "epsilon must be positive")
}

fn c<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    checked(d, positive, "c must be positive")
}

fn tau_s<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    checked(d, positive, "tau_s must be positive")
}

fn r_max<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    checked(d, positive, "r_max must be positive")
}

fn k<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
    checked(d, |&k: &usize| k >= 1, "k must be at least 1")
}

fn stop_after<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
    checked(d, |&j: &usize| j >= 1, "stop_after must be at least 1")
}

fn substeps<'de, D: Deserializer<'de>>(d: D) -> Result<u32, D::Error> {
    checked(d, |&s: &u32| s >= 1, "substeps must be at least 1")
}

fn n_probe<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
    checked(d, |&n: &usize| n >= 1, "n_probe must be at least 1")
}

impl RunConfig {
    pub fn from_toml(src: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(src)?;
        cfg.learner_config().validate()?;
        cfg.grid.validate()?;
        let field = cfg.field()?;
        if field.dim() != cfg.grid.dim() {
            bail!(
                "grid has {} axes but the system has dimension {}",
                cfg.grid.dim(),
                field.dim()
            );
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let src = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_toml(&src).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn field(&self) -> anyhow::Result<VectorField> {
        let s = &self.system;
        if s.id == "parsed" {
            let Some(exprs) = &s.expressions else {
                bail!("system \"parsed\" needs `expressions`");
            };
            return Ok(VectorField::parse(exprs)?);
        }
        if s.expressions.is_some() {
            bail!("`expressions` is only valid with id = \"parsed\"");
        }
        Ok(VectorField::builtin(&s.id, s.dim, s.rate)?)
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            tau_s: self.integrator.tau_s,
            substeps: self.integrator.substeps,
            r_max: self.integrator.r_max,
        }
    }

    pub fn learner_config(&self) -> LearnerConfig {
        let l = &self.learner;
        LearnerConfig {
            epsilon: l.epsilon,
            k: l.k,
            c: l.c,
            family: l.family,
            centers: l.centers.clone(),
            seed: l.seed,
            stop_after: l.stop_after,
            k_doublings_max: l.k_doublings_max,
            integrator: self.integrator(),
        }
    }
}
