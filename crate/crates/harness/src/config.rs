//! Versioned TOML run configuration.

use std::path::{Path, PathBuf};

use aurora_core::coupling::InteractionSpec;
use aurora_core::galerkin::{PhysParams, RunParams};
use aurora_core::Domain;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::sweep::SweepSettings;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub domain: DomainConfig,
    pub galerkin: GalerkinConfig,
    #[serde(default)]
    pub physics: PhysParams,
    #[serde(default)]
    pub interaction: InteractionSpec,
    pub time: TimeConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub guard: GuardConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub sweep: SweepSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalerkinConfig {
    pub n: usize,
    pub n_flow: usize,
    #[serde(default = "default_refine")]
    pub grad_sup_refine: usize,
}

fn default_refine() -> usize {
    4
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one")]
    pub wave_substeps: usize,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
}

fn one() -> usize {
    1
}
fn default_cfl() -> f64 {
    aurora_core::continuity::DEFAULT_CFL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Steps between snapshots; 0 writes only the first and last state.
    #[serde(default)]
    pub snapshot_every: usize,
    /// Steps between ledger rows.
    #[serde(default = "one")]
    pub ledger_every: usize,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_dir(), snapshot_every: 0, ledger_every: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuardConfig {
    /// Stop at `T^N` when the interaction is on.
    #[serde(default = "yes")]
    pub horizon: bool,
    /// Residual tolerance relative to `E(0)`.
    #[serde(default = "default_tol")]
    pub residual_tol: f64,
    #[serde(default = "default_floor")]
    pub rho_floor: f64,
}

fn yes() -> bool {
    true
}
fn default_tol() -> f64 {
    1e-3
}
fn default_floor() -> f64 {
    aurora_core::lagrangian::DEFAULT_RHO_FLOOR
}

impl Default for GuardConfig {
    fn default() -> Self {
        Self { horizon: true, residual_tol: default_tol(), rho_floor: default_floor() }
    }
}

/// Pointwise profiles for the initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensityProfile {
    Constant { value: f64 },
    Cosine { mean: f64, amplitude: f64, k: usize, l: usize },
    Bump { base: f64, amplitude: f64, x0: f64, y0: f64, width: f64 },
    /// `max(0, 1 - depth exp(-|x - x0|^2 / width^2))`, vacuum where `depth > 1`.
    Vacuum { depth: f64, x0: f64, y0: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MomentumProfile {
    Zero,
    /// `amplitude * eta_{k,l}` per component.
    Mode { k: usize, l: usize, amplitude: [f64; 3] },
    /// Solenoidal swirl vanishing on the wall, plus an axial part.
    Swirl { amplitude: f64, axial: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MagneticProfile {
    Zero,
    /// `(0, 0, amplitude * eta_{k,l})`.
    Axial { k: usize, l: usize, amplitude: f64 },
    /// Planar loop field from a stream function, plus an axial mode.
    Loop { amplitude: f64, axial: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WaveProfile {
    Zero,
    Mode { k: usize, l: usize, amplitude: f64 },
    /// Gaussian packet times the first mode, carrying momentum `(kx, ky)`.
    Packet { amplitude: f64, x0: f64, y0: f64, width: f64, kx: f64, ky: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub density: DensityProfile,
    pub momentum: MomentumProfile,
    pub magnetic: MagneticProfile,
    pub wave: WaveProfile,
    /// Regularise the data with the artificial-pressure floor `delta`.
    #[serde(default = "yes")]
    pub approximate: bool,
    /// Heat-smoothing time per unit `delta`.
    #[serde(default = "default_smoothing")]
    pub smoothing: f64,
}

fn default_smoothing() -> f64 {
    0.0
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self {
            density: DensityProfile::Constant { value: 1.0 },
            momentum: MomentumProfile::Zero,
            magnetic: MagneticProfile::Zero,
            wave: WaveProfile::Zero,
            approximate: true,
            smoothing: default_smoothing(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.domain().map_err(|e| HarnessError::Config(e.to_string()))?;
        self.run_params().validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        let t = &self.time;
        if !(t.dt > 0.0 && t.t_end > 0.0 && t.dt <= t.t_end) {
            return Err(HarnessError::Config(format!("need 0 < dt <= t_end, got dt = {}, t_end = {}", t.dt, t.t_end)));
        }
        if self.output.ledger_every == 0 {
            return Err(HarnessError::Config("output.ledger_every must be at least 1".into()));
        }
        Ok(())
    }

    pub fn domain(&self) -> aurora_core::Result<Domain> {
        Domain::new(self.domain.lx, self.domain.ly, self.domain.nx, self.domain.ny)
    }

    pub fn run_params(&self) -> RunParams {
        RunParams {
            phys: self.physics,
            interaction: self.interaction,
            n: self.galerkin.n,
            n_flow: self.galerkin.n_flow,
            wave_substeps: self.time.wave_substeps,
            rho_floor: self.guard.rho_floor,
            cfl: self.time.cfl,
        }
    }

    /// Number of whole steps covering `[0, t_end]`.
    pub fn steps(&self) -> usize {
        (self.time.t_end / self.time.dt - 1e-9).ceil() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1
[domain]
lx = 1.0
ly = 1.0
nx = 16
ny = 16
[galerkin]
n = 3
n_flow = 1
[time]
dt = 0.001
t_end = 0.01
"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let c = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.galerkin.grad_sup_refine, 4);
        assert_eq!(c.physics, PhysParams::default());
        assert_eq!(c.steps(), 10);
        assert!(c.guard.horizon);
    }

    #[test]
    fn round_trip_through_toml() {
        let mut c = RunConfig::from_toml(MINIMAL).unwrap();
        c.initial.density = DensityProfile::Vacuum { depth: 1.5, x0: 0.5, y0: 0.5, width: 0.2 };
        c.initial.wave = WaveProfile::Packet { amplitude: 1.0, x0: 0.4, y0: 0.5, width: 0.1, kx: 5.0, ky: 0.0 };
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_keys_and_versions_are_rejected() {
        let extra = MINIMAL.replace("[time]", "[time]\nfoo = 1");
        assert!(matches!(RunConfig::from_toml(&extra), Err(HarnessError::Config(_))));
        let v2 = MINIMAL.replace("schema_version = 1", "schema_version = 2");
        assert!(matches!(RunConfig::from_toml(&v2), Err(HarnessError::Config(_))));
        let bad = MINIMAL.replace("n_flow = 1", "n_flow = 5");
        assert!(RunConfig::from_toml(&bad).is_err());
    }
}
