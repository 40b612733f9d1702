//! Run configuration: one JSON document per invocation, discriminated by a
//! `scenario` field that must match the subcommand.
//!
//! Material names are resolved against the built-in presets, optionally
//! overlaid with a materials file (path resolved relative to the config
//! file). Model parameters are individually optional and default to the
//! library's calibrated values.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use iop_core::{
    load_materials, Antenna, Band, CalibrationTargets, Combining, LayerStack, LinkBudget,
    LinkRule, MaterialDb, ModelParams, NoisePathPolicy, Parallelism, Polarization,
};

use crate::error::{CliError, CliResult};

/// A parsed config file plus everything needed to resolve paths and
/// reproduce the run byte for byte.
pub struct LoadedConfig {
    pub run: RunConfig,
    /// Hex SHA-256 of the raw config bytes, recorded in output headers.
    pub sha256: String,
    /// Directory of the config file; relative paths resolve against it.
    base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn read(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Config(format!("cannot read config '{}': {e}", path.display())))?;
        let run: RunConfig = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Config(format!("config '{}': {e}", path.display())))?;
        use sha2::Digest;
        let sha256 = hex::encode(sha2::Sha256::digest(&bytes));
        let base_dir = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or_else(|| Path::new("."))
            .to_path_buf();
        Ok(Self {
            run,
            sha256,
            base_dir,
        })
    }

    /// Resolve a config-relative path.
    pub fn resolve(&self, relative: &str) -> PathBuf {
        let p = Path::new(relative);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

/// Top-level config document; the `scenario` value selects the variant and
/// must agree with the subcommand being run.
#[derive(Debug, Deserialize)]
#[serde(tag = "scenario", rename_all = "kebab-case")]
pub enum RunConfig {
    Pathloss(PathlossConfig),
    Capacity(CapacityConfig),
    Netsim(NetsimConfig),
    Calibrate(CalibrateConfig),
    Materials(MaterialsConfig),
}

impl RunConfig {
    pub fn scenario(&self) -> &'static str {
        match self {
            RunConfig::Pathloss(_) => "pathloss",
            RunConfig::Capacity(_) => "capacity",
            RunConfig::Netsim(_) => "netsim",
            RunConfig::Calibrate(_) => "calibrate",
            RunConfig::Materials(_) => "materials",
        }
    }
}

/// A swept quantity: a single value, an explicit list, or an inclusive
/// evenly spaced range.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Sweep {
    Single(f64),
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Sweep {
    /// Materialize the sweep points, in order. Empty sweeps are errors.
    pub fn points(&self, what: &str) -> CliResult<Vec<f64>> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let points = match self {
            Sweep::Single(v) => vec![*v],
            Sweep::List(vs) => {
                if vs.is_empty() {
                    return bad(format!("{what}: sweep list is empty"));
                }
                vs.clone()
            }
            Sweep::Range { start, stop, count } => {
                if *count < 2 {
                    return bad(format!(
                        "{what}: a range needs count >= 2 (use a single value instead)"
                    ));
                }
                if !(stop > start) {
                    return bad(format!("{what}: range needs stop > start, got [{start}, {stop}]"));
                }
                let span = stop - start;
                let last = *count - 1;
                (0..*count)
                    .map(|i| {
                        if i == last {
                            *stop
                        } else {
                            start + span * (i as f64 / last as f64)
                        }
                    })
                    .collect()
            }
        };
        for v in &points {
            if !v.is_finite() {
                return bad(format!("{what}: sweep contains non-finite value {v}"));
            }
        }
        Ok(points)
    }
}

/// Layer stack by material name plus paint thickness.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackConfig {
    #[serde(default = "default_air")]
    pub air: String,
    #[serde(default = "default_paint")]
    pub paint: String,
    #[serde(default = "default_plaster")]
    pub plaster: String,
    #[serde(default = "default_thickness")]
    pub thickness_m: f64,
}

fn default_air() -> String {
    "air".into()
}
fn default_paint() -> String {
    "titanium-white-paint".into()
}
fn default_plaster() -> String {
    "plaster".into()
}
fn default_thickness() -> f64 {
    2.0e-3
}

impl Default for StackConfig {
    fn default() -> Self {
        Self {
            air: default_air(),
            paint: default_paint(),
            plaster: default_plaster(),
            thickness_m: default_thickness(),
        }
    }
}

impl StackConfig {
    pub fn build(&self, db: &MaterialDb<f64>) -> CliResult<LayerStack<f64>> {
        let get = |name: &str| db.get(name).cloned().map_err(CliError::from);
        Ok(LayerStack::new(
            get(&self.air)?,
            get(&self.paint)?,
            get(&self.plaster)?,
            self.thickness_m,
        )?)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolarizationConfig {
    Te,
    Tm,
    Average,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoisePathConfig {
    DominantPath,
    ThermalOnly,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombiningConfig {
    #[default]
    Noncoherent,
    Coherent,
}

impl CombiningConfig {
    pub fn build(self) -> Combining {
        match self {
            CombiningConfig::Noncoherent => Combining::Noncoherent,
            CombiningConfig::Coherent => Combining::Coherent,
        }
    }
}

/// Optional model-parameter overrides; anything omitted keeps the library
/// default.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub lateral_exponent: Option<f64>,
    pub lateral_coupling_db: Option<f64>,
    pub polarization: Option<PolarizationConfig>,
    pub temperature_k: Option<f64>,
    pub noise_figure_db: Option<f64>,
    pub noise_path: Option<NoisePathConfig>,
}

impl ModelConfig {
    pub fn build(&self) -> ModelParams<f64> {
        let mut params = ModelParams::default();
        if let Some(v) = self.lateral_exponent {
            params.lateral_exponent = v;
        }
        if let Some(v) = self.lateral_coupling_db {
            params.lateral_coupling_db = v;
        }
        if let Some(p) = self.polarization {
            params.polarization = match p {
                PolarizationConfig::Te => Polarization::Te,
                PolarizationConfig::Tm => Polarization::Tm,
                PolarizationConfig::Average => Polarization::Average,
            };
        }
        if let Some(v) = self.temperature_k {
            params.temperature_k = v;
        }
        if let Some(v) = self.noise_figure_db {
            params.noise_figure_db = v;
        }
        if let Some(p) = self.noise_path {
            params.noise_path = match p {
                NoisePathConfig::DominantPath => NoisePathPolicy::DominantPath,
                NoisePathConfig::ThermalOnly => NoisePathPolicy::ThermalOnly,
            };
        }
        params
    }
}

/// Resolve the presets-plus-overlay materials database for a scenario's
/// optional `materials` field.
pub fn materials_db(
    overlay: &Option<String>,
    loaded: &LoadedConfig,
) -> CliResult<MaterialDb<f64>> {
    match overlay {
        Some(path) => Ok(load_materials(loaded.resolve(path))?),
        None => Ok(MaterialDb::with_presets()),
    }
}

/// Per-path loss sweep over burial depth, separation, and frequency.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathlossConfig {
    /// Optional materials overlay file (relative to the config file).
    pub materials: Option<String>,
    #[serde(default)]
    pub stack: StackConfig,
    #[serde(default)]
    pub model: ModelConfig,
    pub frequencies_hz: Sweep,
    /// Equal transmitter/receiver burial depths, m.
    pub depths_m: Sweep,
    /// Horizontal separations, m.
    pub separations_m: Sweep,
}

/// Shannon-capacity sweep with an optional free-air reference curve.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityConfig {
    pub materials: Option<String>,
    #[serde(default)]
    pub stack: StackConfig,
    #[serde(default)]
    pub model: ModelConfig,
    /// `[lo, hi]` band edges, Hz.
    pub band_hz: (f64, f64),
    #[serde(default = "default_tx_psd")]
    pub tx_psd_w_per_hz: f64,
    #[serde(default = "default_subbands")]
    pub n_subbands: usize,
    pub depths_m: Sweep,
    pub separations_m: Sweep,
    /// Also emit the free-air curve over the same separations.
    #[serde(default = "default_true")]
    pub include_air: bool,
    #[serde(default)]
    pub combining: CombiningConfig,
}

fn default_tx_psd() -> f64 {
    1.0e-14
}
fn default_subbands() -> usize {
    256
}
fn default_true() -> bool {
    true
}

impl CapacityConfig {
    pub fn band(&self) -> CliResult<Band<f64>> {
        Ok(Band::new(self.band_hz.0, self.band_hz.1)?)
    }

    pub fn budget(&self) -> LinkBudget<f64> {
        LinkBudget {
            tx_psd_w_per_hz: self.tx_psd_w_per_hz,
            n_subbands: self.n_subbands,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkRuleConfig {
    /// Mean SNR over the band must reach this many dB.
    SnrThresholdDb(f64),
    /// Integrated capacity must reach this many bit/s.
    MinCapacityBps(f64),
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AntennaConfig {
    #[default]
    Isotropic,
    Cone { gain_dbi: f64, beamwidth_rad: f64 },
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParallelismConfig {
    Serial,
    #[default]
    Rayon,
}

/// Monte Carlo connectivity scenario.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetsimConfig {
    pub materials: Option<String>,
    #[serde(default)]
    pub stack: StackConfig,
    #[serde(default)]
    pub model: ModelConfig,
    pub density_per_m2: f64,
    pub wall_width_m: f64,
    pub wall_height_m: f64,
    pub band_hz: (f64, f64),
    #[serde(default = "default_tx_psd")]
    pub tx_psd_w_per_hz: f64,
    #[serde(default = "default_netsim_subbands")]
    pub n_subbands: usize,
    pub link_rule: LinkRuleConfig,
    #[serde(default)]
    pub antenna: AntennaConfig,
    pub max_range_m: f64,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub parallelism: ParallelismConfig,
    #[serde(default)]
    pub combining: CombiningConfig,
}

fn default_netsim_subbands() -> usize {
    32
}

impl NetsimConfig {
    pub fn build(&self) -> CliResult<iop_core::NetSimConfig> {
        Ok(iop_core::NetSimConfig {
            density_per_m2: self.density_per_m2,
            wall_width_m: self.wall_width_m,
            wall_height_m: self.wall_height_m,
            band: Band::new(self.band_hz.0, self.band_hz.1)?,
            budget: LinkBudget {
                tx_psd_w_per_hz: self.tx_psd_w_per_hz,
                n_subbands: self.n_subbands,
            },
            link_rule: match self.link_rule {
                LinkRuleConfig::SnrThresholdDb(v) => LinkRule::SnrThresholdDb(v),
                LinkRuleConfig::MinCapacityBps(v) => LinkRule::MinCapacityBps(v),
            },
            antenna: match self.antenna {
                AntennaConfig::Isotropic => Antenna::Isotropic,
                AntennaConfig::Cone {
                    gain_dbi,
                    beamwidth_rad,
                } => Antenna::Cone {
                    gain_dbi,
                    beamwidth_rad,
                },
            },
            max_range_m: self.max_range_m,
            trials: self.trials,
            combining: self.combining.build(),
        })
    }

    pub fn parallelism(&self) -> Parallelism {
        match self.parallelism {
            ParallelismConfig::Serial => Parallelism::Serial,
            ParallelismConfig::Rayon => Parallelism::Rayon,
        }
    }
}

/// Reference deltas for calibration; omitted fields keep the published
/// values.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltasConfig {
    pub dw: Option<f64>,
    pub rw_a: Option<f64>,
    pub rw_p: Option<f64>,
    pub lw_a: Option<f64>,
    pub lw_p: Option<f64>,
}

/// Calibration scenario; every field defaults to the published operating
/// point (200 GHz, 1 cm to 4 cm, 1 mm depth).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateConfig {
    pub materials: Option<String>,
    #[serde(default)]
    pub stack: StackConfig,
    #[serde(default)]
    pub model: ModelConfig,
    pub frequency_hz: Option<f64>,
    pub near_m: Option<f64>,
    pub far_m: Option<f64>,
    pub depth_m: Option<f64>,
    #[serde(default)]
    pub deltas: DeltasConfig,
}

impl CalibrateConfig {
    pub fn targets(&self) -> CalibrationTargets<f64> {
        let mut t = CalibrationTargets::default();
        if let Some(v) = self.frequency_hz {
            t.frequency_hz = v;
        }
        if let Some(v) = self.near_m {
            t.near_m = v;
        }
        if let Some(v) = self.far_m {
            t.far_m = v;
        }
        if let Some(v) = self.depth_m {
            t.depth_m = v;
        }
        let d = &self.deltas;
        if let Some(v) = d.dw {
            t.deltas.dw = v;
        }
        if let Some(v) = d.rw_a {
            t.deltas.rw_a = v;
        }
        if let Some(v) = d.rw_p {
            t.deltas.rw_p = v;
        }
        if let Some(v) = d.lw_a {
            t.deltas.lw_a = v;
        }
        if let Some(v) = d.lw_p {
            t.deltas.lw_p = v;
        }
        t
    }
}

/// Materials listing/validation scenario.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialsConfig {
    /// Materials overlay file (required by `materials validate`).
    pub materials: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> RunConfig {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn scenario_tag_selects_the_variant() {
        let cfg = parse(
            r#"{"scenario":"pathloss","frequencies_hz":2e11,
                "depths_m":1e-3,"separations_m":0.02}"#,
        );
        assert_eq!(cfg.scenario(), "pathloss");
        let cfg = parse(r#"{"scenario":"calibrate"}"#);
        assert_eq!(cfg.scenario(), "calibrate");
    }

    #[test]
    fn sweep_forms_materialize_in_order() {
        let single: Sweep = serde_json::from_str("0.02").unwrap();
        assert_eq!(single.points("x").unwrap(), vec![0.02]);

        let list: Sweep = serde_json::from_str("[3.0, 1.0, 2.0]").unwrap();
        assert_eq!(list.points("x").unwrap(), vec![3.0, 1.0, 2.0]);

        let range: Sweep =
            serde_json::from_str(r#"{"start":0.01,"stop":0.04,"count":4}"#).unwrap();
        let pts = range.points("x").unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0], 0.01);
        assert_eq!(pts[3], 0.04, "the stated endpoint is hit exactly");
        assert!(pts.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn degenerate_sweeps_are_rejected() {
        let empty: Sweep = serde_json::from_str("[]").unwrap();
        assert!(empty.points("depths_m").unwrap_err().to_string().contains("depths_m"));

        let short: Sweep =
            serde_json::from_str(r#"{"start":0.0,"stop":1.0,"count":1}"#).unwrap();
        assert!(short.points("x").is_err());

        let backwards: Sweep =
            serde_json::from_str(r#"{"start":1.0,"stop":0.5,"count":3}"#).unwrap();
        assert!(backwards.points("x").is_err());
    }

    #[test]
    fn model_overrides_fold_onto_defaults() {
        let cfg: ModelConfig =
            serde_json::from_str(r#"{"temperature_k":77.0,"polarization":"tm"}"#).unwrap();
        let params = cfg.build();
        let defaults = ModelParams::<f64>::default();
        assert_eq!(params.temperature_k, 77.0);
        assert!(matches!(params.polarization, Polarization::Tm));
        assert_eq!(params.lateral_exponent, defaults.lateral_exponent);
        assert_eq!(params.noise_figure_db, defaults.noise_figure_db);
    }

    #[test]
    fn netsim_config_builds_the_scenario_with_documented_defaults() {
        let RunConfig::Netsim(cfg) = parse(
            r#"{"scenario":"netsim","density_per_m2":1e4,
                "wall_width_m":0.1,"wall_height_m":0.05,
                "band_hz":[2e11,3e11],
                "link_rule":{"min_capacity_bps":1e9},
                "max_range_m":0.2,"trials":7}"#,
        ) else {
            panic!("wrong variant");
        };
        let built = cfg.build().unwrap();
        assert_eq!(built.budget.n_subbands, 32);
        assert_eq!(built.budget.tx_psd_w_per_hz, 1.0e-14);
        assert!(matches!(built.link_rule, LinkRule::MinCapacityBps(v) if v == 1.0e9));
        assert!(matches!(built.antenna, Antenna::Isotropic));
        assert_eq!(cfg.seed, 0);
        assert!(matches!(cfg.parallelism(), Parallelism::Rayon));
    }

    #[test]
    fn unknown_fields_are_parse_errors() {
        let err = serde_json::from_str::<RunConfig>(
            r#"{"scenario":"pathloss","frequencies_hz":2e11,
                "depths_m":1e-3,"separations_m":0.02,"mistyped":true}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("mistyped"));
    }

    #[test]
    fn stack_config_resolves_material_names() {
        let db = MaterialDb::<f64>::with_presets();
        let stack = StackConfig::default().build(&db).unwrap();
        assert_eq!(stack.paint().name(), "titanium-white-paint");
        assert_eq!(stack.thickness(), 2.0e-3);

        let missing = StackConfig {
            paint: "does-not-exist".into(),
            ..StackConfig::default()
        };
        assert!(missing.build(&db).is_err());
    }
}
