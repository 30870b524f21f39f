//! Experiment configuration files and run manifests.
//!
//! Configs are JSON documents with a single top-level experiment object;
//! unknown fields are rejected so a typo in a physics parameter can never
//! slip through silently.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::TimeGrid;
use crate::error::{Result, XyError};
use crate::model::{DisorderSpec, Distribution, Partition, Subinterval};

/// The three parameter distributions; the master seed lives next to them in
/// the experiment config.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderTriple {
    pub mu: Distribution,
    pub gamma: Distribution,
    pub nu: Distribution,
}

impl DisorderTriple {
    pub fn to_spec(&self, seed: u64) -> DisorderSpec {
        DisorderSpec {
            mu: self.mu,
            gamma: self.gamma,
            nu: self.nu,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.mu.validate()?;
        self.gamma.validate()?;
        self.nu.validate()
    }

    pub fn is_isotropic(&self) -> bool {
        matches!(self.gamma, Distribution::Constant { value } if value == 0.0)
    }
}

fn default_t_min() -> f64 {
    0.05
}
fn default_t_max() -> f64 {
    500.0
}
fn default_points() -> usize {
    200
}

/// Geometric time grid specification; the grid always contains `t = 0` in
/// addition to the `points` geometric samples.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_t_min")]
    pub t_min: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            t_min: default_t_min(),
            t_max: default_t_max(),
            points: default_points(),
        }
    }
}

impl GridSpec {
    pub fn to_grid(&self) -> Result<TimeGrid> {
        TimeGrid::geometric(self.t_min, self.t_max, self.points)
    }
}

/// Initial density profile of a transport run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// Fully occupied interval `[a, b]`, empty elsewhere.
    DomainWall { a: usize, b: usize },
    Uniform { value: f64 },
    Explicit { eta: Vec<f64> },
}

impl ProfileSpec {
    pub fn to_profile(&self, n: usize) -> Result<crate::dynamics::DensityProfile> {
        match self {
            ProfileSpec::DomainWall { a, b } => {
                crate::dynamics::DensityProfile::domain_wall(n, Subinterval::new(*a, *b)?)
            }
            ProfileSpec::Uniform { value } => crate::dynamics::DensityProfile::uniform(n, *value),
            ProfileSpec::Explicit { eta } => {
                if eta.len() != n {
                    return Err(XyError::config(format!(
                        "explicit profile has {} entries for n = {n}",
                        eta.len()
                    )));
                }
                crate::dynamics::DensityProfile::new(eta.clone())
            }
        }
    }
}

/// Particle-transport experiment (isotropic chain).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportConfig {
    pub n: usize,
    pub realizations: usize,
    pub seed: u64,
    pub disorder: DisorderTriple,
    #[serde(default)]
    pub grid: GridSpec,
    pub profile: ProfileSpec,
    /// Site sets `S` whose occupation is tracked.
    pub targets: Vec<Vec<usize>>,
    /// Fit window `[r_lo, r_hi]` for the correlator decay; defaults to
    /// `[1, n/2]`.
    #[serde(default)]
    pub fit_window: Option<(usize, usize)>,
}

impl TransportConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.realizations == 0 {
            return Err(XyError::config("n and realizations must be >= 1"));
        }
        self.disorder.validate()?;
        if !self.disorder.is_isotropic() {
            return Err(XyError::config(
                "transport experiments require gamma = constant 0 (isotropic chain)",
            ));
        }
        self.profile.to_profile(self.n)?;
        if self.targets.is_empty() {
            return Err(XyError::config("at least one target site set required"));
        }
        for t in &self.targets {
            crate::model::SiteSet::new(t.clone())?.check_in(self.n)?;
        }
        self.grid.to_grid()?;
        Ok(())
    }
}

/// Partition of the chain into blocks carrying independent eigenstates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PartitionSpec {
    /// Two blocks split after `n/2` (or after `split`).
    TwoBlocks {
        #[serde(default)]
        split: Option<usize>,
    },
    Whole,
    Singletons,
    CutPoints { cuts: Vec<usize> },
}

impl PartitionSpec {
    pub fn to_partition(&self, n: usize) -> Result<Partition> {
        match self {
            PartitionSpec::TwoBlocks { split } => {
                let s = split.unwrap_or(n / 2);
                if s == 0 || s >= n {
                    return Err(XyError::config(format!("split {s} outside (0, {n})")));
                }
                Partition::two_blocks(n, s)
            }
            PartitionSpec::Whole => Ok(Partition::whole(n)),
            PartitionSpec::Singletons => Ok(Partition::singletons(n)),
            PartitionSpec::CutPoints { cuts } => Partition::from_cut_points(cuts, n),
        }
    }
}

/// Entanglement cut `Lambda_0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CutSpec {
    HalfChain,
    Interval { a: usize, b: usize },
}

impl CutSpec {
    pub fn to_block(&self, n: usize) -> Result<Subinterval> {
        let block = match self {
            CutSpec::HalfChain => Subinterval::new(1, (n / 2).max(1))?,
            CutSpec::Interval { a, b } => Subinterval::new(*a, *b)?,
        };
        block.check_in(n)?;
        Ok(block)
    }
}

fn default_random_patterns() -> usize {
    16
}
fn default_exhaustive_below() -> usize {
    12
}

/// Pattern battery over which the inner supremum is taken: exhaustive over
/// all `2^n` patterns for small chains, otherwise all-zeros, all-ones,
/// alternating plus seeded random patterns.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatterySpec {
    #[serde(default = "default_random_patterns")]
    pub random_patterns: usize,
    /// Chains with `n <= exhaustive_below` enumerate every pattern instead.
    #[serde(default = "default_exhaustive_below")]
    pub exhaustive_below: usize,
}

impl Default for BatterySpec {
    fn default() -> Self {
        BatterySpec {
            random_patterns: default_random_patterns(),
            exhaustive_below: default_exhaustive_below(),
        }
    }
}

fn default_control_realizations() -> usize {
    8
}

/// Clean-chain contrast run: same geometry, constant field, no disorder.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSpec {
    pub nu: f64,
    #[serde(default = "default_control_realizations")]
    pub realizations: usize,
}

/// Entanglement-dynamics experiment over a size sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntanglementConfig {
    pub sizes: Vec<usize>,
    pub realizations: usize,
    pub seed: u64,
    pub disorder: DisorderTriple,
    #[serde(default)]
    pub grid: GridSpec,
    pub partition: PartitionSpec,
    pub cut: CutSpec,
    #[serde(default)]
    pub battery: BatterySpec,
    #[serde(default)]
    pub control: Option<ControlSpec>,
}

impl EntanglementConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.realizations == 0 {
            return Err(XyError::config("sizes and realizations must be nonempty"));
        }
        self.disorder.validate()?;
        for &n in &self.sizes {
            if n < 2 {
                return Err(XyError::config("entanglement sweep needs n >= 2"));
            }
            self.partition.to_partition(n)?;
            self.cut.to_block(n)?;
        }
        self.grid.to_grid()?;
        Ok(())
    }
}

/// Flavor of the one-particle matrix used for the correlator estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlavorSpec {
    IsotropicA,
    AnisotropicM,
}

fn default_flavor() -> FlavorSpec {
    FlavorSpec::IsotropicA
}

/// Eigenfunction-correlator estimation experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigencorrelatorConfig {
    pub n: usize,
    pub realizations: usize,
    pub seed: u64,
    pub disorder: DisorderTriple,
    #[serde(default = "default_flavor")]
    pub flavor: FlavorSpec,
    #[serde(default)]
    pub fit_window: Option<(usize, usize)>,
}

impl EigencorrelatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.realizations == 0 {
            return Err(XyError::config("need n >= 2 and realizations >= 1"));
        }
        self.disorder.validate()?;
        if self.flavor == FlavorSpec::IsotropicA && !self.disorder.is_isotropic() {
            return Err(XyError::config(
                "flavor isotropic_a requires gamma = constant 0",
            ));
        }
        Ok(())
    }

    pub fn window(&self) -> (usize, usize) {
        self.fit_window.unwrap_or((1, self.n / 2))
    }
}

/// Top-level experiment config: exactly one experiment object per file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentConfig {
    Transport(TransportConfig),
    Entanglement(EntanglementConfig),
    Eigencorrelator(EigencorrelatorConfig),
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentConfig::Transport(c) => c.validate(),
            ExperimentConfig::Entanglement(c) => c.validate(),
            ExperimentConfig::Eigencorrelator(c) => c.validate(),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ExperimentConfig::Transport(c) => c.seed,
            ExperimentConfig::Entanglement(c) => c.seed,
            ExperimentConfig::Eigencorrelator(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            ExperimentConfig::Transport(c) => c.seed = seed,
            ExperimentConfig::Entanglement(c) => c.seed = seed,
            ExperimentConfig::Eigencorrelator(c) => c.seed = seed,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentConfig::Transport(_) => "transport",
            ExperimentConfig::Entanglement(_) => "entanglement",
            ExperimentConfig::Eigencorrelator(_) => "eigencorrelator",
        }
    }
}

/// Parse and validate a config file; parse errors carry line/column.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| XyError::config(format!("cannot read {}: {e}", path.display())))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| XyError::config(format!("{}: {e}", path.display())))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Record of one CLI run: what was executed, with which config and seed,
/// and which files it produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub schema_version: u32,
    pub master_seed: u64,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<String>,
    pub config: serde_json::Value,
}

pub const SCHEMA_VERSION: u32 = 1;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_transport_config() {
        let text = r#"{
            "experiment": "transport",
            "n": 50,
            "realizations": 10,
            "seed": 1,
            "disorder": {
                "mu": {"kind": "constant", "value": 1.0},
                "gamma": {"kind": "constant", "value": 0.0},
                "nu": {"kind": "uniform", "low": 0.0, "high": 4.0}
            },
            "profile": {"kind": "domain_wall", "a": 21, "b": 30},
            "targets": [[35], [40], [45]]
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.name(), "transport");
        assert_eq!(cfg.seed(), 1);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{
            "experiment": "eigencorrelator",
            "n": 10,
            "realizations": 2,
            "seed": 3,
            "disorder": {
                "mu": {"kind": "constant", "value": 1.0},
                "gamma": {"kind": "constant", "value": 0.0},
                "nu": {"kind": "uniform", "low": 0.0, "high": 4.0}
            },
            "tpyo_field": 1
        }"#;
        assert!(serde_json::from_str::<ExperimentConfig>(text).is_err());
    }

    #[test]
    fn anisotropic_transport_rejected() {
        let text = r#"{
            "experiment": "transport",
            "n": 10,
            "realizations": 2,
            "seed": 3,
            "disorder": {
                "mu": {"kind": "constant", "value": 1.0},
                "gamma": {"kind": "uniform", "low": -0.1, "high": 0.1},
                "nu": {"kind": "uniform", "low": 0.0, "high": 4.0}
            },
            "profile": {"kind": "uniform", "value": 0.5},
            "targets": [[5]]
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let cfg = ExperimentConfig::Entanglement(EntanglementConfig {
            sizes: vec![20, 40, 80],
            realizations: 100,
            seed: 7,
            disorder: DisorderTriple {
                mu: Distribution::Constant { value: 1.0 },
                gamma: Distribution::Constant { value: 0.0 },
                nu: Distribution::Uniform { low: 0.0, high: 4.0 },
            },
            grid: GridSpec::default(),
            partition: PartitionSpec::TwoBlocks { split: None },
            cut: CutSpec::HalfChain,
            battery: BatterySpec::default(),
            control: Some(ControlSpec {
                nu: 1.0,
                realizations: 8,
            }),
        });
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        back.validate().unwrap();
        assert_eq!(
            serde_json::to_string(&back).unwrap(),
            serde_json::to_string(&cfg).unwrap()
        );
    }
}
