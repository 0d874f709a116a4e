//! TOML run configuration. Every field has a default and unknown keys are
//! rejected.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use taperlin_core::engine::{Normalization, SimulationPlan};
use taperlin_core::filters::FilterSpec;
use taperlin_core::stats::Tolerances;

pub const DEFAULT_OUT_DIR: &str = "taperlin-out";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    pub classify: ClassifyConfig,
    pub moments: MomentsConfig,
    pub sample: SampleConfig,
    pub simulate: SimulateConfig,
    pub verify: VerifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            workers: 0,
            out_dir: DEFAULT_OUT_DIR.into(),
            formats: vec![Format::Csv, Format::Json],
            classify: ClassifyConfig::default(),
            moments: MomentsConfig::default(),
            sample: SampleConfig::default(),
            simulate: SimulateConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub zero_sum: bool,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            beta: 0.75,
            gamma: 0.2,
            zero_sum: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentsConfig {
    pub alpha: f64,
    pub b: f64,
    pub orders: Vec<f64>,
}

impl Default for MomentsConfig {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            b: 100.0,
            orders: vec![0.0, 1.0, 2.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    pub alpha: f64,
    pub b: f64,
    pub count: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            b: 100.0,
            count: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub filter: FilterSpec,
    pub n: u64,
    pub t_grid: Vec<f64>,
    pub replicates: usize,
    /// Filter truncation; the engine default when absent.
    pub truncation_j: Option<u64>,
    pub normalization: Normalization,
    pub kernel: String,
    /// Stem of the ensemble file names.
    pub name: String,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            gamma: 0.2,
            filter: FilterSpec::power_law(0.75, 1.0).expect("valid default filter"),
            n: 1024,
            t_grid: vec![0.25, 0.5, 0.75, 1.0],
            replicates: 1000,
            truncation_j: None,
            normalization: Normalization::ExactStdDev,
            kernel: "auto".into(),
            name: "ensemble".into(),
        }
    }
}

impl SimulateConfig {
    pub fn plan(&self, seed: u64) -> taperlin_core::Result<SimulationPlan> {
        let mut plan = SimulationPlan::new(self.alpha, self.gamma, self.filter.clone(), self.n)?
            .with_grid(self.t_grid.clone())
            .with_replicates(self.replicates)
            .with_seed(seed)
            .with_normalization(self.normalization)
            .with_kernel(self.kernel.clone());
        if let Some(j) = self.truncation_j {
            plan = plan.with_truncation(j);
        }
        plan.validate()?;
        Ok(plan)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub fast: bool,
    pub tolerances: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            fast: false,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid configuration")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("cannot serialize configuration")
    }
}
