//! Exact finite-`n` quantities and Monte Carlo simulation of
//! `S_n(t) = sum_{k <= [nt]} X_k`, `X_k = sum_{l >= 0} a_l xi_{k-l}`.

pub mod dcoef;
pub mod kernel;
pub mod simulate;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::distributions::TaperedParetoParams;
use crate::error::{param, Error, Result};
use crate::filters::FilterSpec;
use crate::regimes::{hurst_exponent, RegimeParams};

pub use dcoef::{
    d_power_sums, floor_nt, prop1_constant, prop1_reference, sum_d_squared, DCoefficients, LyapunovRatio, Prop1Case,
    Prop1Constant,
};
pub use kernel::{kernel_registry, select_kernel, KernelSetup, PartialSumKernel};
pub use simulate::{simulate, simulate_coupled, CoupledEnsembles};

/// Layout tag written next to every ensemble CSV.
pub const CSV_LAYOUT: &str = "taperlin-ensemble/1";

/// Default truncation of infinite filters, as a multiple of `n` rounded up
/// to a power of two.
pub const DEFAULT_TRUNCATION_FACTOR: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Divide by the exact standard deviation of `S_n(1)`.
    ExactStdDev,
    /// Divide by `n^H`, `H` from the regime classifier (`C = 1`).
    TheoreticalPower,
    /// No normalization.
    Raw,
}

/// One Monte Carlo experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPlan")]
pub struct SimulationPlan {
    /// Innovation law; `b = n^gamma`.
    pub params: TaperedParetoParams,
    pub gamma: f64,
    pub filter: FilterSpec,
    pub n: u64,
    pub t_grid: Vec<f64>,
    pub replicates: usize,
    pub truncation_j: u64,
    pub seed: u64,
    pub normalization: Normalization,
    /// Partial-sum kernel name, or `auto`.
    pub kernel: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlan {
    params: RawParams,
    gamma: f64,
    filter: FilterSpec,
    n: u64,
    t_grid: Vec<f64>,
    replicates: usize,
    #[serde(default)]
    truncation_j: Option<u64>,
    #[serde(default)]
    seed: u64,
    normalization: Normalization,
    #[serde(default = "auto_kernel")]
    kernel: String,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    #[serde(default)]
    b: Option<f64>,
}

fn auto_kernel() -> String {
    "auto".into()
}

impl TryFrom<RawPlan> for SimulationPlan {
    type Error = Error;
    fn try_from(raw: RawPlan) -> Result<Self> {
        let mut plan = SimulationPlan::new(raw.params.alpha, raw.gamma, raw.filter, raw.n)?;
        if let Some(b) = raw.params.b {
            if (b - plan.params.b()).abs() > 1e-12 * plan.params.b() {
                return Err(param(format!("b = {b} does not match n^gamma = {}", plan.params.b())));
            }
        }
        plan.t_grid = raw.t_grid;
        plan.replicates = raw.replicates;
        if let Some(j) = raw.truncation_j {
            plan.truncation_j = j;
        }
        plan.seed = raw.seed;
        plan.normalization = raw.normalization;
        plan.kernel = raw.kernel;
        plan.validate()?;
        Ok(plan)
    }
}

/// Default truncation horizon: the full length of an explicit filter,
/// otherwise `16 n` rounded up to a power of two. A fixed ratio `J / n` keeps
/// the relative truncation error of `sum_j d_j^2` independent of `n`.
pub fn default_truncation(filter: &FilterSpec, n: u64) -> u64 {
    match filter {
        FilterSpec::ExplicitFinite { coeffs } => (coeffs.len() as u64).next_power_of_two(),
        _ => DEFAULT_TRUNCATION_FACTOR * n.max(1).next_power_of_two(),
    }
}

impl SimulationPlan {
    /// Plan with defaults: grid `{1}`, 1000 replicates, default truncation,
    /// seed 0, exact standard-deviation normalization, automatic kernel.
    pub fn new(alpha: f64, gamma: f64, filter: FilterSpec, n: u64) -> Result<Self> {
        if n < 2 {
            return Err(param(format!("n must be at least 2 (got {n})")));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(param(format!("gamma must be positive so that b_n > 1 (got {gamma})")));
        }
        filter.validate()?;
        let b = (n as f64).powf(gamma);
        let params = TaperedParetoParams::new(alpha, b)?;
        let truncation_j = default_truncation(&filter, n);
        Ok(Self {
            params,
            gamma,
            filter,
            n,
            t_grid: vec![1.0],
            replicates: 1000,
            truncation_j,
            seed: 0,
            normalization: Normalization::ExactStdDev,
            kernel: auto_kernel(),
        })
    }

    pub fn with_grid(mut self, t_grid: Vec<f64>) -> Self {
        self.t_grid = t_grid;
        self
    }

    pub fn with_replicates(mut self, replicates: usize) -> Self {
        self.replicates = replicates;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_truncation(mut self, truncation_j: u64) -> Self {
        self.truncation_j = truncation_j;
        self
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn with_kernel(mut self, kernel: impl Into<String>) -> Self {
        self.kernel = kernel.into();
        self
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha()
    }

    pub fn b(&self) -> f64 {
        self.params.b()
    }

    pub fn validate(&self) -> Result<()> {
        self.filter.validate()?;
        let b = (self.n as f64).powf(self.gamma);
        if (b - self.params.b()).abs() > 1e-12 * b {
            return Err(param(format!("stored b = {} differs from n^gamma = {b}", self.params.b())));
        }
        if self.t_grid.is_empty() {
            return Err(param("t_grid must not be empty"));
        }
        if self.t_grid.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
            return Err(param("t_grid values must lie in (0, 1]"));
        }
        if self.t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(param("t_grid must be strictly increasing"));
        }
        if self.replicates == 0 {
            return Err(param("replicates must be positive"));
        }
        if self.truncation_j == 0 {
            return Err(param("truncation_j must be positive"));
        }
        Ok(())
    }

    pub fn regime_params(&self) -> Result<RegimeParams> {
        RegimeParams::for_filter(self.alpha(), self.gamma, &self.filter)
    }

    pub(crate) fn kernel_setup(&self) -> KernelSetup {
        let len = self.truncation_j as usize + 1;
        KernelSetup {
            coeffs: self.filter.coefficients(len),
            partial: self.filter.partial_sums(len),
            n: self.n,
            horizon: self.truncation_j,
            grid_m: self.t_grid.iter().map(|&t| floor_nt(self.n, t)).collect(),
        }
    }

    /// `A_n` for the plan's normalization mode.
    pub fn normalizer(&self) -> Result<f64> {
        match self.normalization {
            Normalization::ExactStdDev => Ok(variance_exact(self)?.sqrt()),
            Normalization::TheoreticalPower => {
                let h = hurst_exponent(&self.regime_params()?)?;
                Ok((self.n as f64).powf(h))
            }
            Normalization::Raw => Ok(1.0),
        }
    }
}

/// `Var S_n(1) = sum_j d_{n,j}^2 Var xi`, exact up to filter truncation.
pub fn variance_exact(plan: &SimulationPlan) -> Result<f64> {
    Ok(sum_d_squared(&plan.filter, plan.n, plan.truncation_j)? * plan.params.centered_variance())
}

/// Third-moment Lyapunov ratio of `S_n(1)`.
pub fn lyapunov_ratio(plan: &SimulationPlan) -> Result<LyapunovRatio> {
    let sums = d_power_sums(&plan.filter, plan.n, 1.0, plan.truncation_j)?;
    dcoef::lyapunov_from_parts(&sums, &plan.params)
}

/// Replicate x grid matrix of normalized partial sums.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathEnsemble {
    pub plan: SimulationPlan,
    /// `values[r][g]`: replicate `r` at `t_grid[g]`.
    pub values: Vec<Vec<f64>>,
    /// `A_n` the raw sums were divided by.
    pub normalization_used: f64,
    pub kernel: String,
}

impl PathEnsemble {
    pub fn replicates(&self) -> usize {
        self.values.len()
    }

    pub fn column(&self, g: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[g]).collect()
    }

    /// Column for the grid point equal to `t`.
    pub fn column_at(&self, t: f64) -> Result<Vec<f64>> {
        let g = self
            .plan
            .t_grid
            .iter()
            .position(|&s| (s - t).abs() < 1e-12)
            .ok_or_else(|| param(format!("t = {t} is not on the grid")))?;
        Ok(self.column(g))
    }

    pub fn last_column(&self) -> Vec<f64> {
        self.column(self.plan.t_grid.len() - 1)
    }

    /// Header `replicate,t=<t_1>,...`, then one row per replicate.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "replicate")?;
        for t in &self.plan.t_grid {
            write!(w, ",t={t}")?;
        }
        writeln!(w)?;
        for (r, row) in self.values.iter().enumerate() {
            write!(w, "{r}")?;
            for v in row {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }
}
