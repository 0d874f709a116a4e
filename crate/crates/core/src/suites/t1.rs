//! Gaussian (fBm) limits under hard tapering.

use serde_json::json;

use super::SuiteContext;
use crate::engine::{lyapunov_ratio, simulate, variance_exact, Normalization, SimulationPlan};
use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::regimes::{classify, RegimeVerdict};
use crate::stats::{covariance_match_ensemble, ks_normal, scaling_regression, std_dev, variance, TestReport, Threshold};

/// One hard-tapering parameter set.
#[derive(Clone, Debug)]
pub struct ReferenceCase {
    pub label: &'static str,
    pub alpha: f64,
    pub gamma: f64,
    pub filter: FilterSpec,
}

impl ReferenceCase {
    pub fn plan(&self, n: u64) -> Result<SimulationPlan> {
        SimulationPlan::new(self.alpha, self.gamma, self.filter.clone(), n)
    }

    pub fn verdict(&self) -> Result<RegimeVerdict> {
        classify(&self.plan(2)?.regime_params()?)
    }

    pub fn hurst(&self) -> Result<f64> {
        self.verdict()?
            .hurst
            .ok_or_else(|| Error::NoExponent(format!("{} has no Hurst exponent", self.label)))
    }
}

/// The three memory cases at `alpha = 1.5`.
pub fn reference_cases() -> Vec<ReferenceCase> {
    vec![
        ReferenceCase {
            label: "case_i",
            alpha: 1.5,
            gamma: 0.2,
            filter: FilterSpec::power_law(0.75, 1.0).expect("valid filter"),
        },
        ReferenceCase {
            label: "case_ii",
            alpha: 1.5,
            gamma: 0.5,
            filter: FilterSpec::power_law(1.5, 1.0).expect("valid filter"),
        },
        ReferenceCase {
            label: "case_iii",
            alpha: 1.5,
            gamma: 0.15,
            filter: FilterSpec::zero_sum(1.25).expect("valid filter"),
        },
    ]
}

pub fn run(ctx: &SuiteContext) -> Result<Vec<TestReport>> {
    let mut out = Vec::new();
    for case in reference_cases() {
        out.extend(desk_scale(ctx, &case)?);
    }
    out.extend(hurst_scaling(ctx)?);
    out.extend(lyapunov_decay(ctx)?);
    Ok(out)
}

/// Variance, normality and covariance of `Z_n` at `n = 2^12`.
pub fn desk_scale(ctx: &SuiteContext, case: &ReferenceCase) -> Result<Vec<TestReport>> {
    let n = 1u64 << ctx.size(12, 10);
    let seed = ctx.seed_for(&format!("t1/desk/{}", case.label));
    let tol = &ctx.tolerances;
    let plan = case
        .plan(n)?
        .with_grid(vec![0.25, 0.5, 1.0])
        .with_replicates(ctx.size(2000, 500))
        .with_seed(seed)
        .with_normalization(Normalization::ExactStdDev);
    let h = case.hurst()?;
    let ens = simulate(&plan)?;
    let z = ens.last_column();
    let half = ctx.widen(0.1);
    let mut cov_tol = tol.clone();
    cov_tol.covariance_bias = ctx.widen(tol.covariance_bias);
    let l = case.label;
    Ok(vec![
        TestReport::new(
            format!("t1_variance {l}"),
            variance(&z),
            Threshold::Range { lo: 1.0 - half, hi: 1.0 + half },
        )
        .with_sample(z.len())
        .with_seed(seed),
        TestReport {
            name: format!("t1_ks_normal {l}"),
            ..ks_normal(&z, tol.ks_level)?.with_seed(seed)
        },
        TestReport {
            name: format!("t1_covariance {l}"),
            ..covariance_match_ensemble(&ens, h, Some(&[(0.25, 1.0), (0.5, 1.0)]), &cov_tol)?
        },
    ])
}

/// Log-log slope of the standard deviation of `S_n(1)` over
/// `n = 2^9..2^14` against `H`.
pub fn hurst_scaling(ctx: &SuiteContext) -> Result<Vec<TestReport>> {
    let exps: Vec<u32> = (9..=ctx.size(14, 12) as u32).collect();
    let reps = ctx.size(2000, 400);
    let mut out = Vec::new();
    for case in reference_cases() {
        let h = case.hurst()?;
        let seed = ctx.seed_for(&format!("t1/hurst/{}", case.label));
        let mut empirical = Vec::new();
        let mut exact = Vec::new();
        for &k in &exps {
            let n = 1u64 << k;
            let plan = case
                .plan(n)?
                .with_replicates(reps)
                .with_seed(seed.wrapping_add(k as u64))
                .with_normalization(Normalization::Raw);
            let ens = simulate(&plan)?;
            empirical.push((n as f64, std_dev(&ens.last_column())));
            exact.push((n as f64, variance_exact(&plan)?.sqrt()));
        }
        let fit = scaling_regression(&empirical)?;
        let exact_fit = scaling_regression(&exact)?;
        out.push(
            TestReport::new(
                format!("t1_hurst_slope {}", case.label),
                fit.exponent_hat,
                Threshold::Within { target: h, tol: ctx.widen(ctx.tolerances.exponent_tolerance) },
            )
            .with_sample(reps)
            .with_seed(seed)
            .with_details(json!({
                "n": exps.iter().map(|k| 1u64 << k).collect::<Vec<_>>(),
                "std_dev": empirical.iter().map(|p| p.1).collect::<Vec<_>>(),
                "stderr": fit.stderr,
                "exact_slope": exact_fit.exponent_hat,
            })),
        );
    }
    Ok(out)
}

/// Slope of `log L(3, n)` over `n = 2^8..2^16` from exact moments, against
/// `-1/2 + gamma alpha / 2` (case i) and `-3/2 + beta + gamma alpha / 2`
/// (case iii).
pub fn lyapunov_decay(ctx: &SuiteContext) -> Result<Vec<TestReport>> {
    let exps: Vec<u32> = (8..=ctx.size(16, 13) as u32).collect();
    let mut out = Vec::new();
    for case in reference_cases() {
        let (a, g) = (case.alpha, case.gamma);
        let target = match case.label {
            "case_i" => -0.5 + g * a / 2.0,
            "case_iii" => -1.5 + case.filter.beta().expect("power-law filter") + g * a / 2.0,
            _ => continue,
        };
        let mut points = Vec::new();
        let mut bound = Vec::new();
        for &k in &exps {
            let n = 1u64 << k;
            let l = lyapunov_ratio(&case.plan(n)?)?;
            points.push((n as f64, l.value));
            bound.push((n as f64, l.max_factor * l.innovation_factor));
        }
        let fit = scaling_regression(&points)?;
        let bound_fit = scaling_regression(&bound)?;
        out.push(
            TestReport::new(
                format!("t1_lyapunov_slope {}", case.label),
                fit.exponent_hat,
                Threshold::Within { target, tol: ctx.widen(ctx.tolerances.exponent_tolerance) },
            )
            .with_details(json!({
                "n": exps.iter().map(|k| 1u64 << k).collect::<Vec<_>>(),
                "ratio": points.iter().map(|p| p.1).collect::<Vec<_>>(),
                "max_bound_slope": bound_fit.exponent_hat,
            })),
        );
    }
    Ok(out)
}
