//! Limit-process generators against their defining formulas.

use serde_json::json;

use super::SuiteContext;
use crate::error::Result;
use crate::limits::{sample_fbm, sample_lfsm, sample_stable, FbmSpec, LfsmSpec, StableSpec};
use crate::rng::Stream;
use crate::stats::{cf_distance, covariance_match, TestReport, Threshold};

pub const FBM_HURST: [f64; 3] = [0.3, 0.5, 0.8];
pub const FBM_POINTS: usize = 16;
pub const CF_GRID: [f64; 3] = [0.5, 1.0, 2.0];
pub const STABLE_ALPHAS: [f64; 2] = [0.8, 1.5];
/// `beta = 1` is admissible only for `alpha > 1`.
pub const LEVY_ALPHAS: [f64; 3] = [1.2, 1.5, 1.9];

pub fn run(ctx: &SuiteContext) -> Result<Vec<TestReport>> {
    let mut out = fbm_covariance(ctx)?;
    out.extend(stable_cf(ctx)?);
    out.push(lfsm_levy_motion(ctx)?);
    Ok(out)
}

/// All grid covariances of `sample_fbm` paths within three standard errors.
pub fn fbm_covariance(ctx: &SuiteContext) -> Result<Vec<TestReport>> {
    let paths = ctx.size(10_000, 2_000);
    let mut tol = ctx.tolerances.clone();
    tol.covariance_bias = 0.0;
    let mut out = Vec::new();
    for &h in &FBM_HURST {
        let spec = FbmSpec::uniform(h, FBM_POINTS)?;
        let seed = ctx.seed_for(&format!("limits/fbm/{h}"));
        let values = (0..paths)
            .map(|i| Ok(sample_fbm(&spec, &mut Stream::new(seed, i as u64))?.values))
            .collect::<Result<Vec<_>>>()?;
        let r = covariance_match(&values, &spec.grid, h, None, &tol)?.with_seed(seed);
        out.push(TestReport {
            name: format!("fbm_covariance H={h}"),
            ..r
        });
    }
    Ok(out)
}

/// Empirical characteristic function of stable draws against the exact one.
pub fn stable_cf(ctx: &SuiteContext) -> Result<Vec<TestReport>> {
    let draws = ctx.size(100_000, 20_000);
    let limit = ctx.widen(ctx.tolerances.cf_distance);
    let mut out = Vec::new();
    for &alpha in &STABLE_ALPHAS {
        for (label, spec) in [
            ("right_skewed", StableSpec::right_skewed(alpha, 1.0)?),
            ("left_skewed", StableSpec::left_skewed(alpha, 1.0)?),
        ] {
            let seed = ctx.seed_for(&format!("limits/stable/{alpha}/{label}"));
            let mut st = Stream::new(seed, 0);
            let x = (0..draws).map(|_| sample_stable(&spec, &mut st)).collect::<Result<Vec<_>>>()?;
            let d = cf_distance(&x, &spec, &CF_GRID, None)?;
            out.push(
                TestReport::new(format!("stable_cf alpha={alpha} {label}"), d, Threshold::AtMost { limit })
                    .with_sample(draws)
                    .with_seed(seed)
                    .with_details(json!({ "D": spec.d, "skewness": spec.skewness(), "u": CF_GRID })),
            );
        }
    }
    Ok(out)
}

/// At `beta = 1` every LFSM path equals the running sum of stable
/// increments drawn from the same stream.
pub fn lfsm_levy_motion(ctx: &SuiteContext) -> Result<TestReport> {
    let grid = [0.125, 0.25, 0.5, 0.75, 1.0];
    let paths = ctx.size(50, 10);
    let seed = ctx.seed_for("limits/lfsm");
    let mut worst = 0.0f64;
    for &alpha in &LEVY_ALPHAS {
        let spec = LfsmSpec::new(alpha, 1.0)?;
        let increment = StableSpec::right_skewed(alpha, spec.step)?;
        let cells = (1.0 / spec.step).round() as usize;
        for p in 0..paths {
            let path = sample_lfsm(&spec, &grid, &mut Stream::new(seed, p as u64))?;
            let mut st = Stream::new(seed, p as u64);
            let mut sum = 0.0;
            let mut running = Vec::with_capacity(cells);
            for _ in 0..cells {
                sum += sample_stable(&increment, &mut st)?;
                running.push(sum);
            }
            for (y, &t) in path.iter().zip(&grid) {
                let k = (t / spec.step).round() as usize;
                worst = worst.max((y - running[k - 1]).abs());
            }
        }
    }
    Ok(
        TestReport::new("lfsm_beta_one_levy_motion", worst, Threshold::AtMost { limit: 0.0 })
            .with_sample(LEVY_ALPHAS.len() * paths)
            .with_seed(seed),
    )
}
