//! Coupling of tapered and untapered innovations.

use rayon::prelude::*;
use serde_json::json;

use super::{t2, SuiteContext};
use crate::distributions::{CouplingSampler, TaperedParetoParams};
use crate::error::Result;
use crate::rng::Stream;
use crate::stats::{coupling_decay, scaling_regression, TestReport, Threshold};

pub const BOUND_ALPHA: f64 = 1.5;
pub const BOUND_KAPPA: f64 = 1.0;
pub const BOUND_LEVELS: [f64; 4] = [10.0, 1e2, 1e3, 1e4];
const CHUNK: usize = 1 << 20;

pub fn run(ctx: &SuiteContext) -> Result<Vec<TestReport>> {
    Ok(vec![bound(ctx)?, decay(ctx)?])
}

/// `E|eta - xi|^kappa` by Monte Carlo. Every level reuses the same uniforms.
pub fn gap_moment(alpha: f64, b: f64, kappa: f64, draws: usize, seed: u64) -> Result<f64> {
    let sampler = CouplingSampler::new(TaperedParetoParams::new(alpha, b)?)?;
    let chunks = draws.div_ceil(CHUNK);
    let sums: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut st = Stream::new(seed, c as u64);
            let len = CHUNK.min(draws - c * CHUNK);
            (0..len)
                .map(|_| {
                    let d = sampler.sample(&mut st);
                    (d.eta - d.xi).abs().powf(kappa)
                })
                .sum::<f64>()
        })
        .collect();
    Ok(sums.iter().sum::<f64>() / draws as f64)
}

/// Slope of `log E|eta - xi|^kappa` against `log b`, target `-(alpha - kappa)`.
pub fn bound(ctx: &SuiteContext) -> Result<TestReport> {
    let draws = ctx.size(100_000_000, 10_000_000);
    let seed = ctx.seed_for("coupling/bound");
    let points = BOUND_LEVELS
        .iter()
        .map(|&b| Ok((b, gap_moment(BOUND_ALPHA, b, BOUND_KAPPA, draws, seed)?)))
        .collect::<Result<Vec<_>>>()?;
    let fit = scaling_regression(&points)?;
    Ok(TestReport::new(
        "coupling_bound_slope",
        fit.exponent_hat,
        Threshold::Within {
            target: -(BOUND_ALPHA - BOUND_KAPPA),
            tol: ctx.widen(0.1),
        },
    )
    .with_sample(draws)
    .with_seed(seed)
    .with_details(json!({
        "alpha": BOUND_ALPHA,
        "kappa": BOUND_KAPPA,
        "b": BOUND_LEVELS,
        "moments": points.iter().map(|p| p.1).collect::<Vec<_>>(),
        "stderr": fit.stderr,
    })))
}

/// `E|V_n(1) - S_n(1)|^kappa / n^(H kappa)` must decrease in `n` for the
/// long-memory soft-tapering reference case.
pub fn decay(ctx: &SuiteContext) -> Result<TestReport> {
    let case = &t2::reference_cases()[0];
    let beta = case.filter.beta().expect("power-law filter");
    let kappa = (1.0 / beta + case.alpha) / 2.0;
    let seed = ctx.seed_for("coupling/decay");
    let reps = ctx.size(400, 100);
    let plans = (10..=ctx.size(14, 12) as u32)
        .map(|k| Ok(case.plan(1u64 << k)?.with_replicates(reps).with_seed(seed.wrapping_add(k as u64))))
        .collect::<Result<Vec<_>>>()?;
    let d = coupling_decay(&plans, kappa)?;
    Ok(
        TestReport::new("coupling_decay_slope", d.fit.exponent_hat, Threshold::Below { limit: 0.0 })
            .with_sample(reps)
            .with_seed(seed)
            .with_details(json!({ "kappa": kappa, "moments": d.moments, "stderr": d.fit.stderr })),
    )
}
