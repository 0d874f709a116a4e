//! Stable limits under soft tapering.

use serde_json::json;

use super::t1::ReferenceCase;
use super::SuiteContext;
use crate::engine::{simulate, Normalization};
use crate::error::Result;
use crate::filters::FilterSpec;
use crate::stats::{
    default_hill_k, hill_tail_index, ks_normal, mean, quantile_scaling, std_dev, TestReport, Threshold,
};

/// Long memory (`beta = 0.8`, LFSM limit) and short memory (`beta = 2`,
/// stable Levy limit), both at `alpha = 1.5`, `gamma = 1`.
pub fn reference_cases() -> Vec<ReferenceCase> {
    vec![
        ReferenceCase {
            label: "case_i",
            alpha: 1.5,
            gamma: 1.0,
            filter: FilterSpec::power_law(0.8, 1.0).expect("valid filter"),
        },
        ReferenceCase {
            label: "case_ii",
            alpha: 1.5,
            gamma: 1.0,
            filter: FilterSpec::power_law(2.0, 1.0).expect("valid filter"),
        },
    ]
}

pub const TIME_GRID: [f64; 6] = [1.0 / 32.0, 1.0 / 16.0, 0.125, 0.25, 0.5, 1.0];

pub fn run(ctx: &SuiteContext) -> Result<Vec<TestReport>> {
    let mut out = Vec::new();
    for case in reference_cases() {
        out.extend(desk_scale(ctx, &case)?);
    }
    Ok(out)
}

/// Tail index, self-similarity and non-normality of `Z_n = S_n / n^H`.
pub fn desk_scale(ctx: &SuiteContext, case: &ReferenceCase) -> Result<Vec<TestReport>> {
    let n = 1u64 << ctx.size(12, 10);
    let reps = ctx.size(2000, 500);
    let seed = ctx.seed_for(&format!("t2/desk/{}", case.label));
    let tol = &ctx.tolerances;
    let plan = case
        .plan(n)?
        .with_grid(TIME_GRID.to_vec())
        .with_replicates(reps)
        .with_seed(seed)
        .with_normalization(Normalization::TheoreticalPower);
    let h = case.hurst()?;
    let ens = simulate(&plan)?;
    let z = ens.last_column();
    let k = default_hill_k(reps, tol.hill_exponent).min(reps / 10);
    let hill = hill_tail_index(&z, k)?;
    let fit = quantile_scaling(&ens)?;
    let (m, s) = (mean(&z), std_dev(&z));
    let standardized: Vec<f64> = z.iter().map(|x| (x - m) / s).collect();
    let l = case.label;
    Ok(vec![
        TestReport::new(
            format!("t2_hill {l}"),
            hill,
            Threshold::Within { target: case.alpha, tol: ctx.widen(tol.hill_tolerance) },
        )
        .with_sample(reps)
        .with_seed(seed)
        .with_details(json!({ "k": k })),
        TestReport::new(
            format!("t2_quantile_scaling {l}"),
            fit.exponent_hat,
            Threshold::Within { target: h, tol: ctx.widen(0.07) },
        )
        .with_sample(reps)
        .with_seed(seed)
        .with_details(json!({ "t": TIME_GRID, "stderr": fit.stderr, "points": fit.points })),
        ks_normal(&standardized, tol.ks_level)?
            .with_seed(seed)
            .negated(format!("t2_not_normal {l}")),
    ])
}
