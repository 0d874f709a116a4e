//! Growth constants of `sum_j d_j^2`: exact sums against the quadrature
//! constants.

use serde_json::json;

use super::SuiteContext;
use crate::engine::{prop1_reference, sum_d_squared};
use crate::error::Result;
use crate::filters::FilterSpec;
use crate::stats::{TestReport, Threshold};

pub fn run(ctx: &SuiteContext) -> Result<Vec<TestReport>> {
    variance_constants(ctx)
}

fn ratio(filter: &FilterSpec, n: u64, horizon: u64) -> Result<(f64, f64, f64)> {
    let (c, e) = prop1_reference(filter)?;
    let s = sum_d_squared(filter, n, horizon)?;
    Ok((s / (c * (n as f64).powf(e)), s, c))
}

pub fn variance_constants(ctx: &SuiteContext) -> Result<Vec<TestReport>> {
    let n = 1u64 << ctx.size(14, 12);
    let n_cross = 1u64 << ctx.size(16, 13);
    let horizon = 1u64 << ctx.size(24, 21);
    let cases = [
        ("positive beta=0.75", FilterSpec::power_law(0.75, 1.0)?, true),
        ("summable beta=1.5", FilterSpec::power_law(1.5, 1.0)?, false),
        ("zero_sum beta=1.25", FilterSpec::zero_sum(1.25)?, true),
    ];
    let mut out = Vec::new();
    for (label, filter, _) in &cases {
        let (r, s, c) = ratio(filter, n, horizon)?;
        out.push(
            TestReport::new(
                format!("prop1_ratio {label}"),
                r,
                Threshold::Within { target: 1.0, tol: ctx.widen(0.03) },
            )
            .with_details(json!({ "n": n, "J": horizon, "sum_d_squared": s, "constant": c })),
        );
    }
    for (label, filter, _) in cases.iter().filter(|c| c.2) {
        let (r, s, c) = ratio(filter, n_cross, horizon)?;
        out.push(
            TestReport::new(
                format!("prop1_quadrature_vs_summation {label}"),
                r,
                Threshold::Within { target: 1.0, tol: ctx.widen(0.02) },
            )
            .with_details(json!({ "n": n_cross, "J": horizon, "sum_d_squared": s, "constant": c })),
        );
    }
    Ok(out)
}
