//! Moment identities of the tapered Pareto law and sampler goodness of fit.

use serde_json::json;

use super::SuiteContext;
use crate::distributions::TaperedParetoParams;
use crate::error::Result;
use crate::rng::Stream;
use crate::stats::{ks_test, TestReport, Threshold};

pub const ALPHAS: [f64; 5] = [0.5, 0.8, 1.2, 1.5, 1.9];
pub const TAPER_LEVELS: [f64; 5] = [1.5, 10.0, 1e2, 1e4, 1e6];
/// Taper level of the asymptotic ratio checks.
pub const RATIO_LEVEL: f64 = 1e4;

pub fn run(ctx: &SuiteContext) -> Result<Vec<TestReport>> {
    let mut out = identities(ctx)?;
    out.extend(sampler_ks(ctx)?);
    Ok(out)
}

/// Unit mass, closed form against quadrature, and the leading-order
/// asymptotics at `b = 10^4`.
pub fn identities(_ctx: &SuiteContext) -> Result<Vec<TestReport>> {
    let mut mass_err = 0.0f64;
    let mut quad_err = 0.0f64;
    let mut worst_quad = json!(null);
    for &alpha in &ALPHAS {
        for &b in &TAPER_LEVELS {
            let p = TaperedParetoParams::new(alpha, b)?;
            mass_err = mass_err.max((p.moment(0.0)? - 1.0).abs());
            for r in [0.5, 1.0, alpha, 2.0, 3.0] {
                let exact = p.moment(r)?;
                let quad = p.moment_by_quadrature(r)?;
                let rel = (exact - quad).abs() / quad;
                if rel > quad_err {
                    quad_err = rel;
                    worst_quad = json!({ "alpha": alpha, "b": b, "r": r, "exact": exact, "quadrature": quad });
                }
            }
        }
    }
    let mut out = vec![
        TestReport::new("moment_unit_mass", mass_err, Threshold::AtMost { limit: 1e-12 })
            .with_details(json!({ "alphas": ALPHAS, "b": TAPER_LEVELS })),
        TestReport::new("moment_exact_vs_quadrature", quad_err, Threshold::AtMost { limit: 1e-8 })
            .with_details(json!({ "worst": worst_quad })),
    ];
    for &alpha in &ALPHAS {
        let p = TaperedParetoParams::new(alpha, RATIO_LEVEL)?;
        for r in [alpha / 2.0, alpha, 2.0] {
            let ratio = p.moment(r)? / p.moment_asymptotic(r);
            out.push(
                TestReport::new(
                    format!("moment_asymptotic_ratio alpha={alpha} r={r}"),
                    ratio,
                    Threshold::Within { target: 1.0, tol: 0.05 },
                )
                .with_details(json!({ "alpha": alpha, "b": RATIO_LEVEL, "r": r })),
            );
        }
    }
    Ok(out)
}

pub const KS_ALPHAS: [f64; 2] = [0.8, 1.5];
pub const KS_LEVELS: [f64; 2] = [10.0, 1e3];

/// KS test of sampler draws against the exact CDF.
pub fn sampler_ks(ctx: &SuiteContext) -> Result<Vec<TestReport>> {
    let draws = ctx.size(100_000, 20_000);
    let mut out = Vec::new();
    for &alpha in &KS_ALPHAS {
        for &b in &KS_LEVELS {
            let p = TaperedParetoParams::new(alpha, b)?;
            let seed = ctx.seed_for(&format!("moments/ks/{alpha}/{b}"));
            let x = p.sample_n(&mut Stream::new(seed, 0), draws);
            out.push(
                ks_test(
                    &format!("sampler_ks alpha={alpha} b={b}"),
                    &x,
                    |v| p.cdf(v),
                    ctx.tolerances.ks_level,
                )?
                .with_seed(seed),
            );
        }
    }
    Ok(out)
}
