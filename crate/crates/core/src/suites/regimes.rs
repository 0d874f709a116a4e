//! Exhaustive consistency table of the regime classifier.

use serde_json::json;

use super::SuiteContext;
use crate::error::Result;
use crate::regimes::{classify, RegimeParams, Theorem};
use crate::stats::{TestReport, Threshold};

/// Theorem conditions read directly off their statements, boundaries
/// excluded.
pub fn theorem_predicates(alpha: f64, beta: f64, gamma: f64, zero_sum: bool) -> Vec<Theorem> {
    let (a, b, g) = (alpha, beta, gamma);
    let mut hits = Vec::new();
    if b > 0.5 && b < 1.0 && g < (1.0 / a).min((2.0 * b - 1.0) / (2.0 - a)) {
        hits.push(Theorem::T1i);
    }
    if b > 1.0 && !zero_sum && g < (1.0 / a).min(1.0 / (2.0 - a)) {
        hits.push(Theorem::T1ii);
    }
    if b > 1.0 && b < 1.5 && zero_sum && g < ((2.0 * b - 1.0) / (2.0 - a)).min((3.0 - 2.0 * b) / a) {
        hits.push(Theorem::T1iii);
    }
    if a != 1.0 && b * a > 1.0 {
        if b < 1.0 && g > 1.0 / a {
            hits.push(Theorem::T2i);
        }
        if b > 1.0 && !zero_sum && g > 1.0 / a {
            hits.push(Theorem::T2ii);
        }
        if b > 1.0 && b < 1.0 + 1.0 / a && zero_sum && g > 1.0 / a + (b - 1.0) / (a * b - 1.0) {
            hits.push(Theorem::T2iii);
        }
    }
    hits
}

/// Midpoints of `k` equal cells of `(lo, hi)`.
fn midpoints(k: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..k).map(|i| lo + (2 * i + 1) as f64 * (hi - lo) / (2 * k) as f64).collect()
}

pub fn run(ctx: &SuiteContext) -> Result<Vec<TestReport>> {
    table(ctx)
}

/// 25 x 20 x 20 grid over `alpha in (0, 2)`, `beta in (1/2, 3)`,
/// `gamma in (0, 3)`; points with `beta > 1` are also run with the zero-sum
/// flag.
pub fn table(_ctx: &SuiteContext) -> Result<Vec<TestReport>> {
    let alphas = midpoints(25, 0.0, 2.0);
    let betas = midpoints(20, 0.5, 3.0);
    let gammas = midpoints(20, 0.0, 3.0);
    let mut points = 0usize;
    let mut exclusive_bad = Vec::new();
    let mut hurst_bad = Vec::new();
    let mut gap_bad = Vec::new();
    let mut gap_points = 0usize;
    for &a in &alphas {
        for &b in &betas {
            for &g in &gammas {
                for zs in [false, true] {
                    if zs && b <= 1.0 {
                        continue;
                    }
                    points += 1;
                    let v = classify(&RegimeParams::new(a, b, g, zs)?)?;
                    let hits = theorem_predicates(a, b, g, zs);
                    let consistent = match hits.as_slice() {
                        [] => matches!(v.theorem, Theorem::UnknownGap | Theorem::Unsupported),
                        [t] => *t == v.theorem,
                        _ => false,
                    };
                    if !consistent {
                        exclusive_bad.push(json!({ "alpha": a, "beta": b, "gamma": g, "zero_sum": zs,
                            "predicates": format!("{hits:?}"), "verdict": format!("{:?}", v.theorem) }));
                    }
                    if let Some(h) = v.hurst {
                        if !(h > 0.0 && h < 1.0) {
                            hurst_bad.push(json!({ "alpha": a, "beta": b, "gamma": g, "zero_sum": zs,
                                "theorem": format!("{:?}", v.theorem), "H": h }));
                        }
                    }
                }
            }
        }
    }
    for &a in alphas.iter().filter(|&&a| a > 2.0 / 3.0) {
        for &b in betas.iter().filter(|&&b| b > 1.0f64.max(1.0 / a) && b < 1.5) {
            gap_points += 1;
            let c1 = ((2.0 * b - 1.0) / (2.0 - a)).min((3.0 - 2.0 * b) / a);
            let c2 = 1.0 / a + (b - 1.0) / (a * b - 1.0);
            // alpha = 1 has no stable bound, so the classifier reports no pair
            let v = classify(&RegimeParams::new(a, b, gammas[0], true)?)?;
            let reported_ok = match v.bounds {
                Some((x, y)) => x == c1 && y == c2,
                None => a == 1.0,
            };
            if !(c1 < c2) || !reported_ok {
                gap_bad.push(json!({ "alpha": a, "beta": b, "C1": c1, "C2": c2, "reported": v.bounds }));
            }
        }
    }
    let sample = |v: &[serde_json::Value]| v.iter().take(10).cloned().collect::<Vec<_>>();
    Ok(vec![
        TestReport::new("regimes_exclusive", exclusive_bad.len() as f64, Threshold::AtMost { limit: 0.0 })
            .with_sample(points)
            .with_details(json!({ "examples": sample(&exclusive_bad) })),
        TestReport::new("regimes_hurst_in_unit_interval", hurst_bad.len() as f64, Threshold::AtMost { limit: 0.0 })
            .with_sample(points)
            .with_details(json!({ "examples": sample(&hurst_bad) })),
        TestReport::new("regimes_gap_c1_below_c2", gap_bad.len() as f64, Threshold::AtMost { limit: 0.0 })
            .with_sample(gap_points)
            .with_details(json!({ "examples": sample(&gap_bad) })),
    ])
}
