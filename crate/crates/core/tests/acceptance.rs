//! One line per acceptance criterion; every criterion runs at full size with
//! seed 0 and default tolerances.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use taperlin_core::stats::TestReport;
use taperlin_core::suites::{coupling, limits, moments, prop1, regimes, t1, t2, SuiteContext};
use taperlin_core::Result;

/// Criteria run one at a time so that each wall-clock budget is measured alone.
static SERIAL: Mutex<()> = Mutex::new(());

fn criterion(id: u32, title: &str, budget: Duration, run: impl FnOnce(&SuiteContext) -> Result<Vec<TestReport>>) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let ctx = SuiteContext::new(0, false);
    let start = Instant::now();
    let reports = run(&ctx).expect("criterion checks run");
    let elapsed = start.elapsed();
    let failed: Vec<&TestReport> = reports.iter().filter(|r| !r.pass).collect();
    let in_time = elapsed <= budget;
    let pass = failed.is_empty() && in_time;
    let mut line = format!(
        "CRITERION {id:02} {} {title}: {}/{} checks pass, {:.1}s (budget {}s)",
        if pass { "PASS" } else { "FAIL" },
        reports.len() - failed.len(),
        reports.len(),
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    if !failed.is_empty() {
        let names: Vec<String> = failed.iter().map(|r| r.summary()).collect();
        line.push_str(&format!("; failing: {}", names.join("; ")));
    }
    let _ = writeln!(std::io::stderr(), "{line}");
    assert!(pass, "{line}");
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

#[test]
fn crit_01_moment_identities() {
    criterion(1, "moment identities", secs(10), moments::identities);
}

#[test]
fn crit_02_sampler_ks() {
    criterion(2, "sampler KS", secs(30), moments::sampler_ks);
}

#[test]
fn crit_03_variance_constants() {
    criterion(3, "variance growth constants", secs(60), prop1::variance_constants);
}

#[test]
fn crit_04_gaussian_desk_scale() {
    criterion(4, "Gaussian limit at desk scale", secs(3 * 300), |ctx| {
        let mut out = Vec::new();
        for case in t1::reference_cases() {
            out.extend(t1::desk_scale(ctx, &case)?);
        }
        Ok(out)
    });
}

#[test]
fn crit_05_hurst_scaling() {
    criterion(5, "Hurst scaling", secs(300), t1::hurst_scaling);
}

#[test]
fn crit_06_lyapunov_decay() {
    criterion(6, "Lyapunov decay", secs(30), t1::lyapunov_decay);
}

#[test]
fn crit_07_stable_desk_scale() {
    criterion(7, "stable limit at desk scale", secs(2 * 300), |ctx| {
        let mut out = Vec::new();
        for case in t2::reference_cases() {
            out.extend(t2::desk_scale(ctx, &case)?);
        }
        Ok(out)
    });
}

#[test]
fn crit_08_coupling() {
    criterion(8, "coupling bound and decay", secs(180), |ctx| {
        Ok(vec![coupling::bound(ctx)?, coupling::decay(ctx)?])
    });
}

#[test]
fn crit_09_limit_generators() {
    criterion(9, "limit-process generators", secs(120), limits::run);
}

#[test]
fn crit_10_regime_table() {
    criterion(10, "regime classifier table", secs(5), regimes::table);
}
