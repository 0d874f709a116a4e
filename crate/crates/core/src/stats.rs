//! Statistics that turn simulated ensembles into pass/fail reports.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::engine::{simulate_coupled, Normalization, PathEnsemble, SimulationPlan};
use crate::error::{domain, param, Error, Result};
use crate::limits::{fbm_covariance, stable_cf, StableSpec};

/// Every Monte Carlo threshold in one place; reports echo the values used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Significance level of Kolmogorov-Smirnov tests.
    pub ks_level: f64,
    /// Hill uses `k = N^hill_exponent` upper order statistics.
    pub hill_exponent: f64,
    /// Standard errors allowed in covariance and mean checks.
    pub se_multiplier: f64,
    /// Extra finite-`n` allowance in covariance checks.
    pub covariance_bias: f64,
    /// Largest characteristic-function gap of a stable sample.
    pub cf_distance: f64,
    /// Allowed error of a Hill estimate.
    pub hill_tolerance: f64,
    /// Allowed error of a fitted scaling exponent.
    pub exponent_tolerance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ks_level: 0.01,
            hill_exponent: 2.0 / 3.0,
            se_multiplier: 3.0,
            covariance_bias: 0.05,
            cf_distance: 0.02,
            hill_tolerance: 0.15,
            exponent_tolerance: 0.05,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Threshold {
    AtMost { limit: f64 },
    AtLeast { limit: f64 },
    Above { limit: f64 },
    Below { limit: f64 },
    Within { target: f64, tol: f64 },
    Range { lo: f64, hi: f64 },
}

impl Threshold {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Threshold::AtMost { limit } => v <= limit,
            Threshold::AtLeast { limit } => v >= limit,
            Threshold::Above { limit } => v > limit,
            Threshold::Below { limit } => v < limit,
            Threshold::Within { target, tol } => (v - target).abs() <= tol,
            Threshold::Range { lo, hi } => v >= lo && v <= hi,
        }
    }
}

impl std::fmt::Display for Threshold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Threshold::AtMost { limit } => write!(f, "<= {limit:.6}"),
            Threshold::AtLeast { limit } => write!(f, ">= {limit:.6}"),
            Threshold::Above { limit } => write!(f, "> {limit:.6}"),
            Threshold::Below { limit } => write!(f, "< {limit:.6}"),
            Threshold::Within { target, tol } => write!(f, "{target:.6} +/- {tol:.6}"),
            Threshold::Range { lo, hi } => write!(f, "in [{lo:.6}, {hi:.6}]"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub value: f64,
    pub threshold: Threshold,
    pub pass: bool,
    pub sample_size: usize,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl TestReport {
    pub fn new(name: impl Into<String>, value: f64, threshold: Threshold) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: threshold.holds(value),
            sample_size: 0,
            seed: None,
            details: serde_json::Value::Null,
        }
    }

    pub fn with_sample(mut self, n: usize) -> Self {
        self.sample_size = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = details;
        self
    }

    /// Report whose expected outcome is failure of the wrapped check.
    pub fn negated(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self.threshold = match self.threshold {
            Threshold::AtMost { limit } => Threshold::Above { limit },
            Threshold::AtLeast { limit } => Threshold::Below { limit },
            Threshold::Above { limit } => Threshold::AtMost { limit },
            Threshold::Below { limit } => Threshold::AtLeast { limit },
            t => t,
        };
        self.pass = !self.pass;
        self
    }

    pub fn summary(&self) -> String {
        format!(
            "{} {}: value {:.6} (expected {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.threshold
        )
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

/// Linear-interpolation quantile of an already sorted sample.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn interquartile_range(xs: &[f64]) -> f64 {
    let s = sorted(xs);
    quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25)
}

/// Least-squares fit of `log statistic = c + exponent log n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent_hat: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r_squared: f64,
    /// `(log n, log statistic)`.
    pub points: Vec<(f64, f64)>,
}

pub fn scaling_regression(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0) || !(*y > 0.0)) {
        return Err(domain(format!("scaling regression needs positive values (got ({x}, {y}))")));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mut distinct: Vec<f64> = logs.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::InsufficientSample(format!(
            "scaling regression needs at least 4 distinct abscissae (got {})",
            distinct.len()
        )));
    }
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(ScalingFit {
        exponent_hat: slope,
        intercept,
        stderr: (ssr / (k - 2.0) / sxx).sqrt(),
        r_squared: if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 },
        points: logs,
    })
}

/// `sup_x |F_N(x) - F(x)|`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let s = sorted(sample);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic Kolmogorov quantile `sqrt(-ln(level / 2) / 2)` with Stephens'
/// finite-sample adjustment.
pub fn ks_critical(n: usize, level: f64) -> f64 {
    let c = (-(level / 2.0).ln() / 2.0).sqrt();
    let rn = (n as f64).sqrt();
    c / (rn + 0.12 + 0.11 / rn)
}

pub fn ks_test(name: &str, sample: &[f64], cdf: impl Fn(f64) -> f64, level: f64) -> Result<TestReport> {
    if sample.len() < 100 {
        return Err(Error::InsufficientSample(format!(
            "KS test needs at least 100 values (got {})",
            sample.len()
        )));
    }
    let d = ks_statistic(sample, cdf);
    Ok(TestReport::new(name, d, Threshold::AtMost { limit: ks_critical(sample.len(), level) }).with_sample(sample.len()))
}

/// KS test of a (standardized) sample against `N(0, 1)`.
pub fn ks_normal(sample: &[f64], level: f64) -> Result<TestReport> {
    let normal = Normal::standard();
    ks_test("ks_normal", sample, |x| normal.cdf(x), level)
}

/// Two-sample KS test at the given level.
pub fn ks_two_sample(a: &[f64], b: &[f64], level: f64) -> Result<TestReport> {
    if a.len() < 100 || b.len() < 100 {
        return Err(Error::InsufficientSample("two-sample KS needs at least 100 values each".into()));
    }
    let (sa, sb) = (sorted(a), sorted(b));
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < sa.len() && j < sb.len() {
        let x = sa[i].min(sb[j]);
        while i < sa.len() && sa[i] <= x {
            i += 1;
        }
        while j < sb.len() && sb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let c = (-(level / 2.0).ln() / 2.0).sqrt();
    let crit = c * ((na + nb) / (na * nb)).sqrt();
    Ok(TestReport::new("ks_two_sample", d, Threshold::AtMost { limit: crit }).with_sample(a.len() + b.len()))
}

/// `round(N^exponent)`.
pub fn default_hill_k(n: usize, exponent: f64) -> usize {
    (n as f64).powf(exponent).round() as usize
}

/// Hill estimate of the tail index from the `k` largest positive values.
pub fn hill_tail_index(sample: &[f64], k: usize) -> Result<f64> {
    if k < 10 || k > sample.len() / 10 {
        return Err(param(format!(
            "Hill needs 10 <= k <= N/10 (k = {k}, N = {})",
            sample.len()
        )));
    }
    let mut pos: Vec<f64> = sample.iter().copied().filter(|&x| x > 0.0).collect();
    if pos.len() <= k {
        return Err(domain(format!("only {} positive values for k = {k}", pos.len())));
    }
    pos.sort_by(|a, b| b.total_cmp(a));
    let anchor = pos[k].ln();
    let s: f64 = pos[..k].iter().map(|x| x.ln() - anchor).sum();
    Ok(k as f64 / s)
}

pub fn empirical_cf(sample: &[f64], u: f64) -> Complex<f64> {
    let (re, im) = sample.iter().fold((0.0, 0.0), |(re, im), &x| {
        let (s, c) = (u * x).sin_cos();
        (re + c, im + s)
    });
    Complex::new(re, im) / sample.len() as f64
}

/// `max_u |empirical cf - stable cf|`. With `calibrate_at = Some(u0)` the
/// stable scale is first fitted so that the moduli agree at `u0`.
pub fn cf_distance(sample: &[f64], spec: &StableSpec, u_grid: &[f64], calibrate_at: Option<f64>) -> Result<f64> {
    spec.validate()?;
    let mut target = *spec;
    if let Some(u0) = calibrate_at {
        let m = empirical_cf(sample, u0).norm();
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::Numerical(format!("cannot calibrate scale: |cf({u0})| = {m}")));
        }
        target.t = -m.ln() / u0.abs().powf(spec.alpha);
    }
    Ok(u_grid
        .iter()
        .map(|&u| (empirical_cf(sample, u) - stable_cf(&target, u)).norm())
        .fold(0.0, f64::max))
}

/// Compares empirical covariances of grid columns with fBm covariances.
///
/// Each entry passes when `|c_hat - c| <= se_multiplier * SE + bias`, SE from
/// the spread of the centered products. The report value is the largest
/// ratio of error to allowance (pass iff at most 1).
pub fn covariance_match(
    values: &[Vec<f64>],
    grid: &[f64],
    hurst: f64,
    pairs: Option<&[(f64, f64)]>,
    tol: &Tolerances,
) -> Result<TestReport> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientSample("covariance check needs at least two paths".into()));
    }
    let index = |t: f64| {
        grid.iter()
            .position(|&s| (s - t).abs() < 1e-12)
            .ok_or_else(|| param(format!("t = {t} is not on the grid")))
    };
    let pairs: Vec<(usize, usize)> = match pairs {
        Some(ps) => ps.iter().map(|&(s, t)| Ok((index(s)?, index(t)?))).collect::<Result<_>>()?,
        None => (0..grid.len()).flat_map(|i| (i..grid.len()).map(move |j| (i, j))).collect(),
    };
    let cols: Vec<Vec<f64>> = (0..grid.len()).map(|g| values.iter().map(|r| r[g]).collect()).collect();
    let means: Vec<f64> = cols.iter().map(|c| mean(c)).collect();
    let mut worst = 0.0f64;
    let mut entries = Vec::new();
    for (i, j) in pairs {
        let prods: Vec<f64> = cols[i]
            .iter()
            .zip(&cols[j])
            .map(|(x, y)| (x - means[i]) * (y - means[j]))
            .collect();
        let c_hat = prods.iter().sum::<f64>() / (n as f64 - 1.0);
        let se = std_dev(&prods) / (n as f64).sqrt();
        let c = fbm_covariance(grid[i], grid[j], hurst)?;
        let allowance = tol.se_multiplier * se + tol.covariance_bias;
        let ratio = (c_hat - c).abs() / allowance;
        worst = worst.max(ratio);
        entries.push(serde_json::json!({
            "s": grid[i], "t": grid[j], "empirical": c_hat, "expected": c, "se": se, "allowance": allowance
        }));
    }
    Ok(TestReport::new("covariance_match", worst, Threshold::AtMost { limit: 1.0 })
        .with_sample(n)
        .with_details(serde_json::json!({ "hurst": hurst, "entries": entries })))
}

/// [`covariance_match`] on an ensemble; requires exact-variance normalization.
pub fn covariance_match_ensemble(
    ensemble: &PathEnsemble,
    hurst: f64,
    pairs: Option<&[(f64, f64)]>,
    tol: &Tolerances,
) -> Result<TestReport> {
    if ensemble.plan.normalization != Normalization::ExactStdDev {
        return Err(Error::Contract(
            "covariance check needs an ensemble normalized by the exact standard deviation".into(),
        ));
    }
    Ok(covariance_match(&ensemble.values, &ensemble.plan.t_grid, hurst, pairs, tol)?.with_seed(ensemble.plan.seed))
}

/// Self-similarity exponent from the interquartile range of the ensemble
/// across its time grid: `IQR(Z(t)) ~ t^H`.
pub fn quantile_scaling(ensemble: &PathEnsemble) -> Result<ScalingFit> {
    let points: Vec<(f64, f64)> = ensemble
        .plan
        .t_grid
        .iter()
        .enumerate()
        .map(|(g, &t)| (t, interquartile_range(&ensemble.column(g))))
        .collect();
    scaling_regression(&points)
}

/// Per-`n` coupling moments `E|V_n(1) - S_n(1)|^kappa / n^(H kappa)` and
/// their log-log fit against `n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CouplingDecay {
    pub kappa: f64,
    pub moments: Vec<(u64, f64)>,
    pub fit: ScalingFit,
}

pub fn coupling_decay(plans: &[SimulationPlan], kappa: f64) -> Result<CouplingDecay> {
    let first = plans
        .first()
        .ok_or_else(|| Error::InsufficientSample("coupling decay needs plans".into()))?;
    let alpha = first.alpha();
    let beta = first.filter.beta().unwrap_or(f64::INFINITY);
    if !(kappa > 1.0 / beta && kappa < alpha) {
        return Err(domain(format!(
            "kappa must lie in (1/beta, alpha) = ({}, {alpha}) (got {kappa})",
            1.0 / beta
        )));
    }
    let mut moments = Vec::with_capacity(plans.len());
    for plan in plans {
        let plan = plan.clone().with_normalization(Normalization::TheoreticalPower);
        let c = simulate_coupled(&plan)?;
        let v = c.pareto.last_column();
        let s = c.tapered.last_column();
        let m = v.iter().zip(&s).map(|(a, b)| (a - b).abs().powf(kappa)).sum::<f64>() / v.len() as f64;
        moments.push((plan.n, m));
    }
    let points: Vec<(f64, f64)> = moments.iter().map(|&(n, m)| (n as f64, m)).collect();
    Ok(CouplingDecay {
        kappa,
        moments,
        fit: scaling_regression(&points)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    #[test]
    fn regression_recovers_power_law() {
        let pts: Vec<(f64, f64)> = (4..10).map(|k| (2f64.powi(k), 3.0 * 2f64.powi(k).powf(0.8))).collect();
        let fit = scaling_regression(&pts).unwrap();
        assert!((fit.exponent_hat - 0.8).abs() < 1e-12);
        assert!(fit.stderr < 1e-10);
        assert!(scaling_regression(&pts[..3]).is_err());
        assert!(scaling_regression(&[(1.0, 0.0), (2.0, 1.0), (3.0, 1.0), (4.0, 1.0)]).is_err());
    }

    #[test]
    fn ks_null_and_alternative() {
        let mut st = Stream::new(2, 0);
        let z: Vec<f64> = (0..10_000).map(|_| st.normal()).collect();
        assert!(ks_normal(&z, 0.01).unwrap().pass);
        let e: Vec<f64> = (0..10_000).map(|_| st.exp1() - 1.0).collect();
        assert!(!ks_normal(&e, 0.01).unwrap().pass);
        assert!(ks_normal(&z[..50], 0.01).is_err());
    }

    #[test]
    fn ks_critical_value() {
        // sqrt(-ln(0.005) / 2) = 1.6276
        let c = ks_critical(1_000_000, 0.01) * 1000.0;
        assert!((c - 1.6276).abs() < 1e-3);
    }

    #[test]
    fn two_sample_ks() {
        let mut st = Stream::new(9, 0);
        let a: Vec<f64> = (0..5000).map(|_| st.normal()).collect();
        let b: Vec<f64> = (0..5000).map(|_| st.normal()).collect();
        let c: Vec<f64> = (0..5000).map(|_| st.normal() + 0.3).collect();
        assert!(ks_two_sample(&a, &b, 0.01).unwrap().pass);
        assert!(!ks_two_sample(&a, &c, 0.01).unwrap().pass);
    }

    #[test]
    fn hill_on_pareto() {
        let mut st = Stream::new(5, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| (1.0 - st.uniform_open()).powf(-1.0 / 1.5)).collect();
        let a = hill_tail_index(&xs, 1000).unwrap();
        assert!((a - 1.5).abs() < 0.1, "{a}");
        assert!(hill_tail_index(&xs, 5).is_err());
        assert!(hill_tail_index(&xs[..1000], 200).is_err());
    }

    #[test]
    fn cf_distance_controls() {
        let spec = StableSpec::right_skewed(1.5, 1.0).unwrap();
        assert_eq!(cf_distance(&[1.0, 2.0], &spec, &[0.0], None).unwrap(), 0.0);
        let mut st = Stream::new(1, 0);
        let g: Vec<f64> = (0..20_000).map(|_| st.normal()).collect();
        assert!(cf_distance(&g, &spec, &[0.5, 1.0, 2.0], None).unwrap() > 0.05);
    }

    #[test]
    fn threshold_semantics() {
        assert!(Threshold::Within { target: 1.0, tol: 0.1 }.holds(1.05));
        assert!(!Threshold::Below { limit: 0.0 }.holds(0.0));
        assert!(Threshold::Range { lo: 0.9, hi: 1.1 }.holds(1.1));
        let r = TestReport::new("x", 2.0, Threshold::AtMost { limit: 1.0 });
        assert!(!r.pass);
        assert!(r.negated("not x").pass);
    }
}
