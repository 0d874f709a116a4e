use taperlin_core::distributions::TaperedParetoParams;
use taperlin_core::engine::{
    default_truncation, simulate, sum_d_squared, variance_exact, DCoefficients, Normalization, SimulationPlan,
};
use taperlin_core::filters::FilterSpec;
use taperlin_core::regimes::{classify, RegimeParams, Theorem};
use taperlin_core::stats;
use taperlin_core::suites::{run_suite, suite_registry, SuiteContext};

#[test]
fn identity_filter_d_coefficients_are_indicators() {
    let d = DCoefficients::compute(&FilterSpec::identity(), 10, 0.5, 4).unwrap();
    for j in -3..=10 {
        let expect = if (1..=5).contains(&j) { 1.0 } else { 0.0 };
        assert_eq!(d.get(j), expect, "j={j}");
    }
    assert_eq!(sum_d_squared(&FilterSpec::identity(), 10, 4).unwrap(), 10.0);
}

#[test]
fn explicit_filter_d_coefficients() {
    // X_k = xi_k + 2 xi_{k-1}; S_3 = xi_1 + 3 xi_2 + 3 xi_3 + 2 xi_0
    let f = FilterSpec::explicit(vec![1.0, 2.0]).unwrap();
    let d = DCoefficients::compute(&f, 3, 1.0, 1).unwrap();
    assert_eq!([d.get(0), d.get(1), d.get(2), d.get(3)], [2.0, 3.0, 3.0, 1.0]);
}

#[test]
fn raw_ensemble_variance_matches_exact_variance() {
    let plan = SimulationPlan::new(1.5, 0.3, FilterSpec::power_law(0.75, 1.0).unwrap(), 256)
        .unwrap()
        .with_replicates(4000)
        .with_seed(5)
        .with_normalization(Normalization::Raw);
    let ens = simulate(&plan).unwrap();
    let v = stats::variance(&ens.last_column());
    let exact = variance_exact(&plan).unwrap();
    // relative standard error of a sample variance with light-tailed
    // innovations is about sqrt(2 / 4000) = 0.022
    assert!((v / exact - 1.0).abs() < 0.1, "{v} vs {exact}");
    assert_eq!(plan.truncation_j, default_truncation(&plan.filter, 256));
    assert_eq!(plan.truncation_j, 4096);
}

#[test]
fn innovation_mean_matches_moment() {
    let p = TaperedParetoParams::new(1.2, 50.0).unwrap();
    let mut st = taperlin_core::rng::Stream::new(2, 0);
    let xs = p.sample_n(&mut st, 200_000);
    let m = stats::mean(&xs);
    let sd = p.centered_variance().sqrt() / (xs.len() as f64).sqrt();
    assert!((m - p.mean()).abs() < 5.0 * sd, "{m} vs {}", p.mean());
    assert_eq!(p.moment(1.0).unwrap(), p.mean());
}

#[test]
fn reference_cases_classify_as_expected() {
    let cases = [
        (1.5, 0.75, 0.2, false, Theorem::T1i, 0.8),
        (1.5, 1.5, 0.5, false, Theorem::T1ii, 0.625),
        (1.5, 1.25, 0.15, true, Theorem::T1iii, 0.2875),
        (1.5, 0.8, 1.0, false, Theorem::T2i, 1.0 / 1.5 + 0.2),
        (1.5, 2.0, 1.0, false, Theorem::T2ii, 1.0 / 1.5),
    ];
    for (a, b, g, zs, th, h) in cases {
        let v = classify(&RegimeParams::new(a, b, g, zs).unwrap()).unwrap();
        assert_eq!(v.theorem, th, "{a} {b} {g}");
        assert!((v.hurst.unwrap() - h).abs() < 1e-12, "{a} {b} {g}: {:?}", v.hurst);
    }
}

#[test]
fn registry_lists_every_suite() {
    let names = suite_registry().names();
    for s in ["moments", "prop1", "t1", "t2", "coupling", "limits", "regimes"] {
        assert!(names.contains(&s), "{s}");
    }
    assert!(run_suite("nope", &SuiteContext::new(0, true)).is_err());
}

#[test]
fn regimes_suite_report_is_reproducible() {
    let ctx = SuiteContext::new(3, true);
    let a = run_suite("regimes", &ctx).unwrap();
    let b = run_suite("regimes", &ctx).unwrap();
    assert_eq!(a.reports.len(), b.reports.len());
    for (x, y) in a.reports.iter().zip(&b.reports) {
        assert_eq!(x.name, y.name);
        assert_eq!(x.value, y.value);
        assert_eq!(x.pass, y.pass);
    }
}
