use proptest::prelude::*;

use taperlin_core::distributions::TaperedParetoParams;
use taperlin_core::engine::{floor_nt, kernel_registry, KernelSetup};
use taperlin_core::filters::FilterSpec;
use taperlin_core::regimes::{classify, RegimeParams, Theorem};
use taperlin_core::rng::Stream;
use taperlin_core::Error;

fn filter_strategy() -> impl Strategy<Value = FilterSpec> {
    prop_oneof![
        (0.55f64..3.0).prop_map(|b| FilterSpec::power_law(b, 1.0).unwrap()),
        (1.05f64..3.0).prop_map(|b| FilterSpec::zero_sum(b).unwrap()),
        prop::collection::vec(-2.0f64..2.0, 1..12).prop_map(|c| FilterSpec::explicit(c).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cdf_is_monotone_and_bounded(alpha in 0.05f64..1.99, b in 1.01f64..1e6, x in 0.5f64..1e7, dx in 0.0f64..1e3) {
        let p = TaperedParetoParams::new(alpha, b).unwrap();
        let (f0, f1) = (p.cdf(x), p.cdf(x + dx));
        prop_assert!((0.0..=1.0).contains(&f0));
        prop_assert!(f1 >= f0);
        prop_assert!((p.cdf(x) + p.sf(x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_inverts_cdf(alpha in 0.05f64..1.99, b in 1.01f64..1e6, u in 1e-9f64..0.999_999) {
        let p = TaperedParetoParams::new(alpha, b).unwrap();
        let x = p.quantile(u).unwrap();
        prop_assert!(x >= 1.0);
        prop_assert!((p.cdf(x) - u).abs() < 1e-9, "u={} x={} cdf={}", u, x, p.cdf(x));
    }

    #[test]
    fn samples_respect_support(alpha in 0.05f64..1.99, b in 1.01f64..1e4, seed in any::<u64>()) {
        let p = TaperedParetoParams::new(alpha, b).unwrap();
        let xs = p.sample_n(&mut Stream::new(seed, 0), 64);
        prop_assert!(xs.iter().all(|&x| x >= 1.0 && x.is_finite()));
    }

    #[test]
    fn truncation_horizon_grows_as_tol_shrinks(f in filter_strategy(), tol in 1e-8f64..1e-1, shrink in 1.0f64..1e3) {
        match (f.truncation_horizon(2.0, tol), f.truncation_horizon(2.0, tol / shrink)) {
            (Ok(loose), Ok(tight)) => {
                prop_assert!(tight >= loose);
                prop_assert!(loose.is_power_of_two());
            }
            // slowly decaying filters may need more than the largest horizon
            (_, Err(Error::Numerical(_))) => {}
            (l, t) => prop_assert!(false, "{:?} {:?}", l, t),
        }
    }

    #[test]
    fn classification_is_total(alpha in 0.01f64..1.99, beta in 0.51f64..4.0, gamma in 0.0f64..4.0, zs in any::<bool>()) {
        let zero_sum = zs && beta > 1.0;
        let p = RegimeParams::new(alpha, beta, gamma, zero_sum).unwrap();
        let v = classify(&p).unwrap();
        prop_assert!(!(v.theorem.is_gaussian() && v.theorem.is_stable()));
        match v.theorem {
            Theorem::UnknownGap | Theorem::Unsupported => prop_assert!(v.hurst.is_none() && v.note.is_some()),
            _ => prop_assert!(v.hurst.map_or(false, |h| h > 0.0)),
        }
        // re-classifying is deterministic
        prop_assert_eq!(classify(&p).unwrap(), v);
    }

    #[test]
    fn kernels_agree(
        f in filter_strategy(),
        n in 4u64..160,
        horizon_log in 2u32..8,
        seed in any::<u64>(),
        ts in prop::collection::vec(0.01f64..1.0, 1..4),
    ) {
        let horizon = 1u64 << horizon_log;
        let mut grid: Vec<f64> = ts;
        grid.push(1.0);
        let setup = KernelSetup {
            coeffs: f.coefficients(horizon as usize + 1),
            partial: f.partial_sums(horizon as usize + 1),
            n,
            horizon,
            grid_m: grid.iter().map(|&t| floor_nt(n, t)).collect(),
        };
        let mut st = Stream::new(seed, 0);
        let xi: Vec<f64> = (0..setup.innovation_count()).map(|_| st.normal()).collect();
        let mut results = Vec::new();
        for k in kernel_registry().iter() {
            let mut out = vec![0.0; grid.len()];
            k.prepare(&setup).unwrap().evaluate(&xi, &mut out);
            results.push(out);
        }
        for r in &results[1..] {
            for (x, y) in r.iter().zip(&results[0]) {
                prop_assert!((x - y).abs() <= 1e-9 * y.abs().max(1.0), "{} vs {}", x, y);
            }
        }
    }
}
