//! Named verification suites. Each suite runs a fixed set of checks and
//! returns one [`TestReport`] per check; a suite passes when all do.

pub mod coupling;
pub mod limits;
pub mod moments;
pub mod prop1;
pub mod regimes;
pub mod t1;
pub mod t2;

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::registry::{Named, Registry};
use crate::rng::derive_seed;
use crate::stats::{TestReport, Tolerances};

/// Tolerances are multiplied by this factor in fast mode.
pub const FAST_WIDENING: f64 = 2.0;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteContext {
    pub seed: u64,
    /// Reduced sample sizes and widened tolerances.
    pub fast: bool,
    pub tolerances: Tolerances,
}

impl Default for SuiteContext {
    fn default() -> Self {
        Self {
            seed: 0,
            fast: false,
            tolerances: Tolerances::default(),
        }
    }
}

impl SuiteContext {
    pub fn new(seed: u64, fast: bool) -> Self {
        Self {
            seed,
            fast,
            tolerances: Tolerances::default(),
        }
    }

    /// `full`, or `fast` in fast mode.
    pub fn size(&self, full: usize, fast: usize) -> usize {
        if self.fast {
            fast
        } else {
            full
        }
    }

    /// A tolerance, widened in fast mode.
    pub fn widen(&self, tol: f64) -> f64 {
        if self.fast {
            tol * FAST_WIDENING
        } else {
            tol
        }
    }

    pub fn seed_for(&self, label: &str) -> u64 {
        derive_seed(self.seed, label)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub fast: bool,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub reports: Vec<TestReport>,
    pub elapsed_secs: f64,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &TestReport> {
        self.reports.iter().filter(|r| !r.pass)
    }
}

pub trait VerifySuite: Named + Send + Sync {
    fn description(&self) -> &'static str;
    fn run(&self, ctx: &SuiteContext) -> Result<Vec<TestReport>>;
}

macro_rules! suite {
    ($ty:ident, $name:literal, $desc:literal, $run:path) => {
        pub struct $ty;
        impl Named for $ty {
            fn name(&self) -> &'static str {
                $name
            }
        }
        impl VerifySuite for $ty {
            fn description(&self) -> &'static str {
                $desc
            }
            fn run(&self, ctx: &SuiteContext) -> Result<Vec<TestReport>> {
                $run(ctx)
            }
        }
    };
}

suite!(MomentsSuite, "moments", "tapered Pareto moments and sampler", moments::run);
suite!(Prop1Suite, "prop1", "variance constants of sum_j d_j^2", prop1::run);
suite!(T1Suite, "t1", "Gaussian limits under hard tapering", t1::run);
suite!(T2Suite, "t2", "stable limits under soft tapering", t2::run);
suite!(CouplingSuite, "coupling", "tapered/untapered coupling bounds", coupling::run);
suite!(LimitsSuite, "limits", "limit-process generators", limits::run);
suite!(RegimesSuite, "regimes", "regime classifier consistency", regimes::run);

pub fn suite_registry() -> Registry<dyn VerifySuite> {
    let mut r: Registry<dyn VerifySuite> = Registry::new("suite");
    r.register(Arc::new(MomentsSuite));
    r.register(Arc::new(Prop1Suite));
    r.register(Arc::new(T1Suite));
    r.register(Arc::new(T2Suite));
    r.register(Arc::new(CouplingSuite));
    r.register(Arc::new(LimitsSuite));
    r.register(Arc::new(RegimesSuite));
    r
}

pub fn run_suite(name: &str, ctx: &SuiteContext) -> Result<SuiteReport> {
    let suite = suite_registry().get(name)?;
    let start = Instant::now();
    let reports = suite.run(ctx)?;
    Ok(SuiteReport {
        suite: name.to_string(),
        fast: ctx.fast,
        seed: ctx.seed,
        tolerances: ctx.tolerances.clone(),
        reports,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}
