//! Partial sums of linear processes driven by tapered-Pareto innovations.
//!
//! The crate covers four layers:
//!
//! * [`distributions`] and [`filters`]: the innovation law (Pareto with an
//!   exponential taper beyond level `b`) and the filter families `{a_j}`.
//! * [`engine`]: exact finite-`n` quantities (d-coefficients, variances,
//!   Lyapunov ratios, asymptotic variance constants) and Monte Carlo
//!   simulation of `S_n(t) = sum_{k <= [nt]} X_k`.
//! * [`regimes`] and [`limits`]: classification of `(alpha, beta, gamma)` into
//!   hard/soft tapering cases and generators for the limit laws
//!   (fractional Brownian motion, stable Levy motion, linear fractional
//!   stable motion).
//! * [`stats`] and [`suites`]: statistical checks that turn ensembles into
//!   pass/fail reports, grouped into named verification suites.
//!
//! Interchangeable algorithms (partial-sum kernels, fBm samplers,
//! verification suites) are trait objects held in a name-keyed
//! [`registry::Registry`] and selected at runtime.

pub mod distributions;
pub mod engine;
pub mod error;
pub mod filters;
pub mod limits;
pub mod quad;
pub mod regimes;
pub mod registry;
pub mod rng;
pub mod special;
pub mod stats;
pub mod suites;

pub use error::{Error, Result};

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
