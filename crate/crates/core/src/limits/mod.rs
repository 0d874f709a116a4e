//! Limit laws of the normalized partial sums: fractional Brownian motion,
//! totally skewed stable Levy motion and linear fractional stable motion.

pub mod fbm;
pub mod lfsm;
pub mod stable;

pub use fbm::{fbm_covariance, fbm_sampler_registry, sample_fbm, FbmPath, FbmSampler, FbmSpec};
pub use lfsm::{sample_lfsm, LfsmSpec};
pub use stable::{sample_stable, stable_cf, StableSpec};
