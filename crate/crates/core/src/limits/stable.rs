//! Stable laws with characteristic function
//! `exp(-t |u|^alpha (1 - i D sign u))`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::rng::Stream;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StableSpec {
    pub alpha: f64,
    /// Skewness coefficient in the characteristic function.
    pub d: f64,
    /// Time horizon (scale `t^(1/alpha)`).
    pub t: f64,
}

impl StableSpec {
    pub fn new(alpha: f64, d: f64, t: f64) -> Result<Self> {
        let s = Self { alpha, d, t };
        s.validate()?;
        Ok(s)
    }

    /// `D = -tan(pi alpha / 2)`: totally skewed toward `-inf`.
    pub fn left_skewed(alpha: f64, t: f64) -> Result<Self> {
        Self::new(alpha, -(PI * alpha / 2.0).tan(), t)
    }

    /// `D = tan(pi alpha / 2)`: totally skewed toward `+inf`, the law reached
    /// by sums of centered positive Pareto variables.
    pub fn right_skewed(alpha: f64, t: f64) -> Result<Self> {
        Self::new(alpha, (PI * alpha / 2.0).tan(), t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 2.0) || self.alpha == 1.0 {
            return Err(Error::Unsupported(format!(
                "stable laws need alpha in (0, 2) minus {{1}} (got {})",
                self.alpha
            )));
        }
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(param(format!("stable horizon must be positive (got {})", self.t)));
        }
        let skew = self.skewness();
        if !(skew.abs() <= 1.0 + 1e-12) {
            return Err(param(format!(
                "D = {} corresponds to skewness {skew} outside [-1, 1]",
                self.d
            )));
        }
        Ok(())
    }

    /// Skewness in the usual `[-1, 1]` parametrization: `D / tan(pi alpha / 2)`.
    pub fn skewness(&self) -> f64 {
        self.d / (PI * self.alpha / 2.0).tan()
    }

    pub fn with_t(&self, t: f64) -> Self {
        Self { t, ..*self }
    }
}

pub fn stable_cf(spec: &StableSpec, u: f64) -> Complex<f64> {
    if u == 0.0 {
        return Complex::new(1.0, 0.0);
    }
    let scale = spec.t * u.abs().powf(spec.alpha);
    let exponent = Complex::new(-scale, scale * spec.d * u.signum());
    exponent.exp()
}

/// Chambers-Mallows-Stuck draw from `spec` (one open uniform for the angle,
/// one exponential).
pub fn sample_stable(spec: &StableSpec, stream: &mut Stream) -> Result<f64> {
    spec.validate()?;
    Ok(cms(spec.alpha, spec.skewness().clamp(-1.0, 1.0), stream) * spec.t.powf(1.0 / spec.alpha))
}

/// Unit-scale draw; callers guarantee `alpha != 1`, `|skew| <= 1`.
pub(crate) fn cms(alpha: f64, skew: f64, stream: &mut Stream) -> f64 {
    let tan = (PI * alpha / 2.0).tan();
    let shift = (skew * tan).atan() / alpha;
    let scale = (1.0 + skew * skew * tan * tan).powf(1.0 / (2.0 * alpha));
    let v = PI * (stream.uniform_open() - 0.5);
    let w = stream.exp1();
    let av = alpha * (v + shift);
    let lead = av.sin() / v.cos().powf(1.0 / alpha);
    let tail = ((v - av).cos() / w).powf((1.0 - alpha) / alpha);
    debug_assert!(v.abs() < FRAC_PI_2);
    scale * lead * tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cf_basics() {
        let s = StableSpec::left_skewed(1.5, 1.0).unwrap();
        assert_eq!(stable_cf(&s, 0.0), Complex::new(1.0, 0.0));
        for &u in &[0.3, 1.0, 2.5] {
            let a = stable_cf(&s, u);
            let b = stable_cf(&s, -u);
            assert!((a - b.conj()).norm() < 1e-15);
        }
        assert!((stable_cf(&s, 1.0).norm() - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn conventions_are_mirror_images() {
        let p = StableSpec::left_skewed(1.5, 1.0).unwrap();
        let r = StableSpec::right_skewed(1.5, 1.0).unwrap();
        assert!((p.skewness() + 1.0).abs() < 1e-12);
        assert!((r.skewness() - 1.0).abs() < 1e-12);
        assert!(p.d > 0.0);
        assert!(StableSpec::new(1.0, 0.0, 1.0).is_err());
        assert!(StableSpec::new(1.5, 5.0, 1.0).is_err());
    }

    #[test]
    fn positive_support_below_one() {
        let s = StableSpec::right_skewed(0.7, 1.0).unwrap();
        let mut st = Stream::new(4, 0);
        for _ in 0..10_000 {
            assert!(sample_stable(&s, &mut st).unwrap() > 0.0);
        }
    }

    #[test]
    fn empirical_cf_matches() {
        for spec in [
            StableSpec::right_skewed(1.5, 1.0).unwrap(),
            StableSpec::left_skewed(1.5, 2.0).unwrap(),
            StableSpec::right_skewed(0.8, 1.0).unwrap(),
        ] {
            let mut st = Stream::new(17, 2);
            let xs: Vec<f64> = (0..50_000).map(|_| sample_stable(&spec, &mut st).unwrap()).collect();
            for &u in &[0.5, 1.0, 2.0] {
                let emp: Complex<f64> =
                    xs.iter().map(|&x| Complex::new(0.0, u * x).exp()).sum::<Complex<f64>>() / xs.len() as f64;
                assert!((emp - stable_cf(&spec, u)).norm() < 0.02, "{spec:?} u={u}");
            }
        }
    }
}
