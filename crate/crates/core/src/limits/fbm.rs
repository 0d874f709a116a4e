//! Fractional Brownian motion on a time grid.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Error, Result};
use crate::registry::{Named, Registry};
use crate::rng::Stream;

/// Largest grid the Cholesky sampler accepts.
pub const CHOLESKY_MAX_POINTS: usize = 2048;

/// Relative size of a negative circulant eigenvalue tolerated as rounding.
const EIGEN_TOL: f64 = 1e-9;

/// `(|s|^2H + |t|^2H - |t - s|^2H) / 2`.
pub fn fbm_covariance(s: f64, t: f64, hurst: f64) -> Result<f64> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(domain(format!("Hurst exponent must lie in (0, 1) (got {hurst})")));
    }
    if s < 0.0 || t < 0.0 {
        return Err(domain("fBm covariance is defined for s, t >= 0"));
    }
    let h2 = 2.0 * hurst;
    Ok(0.5 * (s.powf(h2) + t.powf(h2) - (t - s).abs().powf(h2)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FbmSpec {
    pub hurst: f64,
    /// Sorted time points in `[0, 1]`.
    pub grid: Vec<f64>,
}

impl FbmSpec {
    pub fn new(hurst: f64, grid: Vec<f64>) -> Result<Self> {
        let s = Self { hurst, grid };
        s.validate()?;
        Ok(s)
    }

    /// `k / points`, `k = 1..=points`.
    pub fn uniform(hurst: f64, points: usize) -> Result<Self> {
        Self::new(hurst, (1..=points).map(|k| k as f64 / points as f64).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return Err(domain(format!("Hurst exponent must lie in (0, 1) (got {})", self.hurst)));
        }
        if self.grid.is_empty() {
            return Err(param("fBm grid must not be empty"));
        }
        if self.grid.iter().any(|t| !(*t >= 0.0 && *t <= 1.0)) {
            return Err(param("fBm grid must lie in [0, 1]"));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(param("fBm grid must be strictly increasing"));
        }
        Ok(())
    }

    /// Step `h` when the positive grid points are `h, 2h, ..., Nh`.
    fn uniform_step(&self) -> Option<f64> {
        let pos: Vec<f64> = self.grid.iter().copied().filter(|&t| t > 0.0).collect();
        let h = *pos.first()?;
        let uniform = pos
            .iter()
            .enumerate()
            .all(|(i, &t)| (t - (i + 1) as f64 * h).abs() <= 1e-12 * t.max(1.0));
        uniform.then_some(h)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FbmPath {
    /// Value at each grid point.
    pub values: Vec<f64>,
    /// Sampler that produced the path.
    pub method: String,
    /// Set when circulant embedding failed and Cholesky took over.
    pub fallback: bool,
}

pub trait FbmSampler: Named + Send + Sync {
    fn sample(&self, spec: &FbmSpec, stream: &mut Stream) -> Result<FbmPath>;
}

/// Circulant embedding of fractional Gaussian noise (uniform grids).
pub struct DaviesHarte;
/// Cholesky factor of the full covariance matrix (any grid).
pub struct CholeskyFbm;

impl Named for DaviesHarte {
    fn name(&self) -> &'static str {
        "davies_harte"
    }
}
impl Named for CholeskyFbm {
    fn name(&self) -> &'static str {
        "cholesky"
    }
}

/// Autocovariance of unit-step fractional Gaussian noise.
fn fgn_autocov(k: usize, hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

impl DaviesHarte {
    /// Square roots of the circulant eigenvalues scaled by `1/sqrt(M)`, or
    /// `None` if the embedding is not nonnegative definite.
    fn spectrum(points: usize, hurst: f64) -> Option<Vec<f64>> {
        let m = 2 * points;
        let mut row: Vec<Complex<f64>> = (0..m)
            .map(|k| {
                let lag = if k <= points { k } else { m - k };
                Complex::new(fgn_autocov(lag, hurst), 0.0)
            })
            .collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut row);
        let max = row.iter().map(|c| c.re).fold(0.0f64, f64::max);
        if row.iter().any(|c| c.re < -EIGEN_TOL * max) {
            return None;
        }
        Some(row.iter().map(|c| (c.re.max(0.0) / m as f64).sqrt()).collect())
    }
}

impl FbmSampler for DaviesHarte {
    fn sample(&self, spec: &FbmSpec, stream: &mut Stream) -> Result<FbmPath> {
        spec.validate()?;
        let h = spec
            .uniform_step()
            .ok_or_else(|| Error::Unsupported("circulant embedding needs a uniform grid".into()))?;
        let points = spec.grid.iter().filter(|&&t| t > 0.0).count();
        let Some(root) = Self::spectrum(points, spec.hurst) else {
            return Err(Error::Numerical("negative circulant eigenvalue".into()));
        };
        let m = root.len();
        let mut w: Vec<Complex<f64>> = root
            .iter()
            .map(|&r| Complex::new(r * stream.normal(), r * stream.normal()))
            .collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut w);
        let step_scale = h.powf(spec.hurst);
        let mut acc = 0.0;
        let mut increments = w[..points].iter().map(|c| c.re * step_scale);
        let values = spec
            .grid
            .iter()
            .map(|&t| {
                if t > 0.0 {
                    acc += increments.next().expect("one increment per positive point");
                }
                acc
            })
            .collect();
        Ok(FbmPath {
            values,
            method: self.name().into(),
            fallback: false,
        })
    }
}

impl FbmSampler for CholeskyFbm {
    fn sample(&self, spec: &FbmSpec, stream: &mut Stream) -> Result<FbmPath> {
        spec.validate()?;
        let pos: Vec<f64> = spec.grid.iter().copied().filter(|&t| t > 0.0).collect();
        if pos.len() > CHOLESKY_MAX_POINTS {
            return Err(Error::Unsupported(format!(
                "Cholesky sampler is limited to {CHOLESKY_MAX_POINTS} points (got {})",
                pos.len()
            )));
        }
        let n = pos.len();
        let cov = DMatrix::from_fn(n, n, |i, j| {
            fbm_covariance(pos[i], pos[j], spec.hurst).expect("validated Hurst exponent")
        });
        let factor = match cov.clone().cholesky() {
            Some(c) => c,
            None => {
                let jitter = 1e-12 * cov.diagonal().max();
                (cov + DMatrix::identity(n, n) * jitter)
                    .cholesky()
                    .ok_or_else(|| Error::Numerical("fBm covariance is not positive definite".into()))?
            }
        };
        let z = DVector::from_fn(n, |_, _| stream.normal());
        let x = factor.l() * z;
        let mut it = x.iter();
        let values = spec
            .grid
            .iter()
            .map(|&t| if t > 0.0 { *it.next().expect("one value per positive point") } else { 0.0 })
            .collect();
        Ok(FbmPath {
            values,
            method: self.name().into(),
            fallback: false,
        })
    }
}

pub fn fbm_sampler_registry() -> Registry<dyn FbmSampler> {
    let mut r: Registry<dyn FbmSampler> = Registry::new("fBm sampler");
    r.register(Arc::new(DaviesHarte));
    r.register(Arc::new(CholeskyFbm));
    r
}

/// Circulant embedding on uniform grids, Cholesky otherwise or when the
/// embedding fails (flagged in the returned path).
pub fn sample_fbm(spec: &FbmSpec, stream: &mut Stream) -> Result<FbmPath> {
    spec.validate()?;
    if spec.uniform_step().is_some() {
        match DaviesHarte.sample(spec, stream) {
            Ok(p) => return Ok(p),
            Err(Error::Numerical(_)) => {
                let mut p = CholeskyFbm.sample(spec, stream)?;
                p.fallback = true;
                return Ok(p);
            }
            Err(e) => return Err(e),
        }
    }
    CholeskyFbm.sample(spec, stream)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covariance_values() {
        assert!((fbm_covariance(0.7, 0.7, 0.3).unwrap() - 0.7f64.powf(0.6)).abs() < 1e-15);
        for &h in &[0.2, 0.5, 0.9] {
            assert!((fbm_covariance(0.5, 1.0, h).unwrap() - 0.5).abs() < 1e-15);
        }
        let expect = 0.5 * (0.25f64.powf(1.6) + 1.0 - 0.75f64.powf(1.6));
        assert!((fbm_covariance(0.25, 1.0, 0.8).unwrap() - expect).abs() < 1e-15);
        assert!((expect - 0.2389).abs() < 1e-3);
        assert_eq!(fbm_covariance(0.3, 0.6, 0.4).unwrap(), fbm_covariance(0.6, 0.3, 0.4).unwrap());
        assert!(fbm_covariance(0.3, 0.6, 1.0).is_err());
    }

    #[test]
    fn embedding_is_nonnegative_for_all_h() {
        for &h in &[0.05, 0.3, 0.5, 0.8, 0.95] {
            assert!(DaviesHarte::spectrum(1000, h).is_some(), "H={h}");
        }
    }

    #[test]
    fn samplers_share_second_moments() {
        let spec = FbmSpec::uniform(0.8, 8).unwrap();
        let reps = 20_000;
        for sampler in fbm_sampler_registry().iter() {
            let mut st = Stream::new(8, 0);
            let mut var_last = 0.0;
            let mut cov_mid = 0.0;
            for _ in 0..reps {
                let p = sampler.sample(&spec, &mut st).unwrap();
                var_last += p.values[7] * p.values[7];
                cov_mid += p.values[3] * p.values[7];
            }
            var_last /= reps as f64;
            cov_mid /= reps as f64;
            // standard errors are about 0.01 here
            assert!((var_last - 1.0).abs() < 0.05, "{} var {var_last}", sampler.name());
            assert!((cov_mid - 0.5).abs() < 0.05, "{} cov {cov_mid}", sampler.name());
        }
    }

    #[test]
    fn nonuniform_grid_uses_cholesky() {
        let spec = FbmSpec::new(0.3, vec![0.0, 0.1, 0.15, 0.7]).unwrap();
        let mut st = Stream::new(1, 1);
        let p = sample_fbm(&spec, &mut st).unwrap();
        assert_eq!(p.method, "cholesky");
        assert_eq!(p.values[0], 0.0);
    }
}
