//! Linear fractional stable motion
//! `Y(t) = int_{-inf}^{t} ((t - s)_+^(1-beta) - (-s)_+^(1-beta)) dL(s)`
//! by a Riemann sum over stable increments.

use serde::{Deserialize, Serialize};

use super::stable::cms;
use crate::error::{domain, param, Result};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};
use crate::rng::Stream;

/// Default width of the uniform cells on `[-1, t_max]`.
pub const DEFAULT_STEP: f64 = 1.0 / 512.0;
/// Relative width of the geometric cells beyond `s = -1`.
pub const DEFAULT_GEOMETRIC_RATIO: f64 = 0.05;
/// Share of the kernel's alpha-norm allowed below the cutoff `-M`.
pub const DEFAULT_TAIL_SHARE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LfsmSpec {
    pub alpha: f64,
    pub beta: f64,
    /// Skewness of the driving noise in `[-1, 1]`.
    pub skew: f64,
    /// Uniform cell width on `[-1, t_max]`.
    pub step: f64,
    /// Cells below `-1` have width `ratio * |s|`.
    pub geometric_ratio: f64,
    /// Lower integration limit `-M`; `None` picks `M` from the tail share.
    pub cutoff: Option<f64>,
}

impl LfsmSpec {
    /// Right-skewed driving noise with default discretization.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let s = Self {
            alpha,
            beta,
            skew: 1.0,
            step: DEFAULT_STEP,
            geometric_ratio: DEFAULT_GEOMETRIC_RATIO,
            cutoff: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn hurst(&self) -> f64 {
        1.0 / self.alpha + 1.0 - self.beta
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.alpha;
        if !(a > 0.0 && a < 2.0) || a == 1.0 {
            return Err(domain(format!("alpha must lie in (0, 2) minus {{1}} (got {a})")));
        }
        if !(self.beta > 1.0 / a && self.beta < 1.0 + 1.0 / a) {
            return Err(domain(format!(
                "kernel is not alpha-integrable: need 1/alpha < beta < 1 + 1/alpha (got beta = {})",
                self.beta
            )));
        }
        if !(self.skew.abs() <= 1.0) {
            return Err(param("skew must lie in [-1, 1]"));
        }
        if !(self.step > 0.0 && self.step <= 0.5) {
            return Err(param(format!("step must lie in (0, 1/2] (got {})", self.step)));
        }
        if !(self.geometric_ratio > 0.0 && self.geometric_ratio < 1.0) {
            return Err(param("geometric ratio must lie in (0, 1)"));
        }
        if let Some(m) = self.cutoff {
            if !(m >= 1.0) {
                return Err(param("cutoff M must be at least 1"));
            }
        }
        Ok(())
    }

    fn kernel(&self, t: f64, s: f64) -> f64 {
        let e = 1.0 - self.beta;
        if s < 0.0 {
            // (t - s)^e - (-s)^e without cancellation for s far in the past
            let x = -s;
            return x.powf(e) * (e * (t / x).ln_1p()).exp_m1();
        }
        if t > s {
            (t - s).powf(e)
        } else {
            0.0
        }
    }

    /// `int_{-inf}^{t} |kernel(t, s)|^alpha ds`.
    pub fn alpha_norm(&self, t: f64) -> Result<f64> {
        let a = self.alpha;
        let e = 1.0 - self.beta;
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-8,
            ..QuadOptions::default()
        };
        let recent = t.powf(a * e + 1.0) / (a * e + 1.0);
        // s = -x; near x = 0 substitute x = y^2 to tame (-s)^(1-beta)
        let near = integrate(
            |y: f64| {
                let x = y * y;
                self.kernel(t, -x).abs().powf(a) * 2.0 * y
            },
            0.0,
            1.0,
            opts,
        )?
        .value;
        let far = integrate_to_infinity(
            |u: f64| {
                let x = u.exp();
                self.kernel(t, -x).abs().powf(a) * x
            },
            0.0,
            opts,
        )?
        .value;
        Ok(recent + near + far)
    }

    /// `M` such that the alpha-norm of the kernel below `-M` is at most
    /// `tail_share` of the total, from `|kernel| ~ |1 - beta| t |s|^-beta`.
    pub fn cutoff_for(&self, t: f64, tail_share: f64) -> Result<f64> {
        if let Some(m) = self.cutoff {
            return Ok(m);
        }
        let a = self.alpha;
        let c = ((1.0 - self.beta).abs() * t).powf(a);
        let decay = a * self.beta - 1.0;
        let target = tail_share * self.alpha_norm(t)?;
        // c M^(-decay) / decay = target
        Ok((c / (decay * target)).powf(1.0 / decay).max(1.0))
    }

    /// Cell midpoints and widths in draw order: `[0, t_max]` first, then
    /// `[-1, 0]` (both width `step`), then geometric cells down to `-M`.
    pub fn cells(&self, t_max: f64) -> Result<Vec<(f64, f64)>> {
        let h = self.step;
        let m = self.cutoff_for(t_max, DEFAULT_TAIL_SHARE)?;
        let mut cells = Vec::new();
        let positive = (t_max / h - 1e-9).ceil().max(1.0) as usize;
        for i in 0..positive {
            cells.push(((i as f64 + 0.5) * h, h));
        }
        let negative = (1.0 / h).round() as usize;
        for i in 0..negative {
            cells.push((-(i as f64 + 0.5) * h, h));
        }
        let mut edge = -(negative as f64) * h;
        while -edge < m {
            let width = self.geometric_ratio * -edge;
            cells.push((edge - 0.5 * width, width));
            edge -= width;
        }
        Ok(cells)
    }
}

/// One path of `Y` at the grid points (each in `(0, 1]`). At `beta = 1` the
/// kernel is the indicator of `[0, t)` and the path is the running sum of the
/// first stable increments.
pub fn sample_lfsm(spec: &LfsmSpec, grid: &[f64], stream: &mut Stream) -> Result<Vec<f64>> {
    spec.validate()?;
    if grid.is_empty() || grid.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(param("LFSM grid must be nonempty within (0, 1]"));
    }
    let t_max = grid.iter().copied().fold(0.0, f64::max);
    let a = spec.alpha;
    if spec.beta == 1.0 {
        let h = spec.step;
        let positive = (t_max / h - 1e-9).ceil().max(1.0) as usize;
        let steps: Vec<f64> = (0..positive).map(|_| cms(a, spec.skew, stream) * h.powf(1.0 / a)).collect();
        return Ok(grid
            .iter()
            .map(|&t| {
                let k = ((t / h) + 1e-9).floor() as usize;
                steps[..k.min(positive)].iter().sum()
            })
            .collect());
    }
    let cells = spec.cells(t_max)?;
    let mut out = vec![0.0; grid.len()];
    for &(mid, width) in &cells {
        let dl = cms(a, spec.skew, stream) * width.powf(1.0 / a);
        for (o, &t) in out.iter_mut().zip(grid) {
            if mid < t {
                *o += spec.kernel(t, mid) * dl;
            }
        }
    }
    Ok(out)
}
