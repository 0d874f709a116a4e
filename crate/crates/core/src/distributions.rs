//! Pareto and tapered-Pareto laws, their moments, and the coupled
//! (tapered, untapered) innovation pair.

use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Error, Result};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};
use crate::rng::Stream;
use crate::special::upper_gamma_scaled;

/// Pareto law with tail exponent `alpha`, cut by an exponential taper of unit
/// rate beyond level `b`:
///
/// ```text
/// f_b(x) = 0                          x < 1
///        = alpha x^(-alpha-1)         1 <= x <= b
///        = b^(-alpha) exp(b - x)      x > b
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTaperedPareto")]
pub struct TaperedParetoParams {
    alpha: f64,
    b: f64,
}

#[derive(Deserialize)]
struct RawTaperedPareto {
    alpha: f64,
    b: f64,
}

impl TryFrom<RawTaperedPareto> for TaperedParetoParams {
    type Error = Error;
    fn try_from(raw: RawTaperedPareto) -> Result<Self> {
        Self::new(raw.alpha, raw.b)
    }
}

impl TaperedParetoParams {
    pub fn new(alpha: f64, b: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(param(format!("alpha must be positive (got {alpha})")));
        }
        if !(b > 1.0) || !b.is_finite() {
            return Err(param(format!("taper level b must exceed 1 (got {b})")));
        }
        Ok(Self { alpha, b })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `P(X > b) = b^-alpha`.
    pub fn taper_mass(&self) -> f64 {
        self.b.powf(-self.alpha)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 1.0 {
            0.0
        } else if x <= self.b {
            self.alpha * x.powf(-self.alpha - 1.0)
        } else {
            self.taper_mass() * (self.b - x).exp()
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 1.0 {
            0.0
        } else if x <= self.b {
            -(-self.alpha * x.ln()).exp_m1()
        } else {
            1.0 - self.taper_mass() * (self.b - x).exp()
        }
    }

    /// Survival function `1 - F(x)`, accurate far in the tail.
    pub fn sf(&self, x: f64) -> f64 {
        if x < 1.0 {
            1.0
        } else if x <= self.b {
            x.powf(-self.alpha)
        } else {
            self.taper_mass() * (self.b - x).exp()
        }
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(domain(format!("quantile level must lie in (0, 1) (got {u})")));
        }
        let corner = 1.0 - self.taper_mass();
        if u <= corner {
            Ok((1.0 - u).powf(-1.0 / self.alpha))
        } else {
            Ok(self.b - (1.0 - u).ln() - self.alpha * self.b.ln())
        }
    }

    /// One draw by inversion of an open-interval uniform.
    pub fn sample(&self, stream: &mut Stream) -> f64 {
        let u = stream.uniform_open();
        self.quantile(u).expect("open uniform is a valid level")
    }

    pub fn sample_n(&self, stream: &mut Stream, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.sample(stream)).collect()
    }

    /// `mu_r(b) = E X^r`: elementary power-law part plus
    /// `b^-alpha e^b Gamma(r + 1, b)` for the exponential tail.
    pub fn moment(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(domain(format!("moment order must be nonnegative (got {r})")));
        }
        let ln_b = self.b.ln();
        let x = (r - self.alpha) * ln_b;
        let body = if x == 0.0 {
            self.alpha * ln_b
        } else {
            self.alpha * ln_b * x.exp_m1() / x
        };
        let tail = self.taper_mass() * upper_gamma_scaled(r + 1.0, self.b)?;
        Ok(body + tail)
    }

    /// Same quantity as [`Self::moment`] by adaptive quadrature of the density.
    pub fn moment_by_quadrature(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(domain(format!("moment order must be nonnegative (got {r})")));
        }
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-13,
            ..QuadOptions::default()
        };
        let alpha = self.alpha;
        // x = e^s on [1, b]
        let body = integrate(|s| alpha * ((r - alpha) * s).exp(), 0.0, self.b.ln(), opts)?.value;
        let b = self.b;
        let tail = integrate_to_infinity(|y| (b + y).powf(r) * (-y).exp(), 0.0, opts)?.value;
        Ok(body + self.taper_mass() * tail)
    }

    /// Leading-order behaviour of `mu_r(b)` as `b` grows.
    pub fn moment_asymptotic(&self, r: f64) -> f64 {
        let a = self.alpha;
        if r > a {
            r / (r - a) * self.b.powf(r - a)
        } else if r < a {
            a / (a - r)
        } else {
            a * self.b.ln()
        }
    }

    pub fn mean(&self) -> f64 {
        self.moment(1.0).expect("first moment exists")
    }

    /// `Var X = mu_2 - mu_1^2`.
    pub fn centered_variance(&self) -> f64 {
        let m1 = self.mean();
        let m2 = self.moment(2.0).expect("second moment exists");
        m2 - m1 * m1
    }

    /// `E|X - mu_1|^p` by quadrature, split at the kink `x = mu_1`.
    pub fn central_abs_moment(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(domain(format!("absolute moment order must be positive (got {p})")));
        }
        let mu = self.mean();
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-11,
            ..QuadOptions::default()
        };
        let alpha = self.alpha;
        let body_fn = |s: f64| (s.exp() - mu).abs().powf(p) * alpha * (-alpha * s).exp();
        let ln_b = self.b.ln();
        let mut body = 0.0;
        if mu > 1.0 && mu < self.b {
            body += integrate(body_fn, 0.0, mu.ln(), opts)?.value;
            body += integrate(body_fn, mu.ln(), ln_b, opts)?.value;
        } else {
            body += integrate(body_fn, 0.0, ln_b, opts)?.value;
        }
        let b = self.b;
        let tail_fn = |y: f64| (b + y - mu).abs().powf(p) * (-y).exp();
        let kink = mu - b;
        let tail = if kink > 0.0 {
            integrate(tail_fn, 0.0, kink, opts)?.value + integrate_to_infinity(tail_fn, kink, opts)?.value
        } else {
            integrate_to_infinity(tail_fn, 0.0, opts)?.value
        };
        Ok(body + self.taper_mass() * tail)
    }
}

/// Standard Pareto law on `[1, inf)` with tail exponent `alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPareto")]
pub struct ParetoParams {
    alpha: f64,
}

#[derive(Deserialize)]
struct RawPareto {
    alpha: f64,
}

impl TryFrom<RawPareto> for ParetoParams {
    type Error = Error;
    fn try_from(raw: RawPareto) -> Result<Self> {
        Self::new(raw.alpha)
    }
}

impl ParetoParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(param(format!("alpha must be positive (got {alpha})")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 1.0 {
            0.0
        } else {
            -(-self.alpha * x.ln()).exp_m1()
        }
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(domain(format!("quantile level must lie in (0, 1) (got {u})")));
        }
        Ok((1.0 - u).powf(-1.0 / self.alpha))
    }

    pub fn sample(&self, stream: &mut Stream) -> f64 {
        (1.0 - stream.uniform_open()).powf(-1.0 / self.alpha)
    }

    /// `alpha / (alpha - 1)` for `alpha > 1`.
    pub fn mean(&self) -> Result<f64> {
        if self.alpha > 1.0 {
            Ok(self.alpha / (self.alpha - 1.0))
        } else {
            Err(Error::Divergence(format!("Pareto mean is infinite for alpha = {}", self.alpha)))
        }
    }
}

/// One draw of the coupled pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledInnovation {
    /// Pareto draw.
    pub theta: f64,
    /// Unit exponential draw.
    pub r: f64,
    /// Tapered value: `theta` below `b`, `b + r` otherwise.
    pub zeta: f64,
    /// `zeta - E zeta`.
    pub xi: f64,
    /// `theta - E theta` when `alpha > 1`, plain `theta` when `alpha < 1`.
    pub eta: f64,
}

/// Draws `(theta, R)` and builds the tapered value from them, so that the
/// tapered and untapered innovations differ only on `{theta >= b}`.
#[derive(Clone, Copy, Debug)]
pub struct CouplingSampler {
    params: TaperedParetoParams,
    mu1: f64,
    eta_shift: f64,
}

impl CouplingSampler {
    pub fn new(params: TaperedParetoParams) -> Result<Self> {
        let alpha = params.alpha();
        if alpha == 1.0 {
            return Err(Error::Unsupported("coupling is undefined for alpha = 1".into()));
        }
        let eta_shift = if alpha > 1.0 { alpha / (alpha - 1.0) } else { 0.0 };
        Ok(Self {
            params,
            mu1: params.mean(),
            eta_shift,
        })
    }

    pub fn params(&self) -> &TaperedParetoParams {
        &self.params
    }

    pub fn tapered_mean(&self) -> f64 {
        self.mu1
    }

    pub fn pareto_shift(&self) -> f64 {
        self.eta_shift
    }

    /// Consumes exactly two uniforms per draw, whichever branch is taken.
    pub fn sample(&self, stream: &mut Stream) -> CoupledInnovation {
        let theta = (1.0 - stream.uniform_open()).powf(-1.0 / self.params.alpha());
        let r = stream.exp1();
        let b = self.params.b();
        let zeta = if theta < b { theta } else { b + r };
        CoupledInnovation {
            theta,
            r,
            zeta,
            xi: zeta - self.mu1,
            eta: theta - self.eta_shift,
        }
    }
}
