//! Classification of `(alpha, beta, gamma, zero_sum)` into hard/soft tapering
//! limit regimes.
//!
//! With `b_n = n^gamma`, slowly growing taper levels (`gamma < 1/alpha`) give
//! Gaussian limits (fractional Brownian motion), fast-growing ones give
//! stable limits. Each memory case has its own admissible `gamma` range; the
//! band between the Gaussian and stable ranges has no known limit.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::filters::FilterSpec;

/// Two exponents closer than this are treated as equal (boundary points).
pub const BOUNDARY_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Whether `sum_j a_j = 0`.
    #[serde(default)]
    pub zero_sum: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    T1i,
    T1ii,
    T1iii,
    T2i,
    T2ii,
    T2iii,
    UnknownGap,
    Unsupported,
}

impl Theorem {
    pub fn is_gaussian(self) -> bool {
        matches!(self, Theorem::T1i | Theorem::T1ii | Theorem::T1iii)
    }

    pub fn is_stable(self) -> bool {
        matches!(self, Theorem::T2i | Theorem::T2ii | Theorem::T2iii)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitKind {
    Fbm,
    Lfsm,
    StableLevy,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tapering {
    Hard,
    Soft,
    Boundary,
}

/// Memory class of the filter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Memory {
    /// `1/2 < beta < 1`.
    Positive,
    /// `beta > 1`, `sum a_j != 0`.
    Short,
    /// `beta > 1`, `sum a_j = 0`.
    Negative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeVerdict {
    pub theorem: Theorem,
    pub limit: LimitKind,
    /// Normalization exponent: `A_n = C n^H`.
    #[serde(rename = "H")]
    pub hurst: Option<f64>,
    /// Self-similarity index of the limit process in `t`. Equals `H` for the
    /// stable cases; for the Gaussian cases the taper level is frozen at
    /// `b_n` while `t` varies, so only the `gamma = 0` part remains.
    pub time_exponent: Option<f64>,
    pub tapering: Tapering,
    pub memory: Option<Memory>,
    /// Upper `gamma` bound of the Gaussian range and lower bound of the
    /// stable range, when defined.
    pub bounds: Option<(f64, f64)>,
    /// Why no theorem applies, for `UnknownGap` / `Unsupported`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl RegimeParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, zero_sum: bool) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            gamma,
            zero_sum,
        };
        p.validate()?;
        Ok(p)
    }

    /// Regime parameters for a filter; `zero_sum` is set for the telescoping
    /// construction only.
    pub fn for_filter(alpha: f64, gamma: f64, filter: &FilterSpec) -> Result<Self> {
        let beta = filter
            .beta()
            .ok_or_else(|| Error::Unsupported("explicit finite filters have no decay exponent".into()))?;
        Self::new(alpha, beta, gamma, filter.is_zero_sum())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(param(format!("alpha must lie in (0, 2) (got {})", self.alpha)));
        }
        if !(self.beta > 0.5) || !self.beta.is_finite() {
            return Err(param(format!("beta must exceed 1/2 (got {})", self.beta)));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(param(format!("gamma must be nonnegative (got {})", self.gamma)));
        }
        if self.zero_sum && self.beta < 1.0 {
            return Err(param("a zero-sum filter needs beta > 1"));
        }
        Ok(())
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self { gamma, ..*self }
    }
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= BOUNDARY_EPS * x.abs().max(y.abs()).max(1.0)
}

pub fn tapering_mode(p: &RegimeParams) -> Tapering {
    let pivot = 1.0 / p.alpha;
    if close(p.gamma, pivot) {
        Tapering::Boundary
    } else if p.gamma < pivot {
        Tapering::Hard
    } else {
        Tapering::Soft
    }
}

fn memory(p: &RegimeParams) -> Option<Memory> {
    if p.beta < 1.0 {
        Some(Memory::Positive)
    } else if p.beta > 1.0 {
        Some(if p.zero_sum { Memory::Negative } else { Memory::Short })
    } else {
        None
    }
}

/// Upper end of the Gaussian `gamma` range, if the memory case has one.
fn gaussian_bound(p: &RegimeParams, mem: Memory) -> Option<f64> {
    let (a, b) = (p.alpha, p.beta);
    match mem {
        Memory::Positive => Some((1.0 / a).min((2.0 * b - 1.0) / (2.0 - a))),
        Memory::Short => Some((1.0 / a).min(1.0 / (2.0 - a))),
        Memory::Negative if b < 1.5 => Some(((2.0 * b - 1.0) / (2.0 - a)).min((3.0 - 2.0 * b) / a)),
        Memory::Negative => None,
    }
}

/// Lower end of the stable `gamma` range, if the stable theorem covers
/// `(alpha, beta)` at all.
fn stable_bound(p: &RegimeParams, mem: Memory) -> Option<f64> {
    let (a, b) = (p.alpha, p.beta);
    if a == 1.0 || b <= 1.0 / a {
        return None;
    }
    match mem {
        Memory::Positive | Memory::Short => Some(1.0 / a),
        Memory::Negative if b < 1.0 + 1.0 / a => Some(1.0 / a + (b - 1.0) / (a * b - 1.0)),
        Memory::Negative => None,
    }
}

fn gaussian_hurst(p: &RegimeParams, mem: Memory) -> f64 {
    let base = match mem {
        Memory::Positive | Memory::Negative => 1.5 - p.beta,
        Memory::Short => 0.5,
    };
    base + p.gamma * (2.0 - p.alpha) / 2.0
}

pub fn classify(p: &RegimeParams) -> Result<RegimeVerdict> {
    p.validate()?;
    let tapering = tapering_mode(p);
    let unresolved = |theorem: Theorem, mem: Option<Memory>, bounds: Option<(f64, f64)>, note: String| RegimeVerdict {
        theorem,
        limit: LimitKind::Unknown,
        hurst: None,
        time_exponent: None,
        tapering,
        memory: mem,
        bounds,
        note: Some(note),
    };
    let Some(mem) = memory(p) else {
        return Ok(unresolved(
            Theorem::Unsupported,
            None,
            None,
            "beta = 1 separates the memory cases".into(),
        ));
    };
    let c1 = gaussian_bound(p, mem);
    let c2 = stable_bound(p, mem);
    let bounds = match (c1, c2) {
        (Some(x), Some(y)) => Some((x, y)),
        _ => None,
    };
    let g = p.gamma;

    if let Some(c1) = c1 {
        if g < c1 && !close(g, c1) {
            let theorem = match mem {
                Memory::Positive => Theorem::T1i,
                Memory::Short => Theorem::T1ii,
                Memory::Negative => Theorem::T1iii,
            };
            let h = gaussian_hurst(p, mem);
            return Ok(RegimeVerdict {
                theorem,
                limit: LimitKind::Fbm,
                hurst: Some(h),
                time_exponent: Some(gaussian_hurst(&p.with_gamma(0.0), mem)),
                tapering,
                memory: Some(mem),
                bounds,
                note: None,
            });
        }
        if close(g, c1) {
            return Ok(unresolved(
                Theorem::UnknownGap,
                Some(mem),
                bounds,
                format!("gamma sits on the Gaussian bound {c1}"),
            ));
        }
    }
    if let Some(c2) = c2 {
        if close(g, c2) {
            return Ok(unresolved(
                Theorem::UnknownGap,
                Some(mem),
                bounds,
                format!("gamma sits on the stable bound {c2}"),
            ));
        }
        if g > c2 {
            let a = p.alpha;
            let (theorem, limit, h) = match mem {
                Memory::Positive => (Theorem::T2i, LimitKind::Lfsm, 1.0 / a + 1.0 - p.beta),
                Memory::Short => (Theorem::T2ii, LimitKind::StableLevy, 1.0 / a),
                Memory::Negative => (Theorem::T2iii, LimitKind::Lfsm, 1.0 / a + 1.0 - p.beta),
            };
            return Ok(RegimeVerdict {
                theorem,
                limit,
                hurst: Some(h),
                time_exponent: Some(h),
                tapering,
                memory: Some(mem),
                bounds,
                note: None,
            });
        }
        if let Some(c1) = c1 {
            if g > c1 {
                return Ok(unresolved(
                    Theorem::UnknownGap,
                    Some(mem),
                    bounds,
                    format!("gamma lies between {c1} and {c2}; the limit is not known"),
                ));
            }
        }
    }
    let note = if p.alpha == 1.0 {
        "alpha = 1 is excluded from the stable theorem".to_string()
    } else if c2.is_none() && p.beta <= 1.0 / p.alpha {
        format!("stable theorem needs beta > 1/alpha = {}", 1.0 / p.alpha)
    } else {
        "no theorem covers these parameters".to_string()
    };
    Ok(unresolved(
        Theorem::Unsupported,
        Some(mem),
        match (c1, c2) {
            (Some(x), None) => Some((x, f64::INFINITY)),
            (None, Some(y)) => Some((f64::NEG_INFINITY, y)),
            _ => bounds,
        },
        note,
    ))
}

/// `H` of the matching theorem case.
pub fn hurst_exponent(p: &RegimeParams) -> Result<f64> {
    let v = classify(p)?;
    v.hurst.ok_or_else(|| {
        Error::NoExponent(format!(
            "{:?} at alpha={}, beta={}, gamma={}",
            v.theorem, p.alpha, p.beta, p.gamma
        ))
    })
}

/// `H(p) - H(p with gamma = 0)` for a Gaussian case.
pub fn h_shift_check(p: &RegimeParams) -> Result<f64> {
    let v = classify(p)?;
    if !v.theorem.is_gaussian() {
        return Err(Error::NoExponent(format!("{:?} is not a Gaussian case", v.theorem)));
    }
    Ok(hurst_exponent(p)? - hurst_exponent(&p.with_gamma(0.0))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(alpha: f64, beta: f64, gamma: f64, zero_sum: bool) -> RegimeParams {
        RegimeParams::new(alpha, beta, gamma, zero_sum).unwrap()
    }

    #[test]
    fn tapering_modes() {
        assert_eq!(tapering_mode(&rp(1.5, 0.75, 0.5, false)), Tapering::Hard);
        assert_eq!(tapering_mode(&rp(1.5, 0.75, 1.0 / 1.5, false)), Tapering::Boundary);
        assert_eq!(tapering_mode(&rp(0.8, 1.5, 2.0, false)), Tapering::Soft);
    }

    #[test]
    fn reference_cases() {
        let v = classify(&rp(1.5, 0.75, 0.2, false)).unwrap();
        assert_eq!((v.theorem, v.limit), (Theorem::T1i, LimitKind::Fbm));
        assert!((v.hurst.unwrap() - 0.8).abs() < 1e-15);

        let v = classify(&rp(1.5, 0.8, 1.0, false)).unwrap();
        assert_eq!((v.theorem, v.limit), (Theorem::T2i, LimitKind::Lfsm));
        assert!((v.hurst.unwrap() - (1.0 / 1.5 + 0.2)).abs() < 1e-15);

        let v = classify(&rp(1.2, 1.25, 1.0, true)).unwrap();
        assert_eq!(v.theorem, Theorem::UnknownGap);
        let (c1, c2) = v.bounds.unwrap();
        assert!((c1 - 0.5 / 1.2).abs() < 1e-12);
        assert!((c2 - (1.0 / 1.2 + 0.5)).abs() < 1e-12);
        assert!(v.hurst.is_none());
    }

    #[test]
    fn hurst_values() {
        assert!((hurst_exponent(&rp(1.5, 1.5, 0.5, false)).unwrap() - 0.625).abs() < 1e-15);
        assert!((hurst_exponent(&rp(1.5, 0.75, 0.0, false)).unwrap() - 0.75).abs() < 1e-15);
        assert!((hurst_exponent(&rp(1.5, 1.5, 0.0, false)).unwrap() - 0.5).abs() < 1e-15);
        assert!((hurst_exponent(&rp(1.5, 2.0, 1.0, false)).unwrap() - 1.0 / 1.5).abs() < 1e-15);
        assert!(matches!(hurst_exponent(&rp(1.2, 1.25, 1.0, true)), Err(Error::NoExponent(_))));
    }

    #[test]
    fn shift_equals_taper_term() {
        let s = h_shift_check(&rp(1.9, 0.75, 0.1, false)).unwrap();
        assert!((s - 0.005).abs() < 1e-15);
        assert_eq!(h_shift_check(&rp(1.5, 1.25, 0.0, true)).unwrap(), 0.0);
    }

    #[test]
    fn boundaries_and_exclusions() {
        // exactly on the hard/soft pivot
        let v = classify(&rp(1.5, 0.8, 1.0 / 1.5, false)).unwrap();
        assert_eq!(v.theorem, Theorem::UnknownGap);
        // alpha = 1 on the soft side
        let v = classify(&rp(1.0, 1.5, 2.0, false)).unwrap();
        assert_eq!(v.theorem, Theorem::Unsupported);
        // beta = 1
        assert_eq!(classify(&rp(1.5, 1.0, 0.1, false)).unwrap().theorem, Theorem::Unsupported);
        // soft tapering but beta <= 1/alpha
        assert_eq!(classify(&rp(1.2, 0.75, 2.0, false)).unwrap().theorem, Theorem::Unsupported);
        assert!(RegimeParams::new(2.0, 0.75, 0.1, false).is_err());
        assert!(RegimeParams::new(1.5, 0.5, 0.1, false).is_err());
        assert!(RegimeParams::new(1.5, 0.75, 0.1, true).is_err());
    }

    #[test]
    fn brownian_point_in_negative_memory() {
        let (alpha, gamma) = (1.5, 0.2);
        let beta = 1.0 + gamma * (2.0 - alpha) / 2.0;
        let v = classify(&rp(alpha, beta, gamma, true)).unwrap();
        assert_eq!((v.theorem, v.limit), (Theorem::T1iii, LimitKind::Fbm));
        assert!((v.hurst.unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn verdict_json_shape() {
        let v = classify(&rp(1.5, 0.75, 0.2, false)).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["theorem"], "T1i");
        assert_eq!(json["limit"], "fbm");
        assert!((json["H"].as_f64().unwrap() - 0.8).abs() < 1e-15);
    }
}
