//! Filter sequences `{a_j}` of the linear process `X_k = sum_j a_j xi_{k-j}`.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::special::{power_sum, zeta};

/// Largest truncation horizon `truncation_horizon` will report (2^62).
const MAX_HORIZON_LOG2: u32 = 62;

/// Number of leading terms summed exactly when estimating the head norm of a
/// telescoping filter.
const TELESCOPING_HEAD_TERMS: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawFilter")]
pub enum FilterSpec {
    /// `a_j = c_a j^-beta` for `j >= 1`; `a_0` defaults to `c_a` when
    /// `beta >= 1` and to `-c_a zeta(beta)` when `beta < 1`.
    PowerLaw {
        beta: f64,
        c_a: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a0: Option<f64>,
    },
    /// `a_0 = -1`, `a_j = j^(1-beta) - (j+1)^(1-beta)`; sums to zero.
    ZeroSumTelescoping { beta: f64 },
    /// Finite list, zero-extended.
    ExplicitFinite { coeffs: Vec<f64> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawFilter {
    PowerLaw {
        beta: f64,
        #[serde(default = "unit")]
        c_a: f64,
        #[serde(default)]
        a0: Option<f64>,
    },
    ZeroSumTelescoping {
        beta: f64,
    },
    ExplicitFinite {
        coeffs: Vec<f64>,
    },
}

fn unit() -> f64 {
    1.0
}

impl TryFrom<RawFilter> for FilterSpec {
    type Error = Error;
    fn try_from(raw: RawFilter) -> Result<Self> {
        let spec = match raw {
            RawFilter::PowerLaw { beta, c_a, a0 } => FilterSpec::PowerLaw { beta, c_a, a0 },
            RawFilter::ZeroSumTelescoping { beta } => FilterSpec::ZeroSumTelescoping { beta },
            RawFilter::ExplicitFinite { coeffs } => FilterSpec::ExplicitFinite { coeffs },
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl FilterSpec {
    pub fn power_law(beta: f64, c_a: f64) -> Result<Self> {
        let f = FilterSpec::PowerLaw { beta, c_a, a0: None };
        f.validate()?;
        Ok(f)
    }

    pub fn zero_sum(beta: f64) -> Result<Self> {
        let f = FilterSpec::ZeroSumTelescoping { beta };
        f.validate()?;
        Ok(f)
    }

    pub fn explicit(coeffs: Vec<f64>) -> Result<Self> {
        let f = FilterSpec::ExplicitFinite { coeffs };
        f.validate()?;
        Ok(f)
    }

    /// The trivial filter `a_0 = 1`.
    pub fn identity() -> Self {
        FilterSpec::ExplicitFinite { coeffs: vec![1.0] }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FilterSpec::PowerLaw { beta, c_a, a0 } => {
                if !(*beta > 0.5) || !beta.is_finite() {
                    return Err(param(format!("power-law decay needs beta > 1/2 (got {beta})")));
                }
                if *c_a == 0.0 || !c_a.is_finite() {
                    return Err(param(format!("c_a must be finite and nonzero (got {c_a})")));
                }
                if let Some(a) = a0 {
                    if !a.is_finite() {
                        return Err(param("a0 must be finite"));
                    }
                }
            }
            FilterSpec::ZeroSumTelescoping { beta } => {
                if !(*beta > 1.0) || !beta.is_finite() {
                    return Err(param(format!("telescoping zero-sum filter needs beta > 1 (got {beta})")));
                }
            }
            FilterSpec::ExplicitFinite { coeffs } => {
                if coeffs.is_empty() {
                    return Err(param("explicit filter needs at least one coefficient"));
                }
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(param("explicit filter coefficients must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Decay exponent `beta`, absent for explicit filters.
    pub fn beta(&self) -> Option<f64> {
        match self {
            FilterSpec::PowerLaw { beta, .. } | FilterSpec::ZeroSumTelescoping { beta } => Some(*beta),
            FilterSpec::ExplicitFinite { .. } => None,
        }
    }

    /// True only for the telescoping construction.
    pub fn is_zero_sum(&self) -> bool {
        matches!(self, FilterSpec::ZeroSumTelescoping { .. })
    }

    /// `a_0` in effect for a power-law filter.
    fn power_law_a0(beta: f64, c_a: f64, a0: Option<f64>) -> f64 {
        match a0 {
            Some(a) => a,
            None if beta < 1.0 => -c_a * zeta(beta).expect("beta in (1/2, 1)"),
            None => c_a,
        }
    }

    pub fn coefficient(&self, j: u64) -> f64 {
        match self {
            FilterSpec::PowerLaw { beta, c_a, a0 } => {
                if j == 0 {
                    Self::power_law_a0(*beta, *c_a, *a0)
                } else {
                    c_a * (j as f64).powf(-beta)
                }
            }
            FilterSpec::ZeroSumTelescoping { beta } => {
                if j == 0 {
                    -1.0
                } else {
                    let e = 1.0 - beta;
                    let jf = j as f64;
                    // j^e - (j+1)^e = -j^e expm1(e ln(1 + 1/j)), free of cancellation
                    -jf.powf(e) * (e * (1.0 / jf).ln_1p()).exp_m1()
                }
            }
            FilterSpec::ExplicitFinite { coeffs } => coeffs.get(j as usize).copied().unwrap_or(0.0),
        }
    }

    /// `a_0, ..., a_{len-1}`.
    pub fn coefficients(&self, len: usize) -> Vec<f64> {
        (0..len as u64).map(|j| self.coefficient(j)).collect()
    }

    /// `P_k = sum_{j=0}^{k} a_j` for `k < len` (compensated summation; closed
    /// form for the telescoping filter).
    pub fn partial_sums(&self, len: usize) -> Vec<f64> {
        match self {
            FilterSpec::ZeroSumTelescoping { beta } => {
                let e = 1.0 - beta;
                (0..len).map(|k| -((k + 1) as f64).powf(e)).collect()
            }
            _ => {
                let mut out = Vec::with_capacity(len);
                let mut acc = Neumaier::default();
                for j in 0..len as u64 {
                    acc.add(self.coefficient(j));
                    out.push(acc.value());
                }
                out
            }
        }
    }

    /// `sum_j a_j`.
    pub fn filter_sum(&self) -> Result<f64> {
        match self {
            FilterSpec::PowerLaw { beta, c_a, a0 } => {
                if *beta <= 1.0 {
                    return Err(Error::Divergence(format!(
                        "sum of a power-law filter diverges for beta = {beta} <= 1"
                    )));
                }
                Ok(Self::power_law_a0(*beta, *c_a, *a0) + c_a * zeta(*beta)?)
            }
            FilterSpec::ZeroSumTelescoping { .. } => Ok(0.0),
            FilterSpec::ExplicitFinite { coeffs } => {
                let mut acc = Neumaier::default();
                coeffs.iter().for_each(|&c| acc.add(c));
                Ok(acc.value())
            }
        }
    }

    /// Upper bound on `sum_{j > horizon} |a_j|^p`.
    pub fn tail_norm_bound(&self, p: f64, horizon: u64) -> Result<f64> {
        match self {
            FilterSpec::ExplicitFinite { coeffs } => Ok(coeffs
                .iter()
                .skip(horizon as usize + 1)
                .map(|c| c.abs().powf(p))
                .sum()),
            FilterSpec::PowerLaw { beta, c_a, .. } => {
                let s = beta * p;
                self.check_norm(s, p)?;
                let h = horizon.max(1) as f64;
                Ok(c_a.abs().powf(p) * h.powf(1.0 - s) / (s - 1.0))
            }
            FilterSpec::ZeroSumTelescoping { beta } => {
                let s = beta * p;
                self.check_norm(s, p)?;
                let h = horizon.max(1) as f64;
                // |a_j| <= (beta - 1) j^-beta
                Ok((beta - 1.0).powf(p) * h.powf(1.0 - s) / (s - 1.0))
            }
        }
    }

    /// Lower bound on `sum_{j <= horizon} |a_j|^p`.
    pub fn head_norm(&self, p: f64, horizon: u64) -> Result<f64> {
        match self {
            FilterSpec::ExplicitFinite { coeffs } => Ok(coeffs
                .iter()
                .take(horizon as usize + 1)
                .map(|c| c.abs().powf(p))
                .sum()),
            FilterSpec::PowerLaw { beta, c_a, a0 } => {
                let a0 = Self::power_law_a0(*beta, *c_a, *a0);
                Ok(a0.abs().powf(p) + c_a.abs().powf(p) * power_sum(beta * p, horizon)?)
            }
            FilterSpec::ZeroSumTelescoping { .. } => Ok((0..=horizon.min(TELESCOPING_HEAD_TERMS))
                .map(|j| self.coefficient(j).abs().powf(p))
                .sum()),
        }
    }

    fn check_norm(&self, s: f64, p: f64) -> Result<()> {
        if s > 1.0 {
            Ok(())
        } else {
            Err(Error::Divergence(format!(
                "sum |a_j|^{p} diverges (beta * p = {s} <= 1)"
            )))
        }
    }

    /// Smallest power of two `J` with
    /// `sum_{j > J} |a_j|^p <= tol * sum_{j <= J} |a_j|^p`, the tail taken
    /// from its integral bound.
    pub fn truncation_horizon(&self, p: f64, tol: f64) -> Result<u64> {
        if !(p > 0.0) || !(tol > 0.0) {
            return Err(param(format!("truncation needs p > 0 and tol > 0 (got p={p}, tol={tol})")));
        }
        if let FilterSpec::ExplicitFinite { coeffs } = self {
            return Ok((coeffs.len() as u64).next_power_of_two());
        }
        for k in 0..=MAX_HORIZON_LOG2 {
            let j = 1u64 << k;
            if self.tail_norm_bound(p, j)? <= tol * self.head_norm(p, j)? {
                return Ok(j);
            }
        }
        Err(Error::Numerical(format!(
            "truncation horizon beyond 2^{MAX_HORIZON_LOG2} for p={p}, tol={tol}"
        )))
    }
}

/// Kahan-Babuska-Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_by_kind() {
        let f = FilterSpec::power_law(0.75, 1.0).unwrap();
        assert!((f.coefficient(4) - 4f64.powf(-0.75)).abs() < 1e-15);
        assert!((f.coefficient(4) - 0.35355).abs() < 1e-5);
        let z = FilterSpec::zero_sum(1.25).unwrap();
        assert_eq!(z.coefficient(0), -1.0);
        let direct = 3f64.powf(-0.25) - 4f64.powf(-0.25);
        assert!((z.coefficient(3) - direct).abs() < 1e-15);
        let e = FilterSpec::explicit(vec![1.0, 2.0]).unwrap();
        assert_eq!(e.coefficient(1), 2.0);
        assert_eq!(e.coefficient(7), 0.0);
    }

    #[test]
    fn power_law_a0_convention() {
        let long = FilterSpec::power_law(0.75, 2.0).unwrap();
        assert!((long.coefficient(0) + 2.0 * zeta(0.75).unwrap()).abs() < 1e-14);
        let short = FilterSpec::power_law(1.5, 2.0).unwrap();
        assert_eq!(short.coefficient(0), 2.0);
        let pinned = FilterSpec::PowerLaw { beta: 0.75, c_a: 1.0, a0: Some(1.0) };
        assert_eq!(pinned.coefficient(0), 1.0);
    }

    #[test]
    fn telescoping_sums_and_decay() {
        let z = FilterSpec::zero_sum(1.25).unwrap();
        let n = 1_000_000usize;
        let mut acc = Neumaier::default();
        for j in 0..=n as u64 {
            acc.add(z.coefficient(j));
        }
        let expect = -((n + 1) as f64).powf(-0.25);
        assert!((acc.value() - expect).abs() < 1e-12);
        assert!((expect + 0.0316).abs() < 1e-4);
        let ps = z.partial_sums(n + 1);
        assert!((ps[n] - expect).abs() < 1e-15);
        let j = 1e6f64;
        assert!((j.powf(1.25) * z.coefficient(1_000_000) / 0.25 - 1.0).abs() < 0.01);
    }

    #[test]
    fn filter_sums() {
        assert_eq!(FilterSpec::zero_sum(1.7).unwrap().filter_sum().unwrap(), 0.0);
        assert_eq!(FilterSpec::explicit(vec![1.0, -1.0]).unwrap().filter_sum().unwrap(), 0.0);
        // a_0 = 1 plus sum_{j>=1} j^-2
        let f = FilterSpec::power_law(2.0, 1.0).unwrap();
        let direct: f64 = (1..=2_000_000u64).map(|j| (j as f64).powi(-2)).sum::<f64>() + 1.0 / 2_000_000.0;
        assert!((f.filter_sum().unwrap() - (1.0 + direct)).abs() < 1e-10);
        assert!(FilterSpec::power_law(0.9, 1.0).unwrap().filter_sum().is_err());
    }

    #[test]
    fn horizons() {
        let e = FilterSpec::explicit(vec![1.0; 5]).unwrap();
        assert_eq!(e.truncation_horizon(2.0, 1e-6).unwrap(), 8);
        let f = FilterSpec::PowerLaw { beta: 0.75, c_a: 1.0, a0: Some(1.0) };
        let j = f.truncation_horizon(2.0, 1e-3).unwrap();
        let ok = |j: u64| {
            let jf = j as f64;
            jf.powf(-0.5) / 0.5 <= 1e-3 * (1.0 + (1..=j).map(|k| (k as f64).powf(-1.5)).sum::<f64>())
        };
        assert!(ok(j) && !ok(j / 2), "j={j}");
        assert!(matches!(
            FilterSpec::power_law(0.75, 1.0).unwrap().truncation_horizon(1.2, 1e-6),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn serde_validation() {
        let f: FilterSpec = serde_json::from_str(r#"{"kind":"power_law","beta":0.75}"#).unwrap();
        assert_eq!(f, FilterSpec::PowerLaw { beta: 0.75, c_a: 1.0, a0: None });
        assert!(serde_json::from_str::<FilterSpec>(r#"{"kind":"zero_sum_telescoping","beta":0.9}"#).is_err());
        assert!(serde_json::from_str::<FilterSpec>(r#"{"kind":"power_law","beta":0.75,"oops":1}"#).is_err());
        let back: FilterSpec = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }
}
