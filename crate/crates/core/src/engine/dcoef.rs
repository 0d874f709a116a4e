//! Coefficients `d_{n,j,t}` of `S_n(t) = sum_j d_{n,j,t} xi_j` and the exact
//! finite-`n` quantities built from them.

use serde::{Deserialize, Serialize};

use crate::distributions::TaperedParetoParams;
use crate::error::{domain, param, Error, Result};
use crate::filters::FilterSpec;
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};

/// `[n t]`, with a little slack so that e.g. `t = 0.1, n = 10` yields 1.
pub fn floor_nt(n: u64, t: f64) -> u64 {
    let x = n as f64 * t;
    (x + 1e-9 * x.max(1.0)).floor() as u64
}

/// `d_{n,j,t}` for `j = 1 - J, ..., [nt]`, with the filter truncated to lags
/// `0..=J`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DCoefficients {
    pub n: u64,
    pub t: f64,
    pub horizon: u64,
    /// `values[i]` is `d_{n, i + 1 - J, t}`.
    pub values: Vec<f64>,
}

impl DCoefficients {
    pub fn compute(filter: &FilterSpec, n: u64, t: f64, horizon: u64) -> Result<Self> {
        check_args(n, t, horizon)?;
        let partial = filter.partial_sums(horizon as usize + 1);
        Ok(Self {
            n,
            t,
            horizon,
            values: d_from_partial_sums(&partial, floor_nt(n, t), horizon),
        })
    }

    pub fn first_index(&self) -> i64 {
        1 - self.horizon as i64
    }

    /// `d_{n,j,t}`, zero outside the stored range.
    pub fn get(&self, j: i64) -> f64 {
        let i = j - self.first_index();
        if i < 0 {
            0.0
        } else {
            self.values.get(i as usize).copied().unwrap_or(0.0)
        }
    }
}

fn check_args(n: u64, t: f64, horizon: u64) -> Result<()> {
    if n == 0 {
        return Err(param("n must be positive"));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(domain(format!("t must lie in (0, 1] (got {t})")));
    }
    if horizon == 0 {
        return Err(param("truncation horizon must be positive"));
    }
    Ok(())
}

/// `d_j = P(min(m - j, J)) - P(max(0, 1 - j) - 1)` for `j = 1 - J ..= m`,
/// where `P(k) = a_0 + ... + a_k` and `P(-1) = 0`.
pub(crate) fn d_from_partial_sums(partial: &[f64], m: u64, horizon: u64) -> Vec<f64> {
    let horizon = horizon as i64;
    let m = m as i64;
    let p = |k: i64| if k < 0 { 0.0 } else { partial[k as usize] };
    (1 - horizon..=m)
        .map(|j| {
            let hi = (m - j).min(horizon);
            let lo = (1 - j).max(0);
            if hi < lo {
                0.0
            } else {
                p(hi) - p(lo - 1)
            }
        })
        .collect()
}

/// Power sums of the d-coefficients at one `t`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DPowerSums {
    pub sum_sq: f64,
    pub sum_abs_cube: f64,
    pub max_abs: f64,
}

pub fn d_power_sums(filter: &FilterSpec, n: u64, t: f64, horizon: u64) -> Result<DPowerSums> {
    let d = DCoefficients::compute(filter, n, t, horizon)?;
    let mut out = DPowerSums {
        sum_sq: 0.0,
        sum_abs_cube: 0.0,
        max_abs: 0.0,
    };
    for &v in &d.values {
        let a = v.abs();
        out.sum_sq += a * a;
        out.sum_abs_cube += a * a * a;
        out.max_abs = out.max_abs.max(a);
    }
    Ok(out)
}

/// `sum_j d_{n,j,1}^2` over `j = 1 - J ..= n`.
pub fn sum_d_squared(filter: &FilterSpec, n: u64, horizon: u64) -> Result<f64> {
    Ok(d_power_sums(filter, n, 1.0, horizon)?.sum_sq)
}

/// Rough bound on the part of `sum_j d_j^2` lost by truncating the filter at
/// lag `J`: `n^2 sum_{l > J} a_l^2`.
pub fn truncation_error_bound(filter: &FilterSpec, n: u64, horizon: u64) -> Result<f64> {
    let nf = n as f64;
    Ok(nf * nf * filter.tail_norm_bound(2.0, horizon)?)
}

/// Memory case for the variance constant of `sum_j d_j^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Prop1Case {
    /// `a_j ~ j^-beta`, `1/2 < beta < 1`: growth `n^(3 - 2 beta)`.
    Positive { beta: f64 },
    /// Summable filter with nonzero sum: growth `n`, constant `(sum a_j)^2`.
    Summable { filter: FilterSpec },
    /// Zero-sum filter with `|a_j| ~ j^-beta`, `1 < beta < 3/2`: growth
    /// `n^(3 - 2 beta)`.
    ZeroSum { beta: f64 },
}

/// The two pieces of the variance constant: `v1` from indices `j <= 0`, `v2`
/// from `1 <= j <= n`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Prop1Constant {
    pub v1: f64,
    pub v2: f64,
}

impl Prop1Constant {
    pub fn total(&self) -> f64 {
        self.v1 + self.v2
    }
}

impl Prop1Case {
    /// Case and coefficient scale for a filter: `sum d^2 ~ scale^2 C n^e`.
    pub fn for_filter(filter: &FilterSpec) -> Result<(Self, f64)> {
        match filter {
            FilterSpec::PowerLaw { beta, c_a, .. } if *beta < 1.0 => Ok((Prop1Case::Positive { beta: *beta }, *c_a)),
            FilterSpec::ZeroSumTelescoping { beta } => Ok((Prop1Case::ZeroSum { beta: *beta }, beta - 1.0)),
            FilterSpec::PowerLaw { beta, .. } if *beta == 1.0 => {
                Err(Error::Unsupported("beta = 1 has no power-law variance constant".into()))
            }
            _ => Ok((Prop1Case::Summable { filter: filter.clone() }, 1.0)),
        }
    }

    /// Exponent `e` in `sum_j d_j^2 ~ C n^e`.
    pub fn growth_exponent(&self) -> f64 {
        match self {
            Prop1Case::Positive { beta } | Prop1Case::ZeroSum { beta } => 3.0 - 2.0 * beta,
            Prop1Case::Summable { .. } => 1.0,
        }
    }
}

/// `int_0^inf (((1+z)^(1-beta) - z^(1-beta)) / (1-beta))^2 dz`.
fn past_integral(beta: f64) -> Result<f64> {
    let e = 1.0 - beta;
    let inner = move |z: f64| {
        if z == 0.0 {
            return 1.0 / e;
        }
        // (1+z)^e - z^e = z^e expm1(e ln(1 + 1/z))
        z.powf(e) * (e * (1.0 / z).ln_1p()).exp_m1() / e
    };
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-11,
        ..QuadOptions::default()
    };
    let near = integrate(|z| inner(z).powi(2), 0.0, 1.0, opts)?.value;
    // z = e^s beyond 1; the integrand then decays like e^((1 - 2 beta) s)
    let far = integrate_to_infinity(
        |s| {
            let z = s.exp();
            inner(z).powi(2) * z
        },
        0.0,
        opts,
    )?
    .value;
    Ok(near + far)
}

/// Unit-scale variance constant of the memory case.
pub fn prop1_constant(case: &Prop1Case) -> Result<Prop1Constant> {
    match case {
        Prop1Case::Positive { beta } => {
            let b = *beta;
            if !(b > 0.5 && b < 1.0) {
                return Err(domain(format!("positive memory needs 1/2 < beta < 1 (got {b})")));
            }
            Ok(Prop1Constant {
                v1: past_integral(b)?,
                v2: 1.0 / ((1.0 - b).powi(2) * (3.0 - 2.0 * b)),
            })
        }
        Prop1Case::ZeroSum { beta } => {
            let b = *beta;
            if !(b > 1.0 && b < 1.5) {
                return Err(domain(format!("negative memory needs 1 < beta < 3/2 (got {b})")));
            }
            Ok(Prop1Constant {
                v1: past_integral(b)?,
                v2: 1.0 / ((b - 1.0).powi(2) * (3.0 - 2.0 * b)),
            })
        }
        Prop1Case::Summable { filter } => {
            if let Some(b) = filter.beta() {
                if !(b > 1.0) {
                    return Err(domain(format!("summable case needs beta > 1 (got {b})")));
                }
            }
            let s = filter.filter_sum()?;
            Ok(Prop1Constant { v1: s * s, v2: 0.0 })
        }
    }
}

/// `C scale^2` with `sum_j d_j^2 ~ C scale^2 n^e` for the given filter.
pub fn prop1_reference(filter: &FilterSpec) -> Result<(f64, f64)> {
    let (case, scale) = Prop1Case::for_filter(filter)?;
    let c = prop1_constant(&case)?.total();
    Ok((c * scale * scale, case.growth_exponent()))
}

/// Components of the third-moment Lyapunov ratio.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LyapunovRatio {
    /// `sum |d|^3 / (sum d^2)^(3/2)`.
    pub coefficient_factor: f64,
    /// `max |d| / (sum d^2)^(1/2)`, the bound used for the coefficient factor.
    pub max_factor: f64,
    /// `E|xi|^3 / (E xi^2)^(3/2)`.
    pub innovation_factor: f64,
    pub value: f64,
}

pub fn lyapunov_from_parts(sums: &DPowerSums, params: &TaperedParetoParams) -> Result<LyapunovRatio> {
    let m3 = params.central_abs_moment(3.0)?;
    let var = params.centered_variance();
    let coefficient_factor = sums.sum_abs_cube / sums.sum_sq.powf(1.5);
    let innovation_factor = m3 / var.powf(1.5);
    Ok(LyapunovRatio {
        coefficient_factor,
        max_factor: sums.max_abs / sums.sum_sq.sqrt(),
        innovation_factor,
        value: coefficient_factor * innovation_factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_filter() {
        let id = FilterSpec::identity();
        let d = DCoefficients::compute(&id, 8, 1.0, 1).unwrap();
        for j in -3..=10 {
            let expect = if (1..=8).contains(&j) { 1.0 } else { 0.0 };
            assert_eq!(d.get(j), expect, "j={j}");
        }
        assert_eq!(sum_d_squared(&id, 100, 1).unwrap(), 100.0);
    }

    #[test]
    fn matches_definition_by_double_loop() {
        let filters = [
            FilterSpec::power_law(0.75, 1.0).unwrap(),
            FilterSpec::zero_sum(1.25).unwrap(),
            FilterSpec::explicit(vec![0.5, -1.0, 2.0, 0.25]).unwrap(),
        ];
        for f in &filters {
            for &(n, t, horizon) in &[(16u64, 1.0, 32u64), (20, 0.5, 8), (7, 0.3, 64)] {
                let d = DCoefficients::compute(f, n, t, horizon).unwrap();
                let m = floor_nt(n, t) as i64;
                for j in (1 - horizon as i64)..=m {
                    let mut direct = 0.0;
                    for k in 1.max(j)..=m {
                        let lag = k - j;
                        if lag <= horizon as i64 {
                            direct += f.coefficient(lag as u64);
                        }
                    }
                    assert!((d.get(j) - direct).abs() < 1e-12, "j={j}");
                }
            }
        }
    }

    #[test]
    fn d_at_zero_for_power_law() {
        let f = FilterSpec::power_law(0.75, 1.0).unwrap();
        let d = DCoefficients::compute(&f, 16, 1.0, 64).unwrap();
        let direct: f64 = (1..=16).map(|k| (k as f64).powf(-0.75)).sum();
        assert!((d.get(0) - direct).abs() < 1e-13);
    }

    #[test]
    fn variance_constants() {
        let c = prop1_constant(&Prop1Case::ZeroSum { beta: 1.25 }).unwrap();
        assert!((c.v2 - 32.0).abs() < 1e-12);
        let c = prop1_constant(&Prop1Case::Summable {
            filter: FilterSpec::explicit(vec![2.0]).unwrap(),
        })
        .unwrap();
        assert_eq!(c.total(), 4.0);
        assert!(prop1_constant(&Prop1Case::Positive { beta: 1.2 }).is_err());
        assert!(prop1_constant(&Prop1Case::ZeroSum { beta: 1.6 }).is_err());
    }

    #[test]
    fn past_integral_against_midpoint_rule() {
        // independent check of the outer quadrature on a truncated range
        let beta: f64 = 0.75;
        let e = 1.0 - beta;
        let g = |z: f64| (((1.0 + z).powf(e) - z.powf(e)) / e).powi(2);
        let (lo, hi, cells) = (0.0, 1.0e4, 2_000_000);
        let h: f64 = (hi - lo) / cells as f64;
        let mut direct = 0.0;
        for i in 0..cells {
            direct += g(lo + (i as f64 + 0.5) * h) * h;
        }
        // beyond hi: g ~ z^(-2 beta)
        direct += hi.powf(1.0 - 2.0 * beta) / (2.0 * beta - 1.0);
        let quad = past_integral(beta).unwrap();
        assert!((quad / direct - 1.0).abs() < 2e-3, "{quad} vs {direct}");
    }

    #[test]
    fn lyapunov_identity_filter() {
        let id = FilterSpec::identity();
        let p = TaperedParetoParams::new(1.5, 10.0).unwrap();
        let sums = d_power_sums(&id, 400, 1.0, 1).unwrap();
        let l = lyapunov_from_parts(&sums, &p).unwrap();
        assert!((l.coefficient_factor - 400f64.powf(-0.5)).abs() < 1e-15);
    }
}
