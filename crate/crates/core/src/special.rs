//! Special functions: Riemann zeta on the real line, scaled upper incomplete
//! gamma, and power sums.

use crate::error::{domain, Error, Result};

pub use statrs::function::gamma::{gamma, ln_gamma};

/// Relative tolerance for the incomplete-gamma expansions.
const GAMMA_REL_TOL: f64 = 1e-12;
const GAMMA_MAX_ITER: usize = 10_000;

/// Number of terms summed directly before the Euler-Maclaurin tail.
const EM_CUTOFF: u64 = 24;

/// `B_{2j} / (2j)!` for j = 1..=7.
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
];

/// Euler-Maclaurin remainder `R(s, m)` with `zeta(s) = sum_{k<m} k^-s + R(s, m)`.
///
/// Valid for real `s != 1` through analytic continuation, so it also
/// produces partial sums of the divergent series for `0 < s < 1`.
fn em_remainder(s: f64, m: f64) -> f64 {
    let mut acc = m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s);
    // rising factorial s (s+1) ... (s + 2j - 2)
    let mut rising = s;
    let mut m_pow = m.powf(-s - 1.0);
    for (j, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        acc += coeff * rising * m_pow;
        let k = 2.0 * j as f64;
        rising *= (s + k + 1.0) * (s + k + 2.0);
        m_pow /= m * m;
    }
    acc
}

/// Riemann zeta for real `s > 0`, `s != 1`.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 0.0) || s == 1.0 || !s.is_finite() {
        return Err(domain(format!("zeta needs real s > 0, s != 1 (got {s})")));
    }
    let head: f64 = (1..EM_CUTOFF).map(|k| (k as f64).powf(-s)).sum();
    Ok(head + em_remainder(s, EM_CUTOFF as f64))
}

/// `sum_{k=1}^{n} k^{-s}` for any real `s != 1` (exact summation for small `n`).
pub fn power_sum(s: f64, n: u64) -> Result<f64> {
    if n < 4 * EM_CUTOFF {
        return Ok((1..=n).map(|k| (k as f64).powf(-s)).sum());
    }
    Ok(zeta(s)? - em_remainder(s, (n + 1) as f64))
}

/// `sum_{k > n} k^{-s}` for `s > 1`.
pub fn power_tail(s: f64, n: u64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::Divergence(format!("sum k^-{s} diverges")));
    }
    if n < 4 * EM_CUTOFF {
        return Ok(zeta(s)? - power_sum(s, n)?);
    }
    Ok(em_remainder(s, (n + 1) as f64))
}

/// `e^x Gamma(a, x)` for `a > 0`, `x > 0`.
///
/// Lentz continued fraction when `x >= a + 1`, otherwise `e^x Gamma(a)` minus
/// the lower-gamma series. The scaling keeps `x` in the thousands finite.
pub fn upper_gamma_scaled(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !(x > 0.0) {
        return Err(domain(format!("upper incomplete gamma needs a, x > 0 (a={a}, x={x})")));
    }
    if x >= a + 1.0 {
        Ok(x.powf(a) * upper_gamma_cf(a, x)?)
    } else {
        // e^x gamma(a, x) = x^a sum_n x^n / (a (a+1) ... (a+n))
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        let mut converged = false;
        for _ in 0..GAMMA_MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * GAMMA_REL_TOL * 1e-3 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!("lower gamma series stalled (a={a}, x={x})")));
        }
        Ok((x + ln_gamma(a)).exp() - x.powf(a) * sum)
    }
}

/// Continued fraction `Gamma(a, x) e^x x^{-a}` (modified Lentz).
fn upper_gamma_cf(a: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < GAMMA_REL_TOL * 1e-3 {
            return Ok(h);
        }
    }
    Err(Error::Numerical(format!("incomplete gamma continued fraction stalled (a={a}, x={x})")))
}
