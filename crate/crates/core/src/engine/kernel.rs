//! Interchangeable algorithms evaluating `S_n(t)` on a grid from one
//! realisation of the innovations.
//!
//! Innovation layout: `xi[i]` holds `xi_{i + 1 - J}`, `i = 0 .. n + J`, and
//! the filter is truncated to lags `0..=J`.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::dcoef::d_from_partial_sums;
use crate::error::Result;
use crate::registry::{Named, Registry};

/// Everything a kernel needs to know about the plan.
#[derive(Clone, Debug)]
pub struct KernelSetup {
    /// `a_0 ..= a_J`.
    pub coeffs: Vec<f64>,
    /// `P_k = a_0 + ... + a_k`, `k = 0 ..= J`.
    pub partial: Vec<f64>,
    pub n: u64,
    pub horizon: u64,
    /// `[n t]` per grid point.
    pub grid_m: Vec<u64>,
}

impl KernelSetup {
    pub fn innovation_count(&self) -> usize {
        (self.n + self.horizon) as usize
    }

    fn m_max(&self) -> usize {
        self.grid_m.iter().copied().max().unwrap_or(0) as usize
    }
}

pub trait PartialSumKernel: Named + Send + Sync {
    /// Rough operation count per replicate, used by `auto` selection.
    fn cost(&self, setup: &KernelSetup) -> f64;
    fn prepare(&self, setup: &KernelSetup) -> Result<Box<dyn PreparedKernel>>;
}

pub trait PreparedKernel: Send + Sync {
    /// Writes `S_n(t_g)` for every grid point into `out`.
    fn evaluate(&self, xi: &[f64], out: &mut [f64]);
}

/// Inner product of the innovations with precomputed `d_{n,j,t}`.
pub struct DCoefKernel;
/// Filter each `X_k` explicitly, then take prefix sums.
pub struct DirectKernel;
/// FFT convolution of filter and innovations, then prefix sums.
pub struct FftKernel;

impl Named for DCoefKernel {
    fn name(&self) -> &'static str {
        "dcoef"
    }
}
impl Named for DirectKernel {
    fn name(&self) -> &'static str {
        "direct"
    }
}
impl Named for FftKernel {
    fn name(&self) -> &'static str {
        "fft"
    }
}

struct PreparedDCoef {
    d: Vec<Vec<f64>>,
}

impl PartialSumKernel for DCoefKernel {
    fn cost(&self, s: &KernelSetup) -> f64 {
        s.grid_m.iter().map(|&m| (m + s.horizon) as f64).sum()
    }

    fn prepare(&self, s: &KernelSetup) -> Result<Box<dyn PreparedKernel>> {
        let d = s
            .grid_m
            .iter()
            .map(|&m| d_from_partial_sums(&s.partial, m, s.horizon))
            .collect();
        Ok(Box::new(PreparedDCoef { d }))
    }
}

impl PreparedKernel for PreparedDCoef {
    fn evaluate(&self, xi: &[f64], out: &mut [f64]) {
        for (o, d) in out.iter_mut().zip(&self.d) {
            *o = d.iter().zip(xi).map(|(a, b)| a * b).sum();
        }
    }
}

/// Shared final step: prefix sums of `X_1..X_m` read off at the grid.
fn accumulate(x_of_k: impl Fn(usize) -> f64, grid_m: &[u64], m_max: usize, out: &mut [f64]) {
    let mut order: Vec<usize> = (0..grid_m.len()).collect();
    order.sort_by_key(|&g| grid_m[g]);
    let mut acc = 0.0;
    let mut k = 0usize;
    for g in order {
        let target = grid_m[g] as usize;
        while k < target.min(m_max) {
            k += 1;
            acc += x_of_k(k);
        }
        out[g] = acc;
    }
}

struct PreparedDirect {
    coeffs: Vec<f64>,
    horizon: usize,
    grid_m: Vec<u64>,
    m_max: usize,
}

impl PartialSumKernel for DirectKernel {
    fn cost(&self, s: &KernelSetup) -> f64 {
        s.m_max() as f64 * (s.horizon + 1) as f64
    }

    fn prepare(&self, s: &KernelSetup) -> Result<Box<dyn PreparedKernel>> {
        Ok(Box::new(PreparedDirect {
            coeffs: s.coeffs.clone(),
            horizon: s.horizon as usize,
            grid_m: s.grid_m.clone(),
            m_max: s.m_max(),
        }))
    }
}

impl PreparedKernel for PreparedDirect {
    fn evaluate(&self, xi: &[f64], out: &mut [f64]) {
        let j = self.horizon;
        let x_of_k = |k: usize| -> f64 {
            // xi_{k - l} sits at index k - l + J - 1
            let top = k + j - 1;
            self.coeffs.iter().enumerate().map(|(l, a)| a * xi[top - l]).sum()
        };
        accumulate(x_of_k, &self.grid_m, self.m_max, out);
    }
}

struct PreparedFft {
    size: usize,
    horizon: usize,
    grid_m: Vec<u64>,
    m_max: usize,
    filter_hat: Vec<Complex<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftKernel {
    fn size(s: &KernelSetup) -> usize {
        (s.m_max() + s.horizon as usize + 1).next_power_of_two()
    }
}

impl PartialSumKernel for FftKernel {
    fn cost(&self, s: &KernelSetup) -> f64 {
        let size = Self::size(s) as f64;
        // two complex transforms plus the pointwise product
        2.0 * 5.0 * size * size.log2() + 6.0 * size
    }

    fn prepare(&self, s: &KernelSetup) -> Result<Box<dyn PreparedKernel>> {
        let size = Self::size(s);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        let mut filter_hat = vec![Complex::new(0.0, 0.0); size];
        for (slot, &a) in filter_hat.iter_mut().zip(&s.coeffs) {
            slot.re = a;
        }
        forward.process(&mut filter_hat);
        Ok(Box::new(PreparedFft {
            size,
            horizon: s.horizon as usize,
            grid_m: s.grid_m.clone(),
            m_max: s.m_max(),
            filter_hat,
            forward,
            inverse,
        }))
    }
}

impl PreparedKernel for PreparedFft {
    fn evaluate(&self, xi: &[f64], out: &mut [f64]) {
        // Only xi up to index m_max + J - 1 enters X_1..X_m_max; with
        // size >= m_max + J + 1 the circular wrap lands below index J.
        let used = (self.m_max + self.horizon).min(xi.len());
        let mut buf = vec![Complex::new(0.0, 0.0); self.size];
        for (slot, &x) in buf.iter_mut().zip(&xi[..used]) {
            slot.re = x;
        }
        self.forward.process(&mut buf);
        for (b, f) in buf.iter_mut().zip(&self.filter_hat) {
            *b *= f;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.size as f64;
        let j = self.horizon;
        accumulate(|k| buf[k + j - 1].re * scale, &self.grid_m, self.m_max, out);
    }
}

pub fn kernel_registry() -> Registry<dyn PartialSumKernel> {
    let mut r: Registry<dyn PartialSumKernel> = Registry::new("partial-sum kernel");
    r.register(Arc::new(DCoefKernel));
    r.register(Arc::new(DirectKernel));
    r.register(Arc::new(FftKernel));
    r
}

/// Resolves a kernel name; `auto` picks the cheapest by [`PartialSumKernel::cost`].
pub fn select_kernel(name: &str, setup: &KernelSetup) -> Result<Arc<dyn PartialSumKernel>> {
    let registry = kernel_registry();
    if name == "auto" {
        let best = registry
            .iter()
            .min_by(|a, b| a.cost(setup).total_cmp(&b.cost(setup)))
            .cloned()
            .expect("registry is nonempty");
        return Ok(best);
    }
    registry.get(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::FilterSpec;
    use crate::rng::Stream;

    fn setup(filter: &FilterSpec, n: u64, horizon: u64, grid_m: Vec<u64>) -> KernelSetup {
        KernelSetup {
            coeffs: filter.coefficients(horizon as usize + 1),
            partial: filter.partial_sums(horizon as usize + 1),
            n,
            horizon,
            grid_m,
        }
    }

    #[test]
    fn kernels_agree() {
        let filters = [
            FilterSpec::power_law(0.75, 1.0).unwrap(),
            FilterSpec::power_law(1.5, 2.0).unwrap(),
            FilterSpec::zero_sum(1.25).unwrap(),
            FilterSpec::explicit(vec![1.0, -0.5, 0.25]).unwrap(),
        ];
        for f in &filters {
            for &(n, horizon) in &[(64u64, 64u64), (256, 512), (100, 3)] {
                let s = setup(f, n, horizon, vec![n / 4, n / 2, n, 1]);
                let mut stream = Stream::new(5, n);
                let xi: Vec<f64> = (0..s.innovation_count()).map(|_| stream.normal()).collect();
                let mut outs = Vec::new();
                for name in ["dcoef", "direct", "fft"] {
                    let k = select_kernel(name, &s).unwrap().prepare(&s).unwrap();
                    let mut out = vec![0.0; 4];
                    k.evaluate(&xi, &mut out);
                    outs.push(out);
                }
                for o in &outs[1..] {
                    for (a, b) in o.iter().zip(&outs[0]) {
                        assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "{a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn unknown_kernel_lists_alternatives() {
        let s = setup(&FilterSpec::identity(), 8, 1, vec![8]);
        let err = select_kernel("nope", &s).err().unwrap().to_string();
        assert!(err.contains("dcoef") && err.contains("fft"), "{err}");
    }
}
