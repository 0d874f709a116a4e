//! Replicate-parallel Monte Carlo of the partial-sum process.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{PathEnsemble, SimulationPlan};
use crate::distributions::CouplingSampler;
use crate::engine::kernel::select_kernel;
use crate::error::Result;
use crate::rng::Stream;

/// Simulates `S_n(t) / A_n`. Replicate `r` draws its `n + J` innovations from
/// stream `(seed, r)`, so results do not depend on the worker count.
pub fn simulate(plan: &SimulationPlan) -> Result<PathEnsemble> {
    plan.validate()?;
    let setup = plan.kernel_setup();
    let kernel = select_kernel(&plan.kernel, &setup)?;
    let prepared = kernel.prepare(&setup)?;
    let norm = plan.normalizer()?;
    let count = setup.innovation_count();
    let mu = plan.params.mean();
    let grid = plan.t_grid.len();
    let values = (0..plan.replicates)
        .into_par_iter()
        .map(|r| {
            let mut stream = Stream::new(plan.seed, r as u64);
            let xi: Vec<f64> = (0..count).map(|_| plan.params.sample(&mut stream) - mu).collect();
            let mut row = vec![0.0; grid];
            prepared.evaluate(&xi, &mut row);
            row.iter_mut().for_each(|v| *v /= norm);
            row
        })
        .collect();
    Ok(PathEnsemble {
        plan: plan.clone(),
        values,
        normalization_used: norm,
        kernel: kernel.name().to_string(),
    })
}

/// Partial sums driven by untapered Pareto innovations (`pareto`) and by the
/// tapered innovations built from the same draws (`tapered`), normalized by
/// the same `A_n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoupledEnsembles {
    pub pareto: PathEnsemble,
    pub tapered: PathEnsemble,
    /// Per replicate: number of innovations with `theta >= b`.
    pub exceedances: Vec<usize>,
}

pub fn simulate_coupled(plan: &SimulationPlan) -> Result<CoupledEnsembles> {
    plan.validate()?;
    let sampler = CouplingSampler::new(plan.params)?;
    let setup = plan.kernel_setup();
    let kernel = select_kernel(&plan.kernel, &setup)?;
    let prepared = kernel.prepare(&setup)?;
    let norm = plan.normalizer()?;
    let count = setup.innovation_count();
    let grid = plan.t_grid.len();
    let b = plan.b();
    let rows: Vec<(Vec<f64>, Vec<f64>, usize)> = (0..plan.replicates)
        .into_par_iter()
        .map(|r| {
            let mut stream = Stream::new(plan.seed, r as u64);
            let mut eta = Vec::with_capacity(count);
            let mut xi = Vec::with_capacity(count);
            let mut exceed = 0;
            for _ in 0..count {
                let d = sampler.sample(&mut stream);
                eta.push(d.eta);
                xi.push(d.xi);
                exceed += usize::from(d.theta >= b);
            }
            let mut v = vec![0.0; grid];
            let mut s = vec![0.0; grid];
            prepared.evaluate(&eta, &mut v);
            prepared.evaluate(&xi, &mut s);
            v.iter_mut().chain(s.iter_mut()).for_each(|x| *x /= norm);
            (v, s, exceed)
        })
        .collect();
    let mut pareto = Vec::with_capacity(rows.len());
    let mut tapered = Vec::with_capacity(rows.len());
    let mut exceedances = Vec::with_capacity(rows.len());
    for (v, s, e) in rows {
        pareto.push(v);
        tapered.push(s);
        exceedances.push(e);
    }
    let make = |values| PathEnsemble {
        plan: plan.clone(),
        values,
        normalization_used: norm,
        kernel: kernel.name().to_string(),
    };
    Ok(CoupledEnsembles {
        pareto: make(pareto),
        tapered: make(tapered),
        exceedances,
    })
}
