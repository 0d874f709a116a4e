use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde_json::json;
use taperlin_core::distributions::TaperedParetoParams;
use taperlin_core::engine::{simulate, CSV_LAYOUT};
use taperlin_core::regimes::{classify, RegimeParams};
use taperlin_core::rng::Stream;
use taperlin_core::suites::{run_suite, suite_registry, SuiteContext, SuiteReport};
use taperlin_core::VERSION;

use crate::config::{Format, RunConfig};
use crate::{resolve_config, Cli, Command, EXIT_FAILED};

pub fn dispatch(cli: Cli) -> Result<u8> {
    let file = match &cli.command {
        Command::Simulate(a) => a.file.clone(),
        _ => None,
    };
    let cfg = resolve_config(&cli, file.as_ref())?;
    if cfg.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build_global()
            .context("cannot configure worker threads")?;
    }
    match cli.command {
        Command::Classify(a) => {
            let p = RegimeParams::new(a.alpha, a.beta, a.gamma, a.zero_sum)?;
            emit(&serde_json::to_string_pretty(&classify(&p)?)?);
            Ok(0)
        }
        Command::Moments(a) => {
            let m = &cfg.moments;
            let p = TaperedParetoParams::new(a.alpha.unwrap_or(m.alpha), a.b.unwrap_or(m.b))?;
            let orders = a.orders.unwrap_or_else(|| m.orders.clone());
            let rows = orders
                .iter()
                .map(|&r| {
                    let exact = p.moment(r)?;
                    let asymptotic = p.moment_asymptotic(r);
                    Ok(json!({
                        "r": r,
                        "exact": exact,
                        "quadrature": p.moment_by_quadrature(r)?,
                        "asymptotic": asymptotic,
                        "ratio": exact / asymptotic,
                    }))
                })
                .collect::<taperlin_core::Result<Vec<_>>>()?;
            let out = json!({ "alpha": p.alpha(), "b": p.b(), "moments": rows });
            emit(&serde_json::to_string_pretty(&out)?);
            Ok(0)
        }
        Command::Sample(a) => {
            let s = &cfg.sample;
            let p = TaperedParetoParams::new(a.alpha.unwrap_or(s.alpha), a.b.unwrap_or(s.b))?;
            let mut stream = Stream::new(cfg.seed, 0);
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            let written: std::io::Result<()> = (|| {
                for _ in 0..a.count.unwrap_or(s.count) {
                    writeln!(w, "{}", p.sample(&mut stream))?;
                }
                w.flush()
            })();
            match written {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(0),
            }
        }
        Command::Simulate(a) => {
            let mut sim = cfg.simulate.clone();
            if let Some(r) = a.replicates {
                sim.replicates = r;
            }
            if let Some(n) = a.n {
                sim.n = n;
            }
            if let Some(k) = a.kernel {
                sim.kernel = k;
            }
            cmd_simulate(&cfg, &sim)
        }
        Command::Verify(a) => {
            let registry = suite_registry();
            if registry.get(&a.suite).is_err() {
                bail!("unknown suite `{}` (available: {})", a.suite, registry.names().join(", "));
            }
            let ctx = SuiteContext {
                seed: cfg.seed,
                fast: a.fast || cfg.verify.fast,
                tolerances: cfg.verify.tolerances.clone(),
            };
            let report = run_suite(&a.suite, &ctx)?;
            for r in &report.reports {
                eprintln!("{}", r.summary());
            }
            fs::create_dir_all(&cfg.out_dir)
                .with_context(|| format!("cannot create {}", cfg.out_dir.display()))?;
            let path = cfg.out_dir.join(format!("verify-{}.json", a.suite));
            serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), &report)?;
            emit(&serde_json::to_string_pretty(&report)?);
            Ok(if report.pass() { 0 } else { EXIT_FAILED })
        }
        Command::Report(a) => cmd_report(a.dir.as_deref().unwrap_or(&cfg.out_dir)),
    }
}

fn cmd_simulate(cfg: &RunConfig, sim: &crate::config::SimulateConfig) -> Result<u8> {
    let plan = sim.plan(cfg.seed)?;
    let start = Instant::now();
    let ens = simulate(&plan)?;
    let wall = start.elapsed().as_secs_f64();
    fs::create_dir_all(&cfg.out_dir).with_context(|| format!("cannot create {}", cfg.out_dir.display()))?;
    let mut files = Vec::new();
    for f in &cfg.formats {
        let (ext, path) = match f {
            Format::Csv => ("csv", cfg.out_dir.join(format!("{}.csv", sim.name))),
            Format::Json => ("json", cfg.out_dir.join(format!("{}.json", sim.name))),
        };
        let w = BufWriter::new(File::create(&path).with_context(|| format!("cannot write {}", path.display()))?);
        match f {
            Format::Csv => ens.write_csv(w)?,
            Format::Json => ens.write_json(w)?,
        }
        files.push(json!({ "format": ext, "path": path.file_name().map(|s| s.to_string_lossy()) }));
    }
    let manifest = json!({
        "layout": CSV_LAYOUT,
        "version": VERSION,
        "seed": plan.seed,
        "b": plan.b(),
        "kernel": ens.kernel,
        "normalization_used": ens.normalization_used,
        "wall_time_secs": wall,
        "plan": plan,
        "files": files,
    });
    let path = cfg.out_dir.join(format!("{}.manifest.json", sim.name));
    serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), &manifest)?;
    emit(&path.display().to_string());
    Ok(0)
}

fn cmd_report(dir: &Path) -> Result<u8> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("cannot read {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("verify-") && n.ends_with(".json"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no verify-*.json reports in {}", dir.display());
    }
    let mut all_pass = true;
    for p in &paths {
        let report: SuiteReport = serde_json::from_reader(File::open(p)?)
            .with_context(|| format!("cannot parse {}", p.display()))?;
        let failed: Vec<&str> = report.failures().map(|r| r.name.as_str()).collect();
        all_pass &= failed.is_empty();
        emit(&format!(
            "{} {}: {}/{} checks pass{} ({:.1}s)",
            if failed.is_empty() { "PASS" } else { "FAIL" },
            report.suite,
            report.reports.len() - failed.len(),
            report.reports.len(),
            if report.fast { ", fast" } else { "" },
            report.elapsed_secs
        ));
        for name in &failed {
            emit(&format!("    failing: {name}"));
        }
    }
    Ok(if all_pass { 0 } else { EXIT_FAILED })
}

/// Prints a line to standard output; a closed pipe is not an error.
fn emit(line: &str) {
    let _ = writeln!(std::io::stdout(), "{line}");
}
