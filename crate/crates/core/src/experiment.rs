//! Batch orchestration and report files.
//!
//! Every invocation builds its topology set and the DEF baseline itself, so
//! all strategies in one invocation share the same topologies and traffic.
//! Topology runs fan out over the rayon pool; results are collected in
//! topology order, so parallelism never changes the output.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::SimConfig;
use crate::engine::{run_simulation, run_simulation_observed, RunResult};
use crate::error::{Error, Result};
use crate::geometry::Topology;
use crate::metrics::{aggregate, normalization_constant, MetricsReport};
use crate::seed::{stream_rng, Stream};
use crate::strategy::Strategy;

pub const SUMMARY_CSV: &str = "summary.csv";
pub const PER_NODE_CSV: &str = "per_node.csv";
pub const RADIUS_CURVES_CSV: &str = "radius_curves.csv";
pub const NU_SWEEP_CSV: &str = "nu_sweep.csv";

pub fn build_topologies(cfg: &SimConfig) -> Result<Vec<Topology>> {
    (0..cfg.topologies)
        .map(|t| {
            let mut rng = stream_rng(cfg.master_seed, t as u64, Stream::Topology);
            Topology::generate(cfg.nodes, cfg.radius, &mut rng)
        })
        .collect()
}

/// Runs `variant` on every topology with that topology's traffic and
/// seeding substreams.
pub fn run_batch(cfg: &SimConfig, topologies: &[Topology], variant: Strategy) -> Result<Vec<RunResult>> {
    let engine_cfg = cfg.engine_config(variant)?;
    topologies
        .par_iter()
        .enumerate()
        .map(|(t, topo)| {
            let mut traffic = stream_rng(cfg.master_seed, t as u64, Stream::Traffic);
            let mut seeding = stream_rng(cfg.master_seed, t as u64, Stream::Seeding);
            Ok(run_simulation(&engine_cfg, topo, &mut traffic, &mut seeding)?.with_topology_id(t))
        })
        .collect()
}

/// Reports for a set of strategies normalized against a shared baseline.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub topologies: Vec<Topology>,
    pub norm: f64,
    pub reports: Vec<MetricsReport>,
}

impl Evaluation {
    pub fn report(&self, variant: Strategy) -> Option<&MetricsReport> {
        self.reports.iter().find(|r| r.strategy == variant)
    }
}

fn baseline(cfg: &SimConfig, topologies: &[Topology]) -> Result<(Vec<RunResult>, f64)> {
    let def_runs = run_batch(cfg, topologies, Strategy::Def)?;
    let norm = normalization_constant(&def_runs)?;
    Ok((def_runs, norm))
}

/// Runs the DEF baseline, then every requested strategy on the same seeds.
pub fn evaluate(cfg: &SimConfig, strategies: &[Strategy]) -> Result<Evaluation> {
    cfg.validate()?;
    let topologies = build_topologies(cfg)?;
    let (def_runs, norm) = baseline(cfg, &topologies)?;
    let mut reports = Vec::with_capacity(strategies.len());
    for &s in strategies {
        let runs = if s == Strategy::Def {
            def_runs.clone()
        } else {
            run_batch(cfg, &topologies, s)?
        };
        reports.push(aggregate(&runs, &topologies, norm, cfg.bins)?);
    }
    Ok(Evaluation {
        topologies,
        norm,
        reports,
    })
}

/// Runs the configured strategy once per `nu`, normalized against one
/// baseline. DEF never relays, so its energy does not depend on `nu`.
pub fn sweep_nu(cfg: &SimConfig, nu_values: &[f64]) -> Result<Vec<(f64, MetricsReport)>> {
    cfg.validate()?;
    if nu_values.is_empty() {
        return Err(Error::ConfigValue {
            key: "nu_values".into(),
            message: "no values to sweep".into(),
        });
    }
    if let Some(bad) = nu_values.iter().find(|&&v| !(v > 0.0 && v < 1.0)) {
        return Err(Error::ConfigValue {
            key: "nu_values".into(),
            message: format!("{bad} is outside (0, 1)"),
        });
    }
    let topologies = build_topologies(cfg)?;
    let (_, norm) = baseline(cfg, &topologies)?;
    nu_values
        .iter()
        .map(|&nu| {
            let point = SimConfig { nu, ..cfg.clone() };
            let runs = run_batch(&point, &topologies, cfg.strategy.variant)?;
            Ok((nu, aggregate(&runs, &topologies, norm, cfg.bins)?))
        })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    body(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn write_summary(path: &Path, reports: &[MetricsReport]) -> Result<()> {
    write_file(path, |w| {
        writeln!(w, "strategy,mean_E,std_E")?;
        for r in reports {
            writeln!(w, "{},{},{}", r.strategy.label(), r.mean_energy, r.std_energy)?;
        }
        Ok(())
    })
}

pub fn write_per_node(path: &Path, report: &MetricsReport) -> Result<()> {
    write_file(path, |w| {
        writeln!(w, "topology_id,node_id,dist_center,normalized_energy,coop_frequency")?;
        for r in &report.per_node_records {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.topology_id, r.node_id, r.dist_center, r.normalized_energy, r.coop_frequency
            )?;
        }
        Ok(())
    })
}

pub fn write_radius_curves(path: &Path, reports: &[MetricsReport]) -> Result<()> {
    write_file(path, |w| {
        writeln!(w, "bin_center,strategy,mean_energy,mean_coop_frequency,count")?;
        for r in reports {
            for b in &r.bins {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    b.center,
                    r.strategy.label(),
                    b.mean_energy,
                    b.mean_coop_frequency,
                    b.count
                )?;
            }
        }
        Ok(())
    })
}

pub fn write_nu_sweep(path: &Path, points: &[(f64, MetricsReport)]) -> Result<()> {
    write_file(path, |w| {
        writeln!(w, "nu,strategy,mean_E")?;
        for (nu, r) in points {
            writeln!(w, "{nu},{},{}", r.strategy.label(), r.mean_energy)?;
        }
        Ok(())
    })
}

/// Per-slot log of topology 0 under `variant`, plus that topology's nodes.
pub fn write_trace(cfg: &SimConfig, topology: &Topology, variant: Strategy, dir: &Path) -> Result<()> {
    let engine_cfg = cfg.engine_config(variant)?;
    let path = dir.join(format!("trace_{}.csv", variant.as_str()));
    let mut w = create(&path)?;
    let mut io_result = writeln!(w, "iteration,slot,tx,rx,relay,tx_power,relay_power");
    run_simulation_observed(
        &engine_cfg,
        topology,
        &mut stream_rng(cfg.master_seed, 0, Stream::Traffic),
        &mut stream_rng(cfg.master_seed, 0, Stream::Seeding),
        |n, t, o| {
            if io_result.is_ok() {
                let relay = o.relay.map(|c| c.to_string()).unwrap_or_default();
                io_result = writeln!(
                    w,
                    "{n},{t},{},{},{relay},{},{}",
                    o.transmitter, o.receiver, o.transmitter_power, o.relay_power
                );
            }
        },
    )?;
    io_result.and_then(|_| w.flush()).map_err(|e| Error::io(&path, e))?;
    let topo_path = dir.join("topology_0.csv");
    write_file(&topo_path, |w| topology.write_csv(w))
}

fn prepare_out_dir(cfg: &SimConfig) -> Result<PathBuf> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    Ok(cfg.out_dir.clone())
}

fn write_traces(cfg: &SimConfig, eval: &Evaluation, dir: &Path) -> Result<()> {
    if cfg.trace {
        for r in &eval.reports {
            write_trace(cfg, &eval.topologies[0], r.strategy, dir)?;
        }
    }
    Ok(())
}

fn log_summary(r: &MetricsReport) {
    eprintln!(
        "{:>5}: mean_E {:.5}  std_E {:.5}  coop {:.3}",
        r.strategy.label(),
        r.mean_energy,
        r.std_energy,
        r.mean_coop_frequency()
    );
}

/// `run`: baseline plus the configured strategy; writes the three reports.
pub fn cmd_run(cfg: &SimConfig) -> Result<Evaluation> {
    let dir = prepare_out_dir(cfg)?;
    eprintln!(
        "running {} on {} topologies ({} iterations x {} slots)",
        cfg.strategy.variant, cfg.topologies, cfg.iterations, cfg.slots_per_iteration
    );
    let eval = evaluate(cfg, &[cfg.strategy.variant])?;
    let report = &eval.reports[0];
    log_summary(report);
    write_summary(&dir.join(SUMMARY_CSV), std::slice::from_ref(report))?;
    write_per_node(&dir.join(PER_NODE_CSV), report)?;
    write_radius_curves(&dir.join(RADIUS_CURVES_CSV), std::slice::from_ref(report))?;
    write_traces(cfg, &eval, &dir)?;
    Ok(eval)
}

/// `compare`: all four strategies on the shared seed set. Per-node records
/// go to one `per_node_<strategy>.csv` per strategy.
pub fn cmd_compare(cfg: &SimConfig) -> Result<Evaluation> {
    let dir = prepare_out_dir(cfg)?;
    eprintln!(
        "comparing all strategies on {} topologies ({} iterations x {} slots)",
        cfg.topologies, cfg.iterations, cfg.slots_per_iteration
    );
    let eval = evaluate(cfg, &Strategy::ALL)?;
    for r in &eval.reports {
        log_summary(r);
        write_per_node(&dir.join(format!("per_node_{}.csv", r.strategy.as_str())), r)?;
    }
    write_summary(&dir.join(SUMMARY_CSV), &eval.reports)?;
    write_radius_curves(&dir.join(RADIUS_CURVES_CSV), &eval.reports)?;
    write_traces(cfg, &eval, &dir)?;
    Ok(eval)
}

/// `sweep-nu`: the configured strategy over `cfg.nu_values`.
pub fn cmd_sweep_nu(cfg: &SimConfig) -> Result<Vec<(f64, MetricsReport)>> {
    let dir = prepare_out_dir(cfg)?;
    eprintln!(
        "sweeping nu over {:?} for {} on {} topologies",
        cfg.nu_values, cfg.strategy.variant, cfg.topologies
    );
    let points = sweep_nu(cfg, &cfg.nu_values)?;
    for (nu, r) in &points {
        eprintln!("  nu {nu}: mean_E {:.5}", r.mean_energy);
    }
    write_nu_sweep(&dir.join(NU_SWEEP_CSV), &points)?;
    Ok(points)
}
