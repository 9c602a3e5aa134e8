//! Aggregation of runs into normalized energy statistics, radius-binned
//! curves and cooperation frequencies.
//!
//! Energies are expressed relative to the mean per-node energy of the
//! all-defector baseline on the same topologies and traffic. Records are
//! always reduced in `(topology_id, node_id)` order, so results do not
//! depend on the order runs arrive in.

use crate::engine::RunResult;
use crate::error::{Error, Result};
use crate::geometry::Topology;
use crate::strategy::Strategy;

pub const DEFAULT_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeRecord {
    pub topology_id: usize,
    pub node_id: usize,
    pub dist_center: f64,
    pub normalized_energy: f64,
    pub coop_frequency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusBin {
    pub center: f64,
    pub mean_energy: f64,
    pub mean_coop_frequency: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub strategy: Strategy,
    pub mean_energy: f64,
    pub std_energy: f64,
    /// Non-empty equal-width radial bins, by increasing center.
    pub bins: Vec<RadiusBin>,
    pub per_node_records: Vec<NodeRecord>,
}

impl MetricsReport {
    pub fn radius_energy_curve(&self) -> Vec<(f64, f64)> {
        self.bins.iter().map(|b| (b.center, b.mean_energy)).collect()
    }

    pub fn radius_coop_curve(&self) -> Vec<(f64, f64)> {
        self.bins.iter().map(|b| (b.center, b.mean_coop_frequency)).collect()
    }

    pub fn mean_coop_frequency(&self) -> f64 {
        mean(self.per_node_records.iter().map(|r| r.coop_frequency))
    }

    /// Largest minus smallest bin mean of the energy curve.
    pub fn energy_curve_span(&self) -> f64 {
        span(self.bins.iter().map(|b| b.mean_energy))
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

fn span(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    hi - lo
}

fn sorted(runs: &[RunResult]) -> Vec<&RunResult> {
    let mut v: Vec<&RunResult> = runs.iter().collect();
    v.sort_by_key(|r| r.topology_id);
    v
}

/// Mean over every (topology, node) of total energy, summed in canonical order.
fn pooled_mean_energy(runs: &[RunResult]) -> f64 {
    mean(
        sorted(runs)
            .into_iter()
            .flat_map(|r| r.final_states.iter().map(|s| s.total_energy)),
    )
}

/// Mean per-node energy of the baseline runs; the unit of every report.
pub fn normalization_constant(def_runs: &[RunResult]) -> Result<f64> {
    if def_runs.is_empty() {
        return Err(Error::InvalidConfig("no baseline runs to normalize against".into()));
    }
    if let Some(r) = def_runs.iter().find(|r| r.strategy != Strategy::Def) {
        return Err(Error::InvalidConfig(format!(
            "baseline run for topology {} used {}, expected DEF",
            r.topology_id, r.strategy
        )));
    }
    let norm = pooled_mean_energy(def_runs);
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidConfig(format!("degenerate baseline energy {norm}")));
    }
    Ok(norm)
}

/// Fraction of the run's iterations node `node` spent cooperating.
pub fn cooperation_frequency(run: &RunResult, node: usize) -> f64 {
    f64::from(run.final_states[node].coop_iterations) / run.iterations as f64
}

/// Pools all per-node records of `runs` and bins them by distance from the
/// center. `topologies[id]` must be the topology of the run with
/// `topology_id == id`.
pub fn aggregate(runs: &[RunResult], topologies: &[Topology], norm: f64, bins: usize) -> Result<MetricsReport> {
    let first = runs
        .first()
        .ok_or_else(|| Error::InvalidConfig("no runs to aggregate".into()))?;
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidConfig(format!("normalization constant must be positive, got {norm}")));
    }
    if bins < 1 {
        return Err(Error::InvalidConfig("need at least one radial bin".into()));
    }
    let strategy = first.strategy;
    let mut records = Vec::new();
    let mut radius: f64 = 0.0;
    for run in sorted(runs) {
        if run.strategy != strategy {
            return Err(Error::InvalidConfig(format!(
                "mixed strategies in one aggregate: {strategy} and {}",
                run.strategy
            )));
        }
        let topo = topologies.get(run.topology_id).ok_or_else(|| {
            Error::InvalidConfig(format!("no topology for run {}", run.topology_id))
        })?;
        if topo.node_count() != run.node_count() {
            return Err(Error::InvalidConfig(format!(
                "topology {} has {} nodes but its run has {}",
                run.topology_id,
                topo.node_count(),
                run.node_count()
            )));
        }
        radius = radius.max(topo.radius());
        for (node_id, state) in run.final_states.iter().enumerate() {
            records.push(NodeRecord {
                topology_id: run.topology_id,
                node_id,
                dist_center: topo.distance_to_center(node_id)?,
                normalized_energy: state.total_energy / norm,
                coop_frequency: cooperation_frequency(run, node_id),
            });
        }
    }

    let mean_energy = pooled_mean_energy(runs) / norm;
    let centred = mean(records.iter().map(|r| r.normalized_energy));
    let std_energy = mean(records.iter().map(|r| (r.normalized_energy - centred).powi(2))).sqrt();

    let width = radius / bins as f64;
    let mut acc = vec![(0.0, 0.0, 0usize); bins];
    for r in &records {
        let k = ((r.dist_center / width) as usize).min(bins - 1);
        acc[k].0 += r.normalized_energy;
        acc[k].1 += r.coop_frequency;
        acc[k].2 += 1;
    }
    let bins = acc
        .into_iter()
        .enumerate()
        .filter(|(_, (_, _, n))| *n > 0)
        .map(|(k, (e, f, n))| RadiusBin {
            center: (k as f64 + 0.5) * width,
            mean_energy: e / n as f64,
            mean_coop_frequency: f / n as f64,
            count: n,
        })
        .collect();

    Ok(MetricsReport {
        strategy,
        mean_energy,
        std_energy,
        bins,
        per_node_records: records,
    })
}
