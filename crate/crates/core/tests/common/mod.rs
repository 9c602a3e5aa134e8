#![allow(dead_code)]

pub mod oracle;

use coopnet::config::SimConfig;
use coopnet::strategy::{Strategy, StrategyKind};

/// Table-I parameters with 100 topologies and 300 iterations.
pub fn desk_config() -> SimConfig {
    SimConfig {
        topologies: 100,
        iterations: 300,
        strategy: StrategyKind::new(Strategy::Def),
        ..SimConfig::default()
    }
}

/// A configuration small enough for CLI and determinism tests.
pub fn tiny_config() -> SimConfig {
    SimConfig {
        nodes: 8,
        slots_per_iteration: 40,
        iterations: 6,
        topologies: 3,
        ..SimConfig::default()
    }
}
