use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coopnet::config::{parse_config, ConfigOverrides, SimConfig};
use coopnet::experiment::{cmd_compare, cmd_run, cmd_sweep_nu};
use coopnet::strategy::{ImprovementMode, Strategy};

/// Energy consumption of cooperative relaying in decentralized wireless networks.
#[derive(Debug, Parser)]
#[command(name = "coopnet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one strategy against the DEF baseline.
    Run(Common),
    /// Run all four strategies on a shared seed set.
    Compare(Common),
    /// Sweep the range-reduction factor for the configured strategy.
    SweepNu(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// `key = value` configuration file; flags take precedence over it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// def, coop, tft or wsls.
    #[arg(long)]
    strategy: Option<Strategy>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    /// Path-loss exponent.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    /// Slots per iteration.
    #[arg(long)]
    slots: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    topologies: Option<usize>,
    /// Master seed; falls back to COOPNET_SEED, then 1.
    #[arg(long)]
    seed: Option<u64>,
    /// literal or differential.
    #[arg(long)]
    improvement_mode: Option<ImprovementMode>,
    /// Whether an unchanged fitness counts as an improvement.
    #[arg(long, value_name = "BOOL", action = clap::ArgAction::Set)]
    tie_improves: Option<bool>,
    /// Number of radial bins in radius_curves.csv.
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Write a per-slot log of topology 0 for every strategy run.
    #[arg(long)]
    trace: bool,
    /// Comma-separated grid for sweep-nu.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    nu_values: Option<Vec<f64>>,
}

impl Common {
    fn resolve(&self) -> coopnet::Result<SimConfig> {
        let overrides = ConfigOverrides {
            strategy: self.strategy,
            nodes: self.nodes,
            radius: self.radius,
            alpha: self.alpha,
            nu: self.nu,
            slots: self.slots,
            iterations: self.iterations,
            topologies: self.topologies,
            seed: self.seed,
            improvement_mode: self.improvement_mode,
            tie_improves: self.tie_improves,
            bins: self.bins,
            out_dir: self.out_dir.clone(),
            trace: self.trace.then_some(true),
            nu_values: self.nu_values.clone(),
        };
        parse_config(self.config.as_deref(), &overrides)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(c) => c.resolve().and_then(|cfg| cmd_run(&cfg).map(drop)),
        Command::Compare(c) => c.resolve().and_then(|cfg| cmd_compare(&cfg).map(drop)),
        Command::SweepNu(c) => c.resolve().and_then(|cfg| cmd_sweep_nu(&cfg).map(drop)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
