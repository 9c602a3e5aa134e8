//! Experiment configuration: defaults, `key = value` files, flag overrides.
//!
//! Precedence is flag > file > environment (seed only) > default.

use std::fs;
use std::path::{Path, PathBuf};

use crate::channel::ChannelParams;
use crate::engine::EngineConfig;
use crate::error::{Error, Result};
use crate::metrics::DEFAULT_BINS;
use crate::strategy::{ImprovementMode, Strategy, StrategyKind};

/// Environment variable consulted for the master seed when neither a flag
/// nor the config file sets one.
pub const SEED_ENV: &str = "COOPNET_SEED";

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub nodes: usize,
    pub radius: f64,
    pub pathloss_exponent: f64,
    pub nu: f64,
    pub slots_per_iteration: usize,
    pub iterations: usize,
    pub topologies: usize,
    pub strategy: StrategyKind,
    pub master_seed: u64,
    pub initial_fitness: f64,
    pub bins: usize,
    pub out_dir: PathBuf,
    pub trace: bool,
    /// Grid used by the `sweep-nu` command.
    pub nu_values: Vec<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            nodes: 30,
            radius: 1.0,
            pathloss_exponent: 4.0,
            nu: 0.39,
            slots_per_iteration: 1000,
            iterations: 1000,
            topologies: 1000,
            strategy: StrategyKind::new(Strategy::Def),
            master_seed: DEFAULT_SEED,
            initial_fitness: 0.0,
            bins: DEFAULT_BINS,
            out_dir: PathBuf::from("coopnet-out"),
            trace: false,
            nu_values: (1..=9).map(|k| f64::from(k) / 10.0).collect(),
        }
    }
}

/// Values supplied on the command line; `None` means "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub strategy: Option<Strategy>,
    pub nodes: Option<usize>,
    pub radius: Option<f64>,
    pub alpha: Option<f64>,
    pub nu: Option<f64>,
    pub slots: Option<usize>,
    pub iterations: Option<usize>,
    pub topologies: Option<usize>,
    pub seed: Option<u64>,
    pub improvement_mode: Option<ImprovementMode>,
    pub tie_improves: Option<bool>,
    pub bins: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub trace: Option<bool>,
    pub nu_values: Option<Vec<f64>>,
}

const KEYS: &[&str] = &[
    "nodes",
    "radius",
    "alpha",
    "nu",
    "slots",
    "iterations",
    "topologies",
    "strategy",
    "seed",
    "improvement_mode",
    "tie_improves",
    "initial_fitness",
    "bins",
    "out_dir",
    "trace",
    "nu_values",
];

fn canonical_key(raw: &str) -> Option<&'static str> {
    let k = raw.trim().to_ascii_lowercase().replace('-', "_");
    let k = match k.as_str() {
        "pathloss_exponent" => "alpha",
        "slots_per_iteration" => "slots",
        "master_seed" => "seed",
        "tie_is_improvement" => "tie_improves",
        other => other,
    };
    KEYS.iter().copied().find(|&known| known == k)
}

fn parse<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| format!("cannot parse `{}`: {e}", value.trim()))
}

fn parse_bool(value: &str) -> std::result::Result<bool, String> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(format!("cannot parse `{other}` as a boolean")),
    }
}

pub fn parse_nu_list(value: &str) -> std::result::Result<Vec<f64>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse::<f64>)
        .collect()
}

impl SimConfig {
    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "nodes" => self.nodes = parse(value)?,
            "radius" => self.radius = parse(value)?,
            "alpha" => self.pathloss_exponent = parse(value)?,
            "nu" => self.nu = parse(value)?,
            "slots" => self.slots_per_iteration = parse(value)?,
            "iterations" => self.iterations = parse(value)?,
            "topologies" => self.topologies = parse(value)?,
            "strategy" => self.strategy.variant = parse(value)?,
            "seed" => self.master_seed = parse(value)?,
            "improvement_mode" => self.strategy.improvement_mode = parse(value)?,
            "tie_improves" => self.strategy.tie_is_improvement = parse_bool(value)?,
            "initial_fitness" => self.initial_fitness = parse(value)?,
            "bins" => self.bins = parse(value)?,
            "out_dir" => self.out_dir = PathBuf::from(value.trim()),
            "trace" => self.trace = parse_bool(value)?,
            "nu_values" => self.nu_values = parse_nu_list(value)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    fn check(&self, key: &str) -> std::result::Result<(), String> {
        let ok = match key {
            "nodes" => self.nodes >= 2,
            "radius" => self.radius > 0.0 && self.radius.is_finite(),
            "alpha" => (2.0..=4.0).contains(&self.pathloss_exponent),
            "nu" => self.nu > 0.0 && self.nu < 1.0,
            "slots" => self.slots_per_iteration >= 1,
            "iterations" => self.iterations >= 1,
            "topologies" => self.topologies >= 1,
            "initial_fitness" => self.initial_fitness.is_finite(),
            "bins" => self.bins >= 1,
            "nu_values" => !self.nu_values.is_empty() && self.nu_values.iter().all(|&v| v > 0.0 && v < 1.0),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(match key {
                "nodes" => format!("must be at least 2, got {}", self.nodes),
                "radius" => format!("must be positive, got {}", self.radius),
                "alpha" => format!("must lie in [2, 4], got {}", self.pathloss_exponent),
                "nu" => format!("must lie in (0, 1), got {}", self.nu),
                "slots" | "iterations" | "topologies" | "bins" => "must be at least 1".into(),
                "nu_values" => format!("every value must lie in (0, 1), got {:?}", self.nu_values),
                _ => "invalid value".into(),
            })
        }
    }

    pub fn validate(&self) -> Result<()> {
        for key in KEYS {
            self.check(key).map_err(|message| Error::ConfigValue {
                key: (*key).to_string(),
                message,
            })?;
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, origin: &Path) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |key: &str, message: String| Error::ConfigLine {
                path: origin.to_path_buf(),
                line: idx + 1,
                key: key.to_string(),
                message,
            };
            let (raw_key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line, "expected `key = value`".into()))?;
            let key = canonical_key(raw_key).ok_or_else(|| err(raw_key.trim(), "unknown key".into()))?;
            self.set(key, value).map_err(|m| err(key, m))?;
            self.check(key).map_err(|m| err(key, m))?;
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, o: &ConfigOverrides) {
        if let Some(v) = o.strategy {
            self.strategy.variant = v;
        }
        if let Some(v) = o.nodes {
            self.nodes = v;
        }
        if let Some(v) = o.radius {
            self.radius = v;
        }
        if let Some(v) = o.alpha {
            self.pathloss_exponent = v;
        }
        if let Some(v) = o.nu {
            self.nu = v;
        }
        if let Some(v) = o.slots {
            self.slots_per_iteration = v;
        }
        if let Some(v) = o.iterations {
            self.iterations = v;
        }
        if let Some(v) = o.topologies {
            self.topologies = v;
        }
        if let Some(v) = o.seed {
            self.master_seed = v;
        }
        if let Some(v) = o.improvement_mode {
            self.strategy.improvement_mode = v;
        }
        if let Some(v) = o.tie_improves {
            self.strategy.tie_is_improvement = v;
        }
        if let Some(v) = o.bins {
            self.bins = v;
        }
        if let Some(v) = &o.out_dir {
            self.out_dir = v.clone();
        }
        if let Some(v) = o.trace {
            self.trace = v;
        }
        if let Some(v) = &o.nu_values {
            self.nu_values = v.clone();
        }
    }

    pub fn channel(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.pathloss_exponent, self.nu)
    }

    /// Engine parameters for running `variant` under this configuration.
    pub fn engine_config(&self, variant: Strategy) -> Result<EngineConfig> {
        let mut strategy = self.strategy;
        strategy.variant = variant;
        let mut cfg = EngineConfig::new(self.channel()?, self.slots_per_iteration, self.iterations, strategy);
        cfg.initial_fitness = self.initial_fitness;
        Ok(cfg)
    }
}

/// Resolves defaults, the optional config file, `COOPNET_SEED` and flags.
pub fn parse_config(file: Option<&Path>, overrides: &ConfigOverrides) -> Result<SimConfig> {
    let text = match file {
        Some(path) => Some(fs::read_to_string(path).map_err(|e| Error::io(path, e))?),
        None => None,
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    resolve(text.as_deref().zip(file), env_seed.as_deref(), overrides)
}

/// [`parse_config`] with the file contents and environment passed in.
pub fn resolve(file: Option<(&str, &Path)>, env_seed: Option<&str>, overrides: &ConfigOverrides) -> Result<SimConfig> {
    let mut cfg = SimConfig::default();
    if let Some(raw) = env_seed {
        cfg.master_seed = parse(raw).map_err(|message| Error::ConfigValue {
            key: SEED_ENV.to_string(),
            message,
        })?;
    }
    if let Some((text, origin)) = file {
        cfg.apply_text(text, origin)?;
    }
    cfg.apply_overrides(overrides);
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_text(text: &str) -> Result<SimConfig> {
        resolve(Some((text, Path::new("test.conf"))), None, &ConfigOverrides::default())
    }

    #[test]
    fn empty_input_gives_table_defaults() {
        let cfg = resolve(None, None, &ConfigOverrides::default()).unwrap();
        assert_eq!(cfg.nodes, 30);
        assert_eq!(cfg.radius, 1.0);
        assert_eq!(cfg.pathloss_exponent, 4.0);
        assert_eq!(cfg.slots_per_iteration, 1000);
        assert_eq!(cfg.iterations, 1000);
        assert_eq!(cfg.topologies, 1000);
        assert_eq!(cfg.nu, 0.39);
        assert_eq!(cfg.bins, 10);
        assert_eq!(cfg.strategy.improvement_mode, ImprovementMode::Differential);
        assert!(!cfg.strategy.tie_is_improvement);
        assert_eq!(from_text("").unwrap(), cfg);
    }

    #[test]
    fn nu_out_of_range_names_key_and_line() {
        let err = from_text("# sweep\nnodes = 10\nnu = 1.5\n").unwrap_err();
        match err {
            Error::ConfigLine { line, key, .. } => {
                assert_eq!(line, 3);
                assert_eq!(key, "nu");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn flags_override_file() {
        let o = ConfigOverrides {
            nodes: Some(10),
            ..Default::default()
        };
        let cfg = resolve(Some(("nodes = 30\n", Path::new("f"))), None, &o).unwrap();
        assert_eq!(cfg.nodes, 10);
    }

    #[test]
    fn seed_precedence() {
        let none = ConfigOverrides::default();
        assert_eq!(resolve(None, Some("77"), &none).unwrap().master_seed, 77);
        let file = Some(("seed = 5", Path::new("f")));
        assert_eq!(resolve(file, Some("77"), &none).unwrap().master_seed, 5);
        let flag = ConfigOverrides {
            seed: Some(9),
            ..Default::default()
        };
        assert_eq!(resolve(file, Some("77"), &flag).unwrap().master_seed, 9);
        assert!(resolve(None, Some("abc"), &none).is_err());
    }

    #[test]
    fn full_file() {
        let cfg = from_text(
            "nodes = 12   # small\n\
             radius = 2\n\
             alpha = 3\n\
             nu = 0.5\n\
             slots = 10\n\
             iterations = 20\n\
             topologies = 3\n\
             strategy = WSLS\n\
             seed = 123\n\
             improvement-mode = literal\n\
             tie_improves = true\n\
             bins = 4\n\
             out_dir = /tmp/x\n\
             nu_values = 0.2, 0.4\n",
        )
        .unwrap();
        assert_eq!(cfg.nodes, 12);
        assert_eq!(cfg.radius, 2.0);
        assert_eq!(cfg.pathloss_exponent, 3.0);
        assert_eq!(cfg.strategy.variant, Strategy::Wsls);
        assert_eq!(cfg.strategy.improvement_mode, ImprovementMode::Literal);
        assert!(cfg.strategy.tie_is_improvement);
        assert_eq!(cfg.master_seed, 123);
        assert_eq!(cfg.out_dir, PathBuf::from("/tmp/x"));
        assert_eq!(cfg.nu_values, vec![0.2, 0.4]);
    }

    #[test]
    fn bad_lines() {
        assert!(matches!(from_text("colour = red"), Err(Error::ConfigLine { key, line: 1, .. }) if key == "colour"));
        assert!(matches!(from_text("nodes 30"), Err(Error::ConfigLine { line: 1, .. })));
        assert!(matches!(from_text("nodes = many"), Err(Error::ConfigLine { key, .. }) if key == "nodes"));
        assert!(matches!(from_text("strategy = grim"), Err(Error::ConfigLine { key, .. }) if key == "strategy"));
        assert!(matches!(from_text("alpha = 5"), Err(Error::ConfigLine { key, .. }) if key == "alpha"));
        assert!(matches!(from_text("nu_values = 0.5, 1.0"), Err(Error::ConfigLine { key, .. }) if key == "nu_values"));
    }

    #[test]
    fn invalid_flag_value() {
        let o = ConfigOverrides {
            nu: Some(0.0),
            ..Default::default()
        };
        assert!(matches!(resolve(None, None, &o), Err(Error::ConfigValue { key, .. }) if key == "nu"));
    }
}
