//! Behavioural rules mapping a node's iteration-fitness history to its
//! cooperator flag for the next iteration.

use std::fmt;
use std::str::FromStr;

use crate::engine::NodeState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    /// Everybody defects.
    Def,
    /// Everybody cooperates.
    Coop,
    /// Cooperate next iteration iff fitness improved.
    Tft,
    /// Keep the current flag on improvement, flip it otherwise.
    Wsls,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Def, Strategy::Coop, Strategy::Tft, Strategy::Wsls];

    /// Fixed-flag strategies never consult fitness.
    pub fn is_fixed(self) -> bool {
        matches!(self, Strategy::Def | Strategy::Coop)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Def => "def",
            Strategy::Coop => "coop",
            Strategy::Tft => "tft",
            Strategy::Wsls => "wsls",
        }
    }

    /// Label used in report rows.
    pub fn label(self) -> &'static str {
        match self {
            Strategy::Def => "DEF",
            Strategy::Coop => "COOP",
            Strategy::Tft => "TFT",
            Strategy::Wsls => "WSLS",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTokenError {
    pub token: String,
    pub expected: &'static str,
}

impl fmt::Display for ParseTokenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown value `{}`, expected one of {}", self.token, self.expected)
    }
}

impl std::error::Error for ParseTokenError {}

impl FromStr for Strategy {
    type Err = ParseTokenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "def" => Ok(Strategy::Def),
            "coop" => Ok(Strategy::Coop),
            "tft" => Ok(Strategy::Tft),
            "wsls" => Ok(Strategy::Wsls),
            _ => Err(ParseTokenError {
                token: s.to_string(),
                expected: "def, coop, tft, wsls",
            }),
        }
    }
}

/// How a node recognises that its fitness "improved" over an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ImprovementMode {
    /// The iteration's fitness change is positive. Fitness never grows, so
    /// this only ever fires on ties when `tie_is_improvement` is set.
    Literal,
    /// This iteration lost less fitness than the previous one.
    #[default]
    Differential,
}

impl ImprovementMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ImprovementMode::Literal => "literal",
            ImprovementMode::Differential => "differential",
        }
    }
}

impl FromStr for ImprovementMode {
    type Err = ParseTokenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "literal" => Ok(ImprovementMode::Literal),
            "differential" => Ok(ImprovementMode::Differential),
            _ => Err(ParseTokenError {
                token: s.to_string(),
                expected: "literal, differential",
            }),
        }
    }
}

/// The rule every node of a run follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StrategyKind {
    pub variant: Strategy,
    pub improvement_mode: ImprovementMode,
    pub tie_is_improvement: bool,
}

impl StrategyKind {
    pub fn new(variant: Strategy) -> Self {
        StrategyKind {
            variant,
            improvement_mode: ImprovementMode::Differential,
            tie_is_improvement: false,
        }
    }

    pub fn with_mode(mut self, mode: ImprovementMode) -> Self {
        self.improvement_mode = mode;
        self
    }

    pub fn with_tie_is_improvement(mut self, tie: bool) -> Self {
        self.tie_is_improvement = tie;
        self
    }
}

/// Not enough completed iterations to evaluate the improvement signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotReady;

impl fmt::Display for NotReady {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("insufficient fitness history for a decision")
    }
}

impl std::error::Error for NotReady {}

/// Whether the node's last iteration counts as an improvement.
pub fn improved(state: &NodeState, kind: &StrategyKind) -> Result<bool, NotReady> {
    let current = state.iter_fitness_change.ok_or(NotReady)?;
    let reference = match kind.improvement_mode {
        ImprovementMode::Literal => 0.0,
        ImprovementMode::Differential => state.prev_iter_fitness_change.ok_or(NotReady)?,
    };
    Ok(current > reference || (kind.tie_is_improvement && current == reference))
}

/// Truth table of the four rules.
pub fn next_flag(variant: Strategy, is_cooperator: bool, improved: bool) -> bool {
    match variant {
        Strategy::Def => false,
        Strategy::Coop => true,
        Strategy::Wsls => {
            if improved {
                is_cooperator
            } else {
                !is_cooperator
            }
        }
        Strategy::Tft => improved,
    }
}

/// Cooperator flag for the next iteration.
pub fn decide(state: &NodeState, kind: &StrategyKind) -> Result<bool, NotReady> {
    match kind.variant {
        Strategy::Def => Ok(false),
        Strategy::Coop => Ok(true),
        v => Ok(next_flag(v, state.is_cooperator, improved(state, kind)?)),
    }
}
