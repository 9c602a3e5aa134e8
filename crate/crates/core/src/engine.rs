//! Two-timescale simulation: `T` slots per iteration, `N` iterations per run.
//!
//! In every slot one ordered transmitter/receiver pair is activated. If a
//! current cooperator sits in the reduced transmitter range, the one closest
//! to the receiver relays and the transmitter drops to the reduced power;
//! otherwise the transmitter pays the direct power. Per-slot fitness changes
//! are never positive: a transmitter without a cooperator forfeits the
//! benefit it could have had, and the selected relay pays its relay cost.
//! Strategy decisions happen only at iteration boundaries.

use rand::Rng;

use crate::channel::{self, ChannelParams};
use crate::error::{Error, Result};
use crate::geometry::Topology;
use crate::strategy::{self, Strategy, StrategyKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeState {
    pub is_cooperator: bool,
    /// Cumulative fitness, starting at the initial fitness.
    pub fitness: f64,
    /// Fitness change over the most recent finished iteration.
    pub iter_fitness_change: Option<f64>,
    /// Fitness change over the iteration before that.
    pub prev_iter_fitness_change: Option<f64>,
    /// Power actually spent, summed over slots.
    pub total_energy: f64,
    pub coop_iterations: u32,
}

impl NodeState {
    pub fn new(initial_fitness: f64) -> Self {
        NodeState {
            is_cooperator: false,
            fitness: initial_fitness,
            iter_fitness_change: None,
            prev_iter_fitness_change: None,
            total_energy: 0.0,
            coop_iterations: 0,
        }
    }

    fn finish_iteration(&mut self, change: f64) {
        self.prev_iter_fitness_change = self.iter_fitness_change;
        self.iter_fitness_change = Some(change);
    }
}

/// Indicator view of one node in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotContext {
    /// The node is the active transmitter.
    pub has_packet: bool,
    /// The node transmits and an eligible cooperator relays for it.
    pub has_cooperator: bool,
    /// The node hears the active transmitter at its current power.
    pub connected_to_active: bool,
    /// Active incoming links; at most one with a single pair per slot.
    pub active_incoming: u8,
}

impl SlotContext {
    pub fn role(&self, is_cooperator: bool, is_selected_relay: bool) -> NodeRole {
        if self.has_packet {
            NodeRole::Transmitter
        } else if is_selected_relay {
            NodeRole::SelectedRelay
        } else if is_cooperator && self.connected_to_active {
            NodeRole::BystanderCooperator
        } else {
            NodeRole::Idle
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Idle,
    Transmitter,
    SelectedRelay,
    BystanderCooperator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotOutcome {
    pub transmitter: usize,
    pub receiver: usize,
    pub relay: Option<usize>,
    /// Transmitter-receiver distance.
    pub distance: f64,
    /// Power an unassisted transmission over `distance` needs.
    pub direct_power: f64,
    /// Power the transmitter needs when relayed.
    pub reduced_power: f64,
    pub transmitter_power: f64,
    pub relay_power: f64,
    pub benefit: f64,
}

impl SlotOutcome {
    pub fn total_power(&self) -> f64 {
        self.transmitter_power + self.relay_power
    }

    /// Radius within which other nodes hear the transmitter in this slot.
    pub fn transmit_range(&self, params: &ChannelParams) -> f64 {
        if self.relay.is_some() {
            params.nu() * self.distance
        } else {
            self.distance
        }
    }

    /// Indicators for `node`, given its distance from the transmitter.
    pub fn context_for(&self, node: usize, distance_from_transmitter: f64, params: &ChannelParams) -> SlotContext {
        let has_packet = node == self.transmitter;
        let connected = !has_packet && distance_from_transmitter <= self.transmit_range(params);
        SlotContext {
            has_packet,
            has_cooperator: has_packet && self.relay.is_some(),
            connected_to_active: connected,
            active_incoming: u8::from(connected),
        }
    }

    pub fn role_of(&self, node: usize, is_cooperator: bool, distance_from_transmitter: f64, params: &ChannelParams) -> NodeRole {
        self.context_for(node, distance_from_transmitter, params)
            .role(is_cooperator, self.relay == Some(node))
    }
}

/// Fitness change of a node in the given role for one slot. Never positive.
pub fn delta_fitness(role: NodeRole, slot: &SlotOutcome) -> f64 {
    match role {
        NodeRole::Transmitter => {
            if slot.relay.is_some() {
                0.0
            } else {
                -(slot.direct_power - slot.reduced_power)
            }
        }
        NodeRole::SelectedRelay => -slot.relay_power,
        // Non-selected cooperators hear the packet but pay nothing.
        NodeRole::BystanderCooperator | NodeRole::Idle => 0.0,
    }
}

/// Draws an ordered pair `(a, b)` with `a != b`, uniform over all
/// `m * (m - 1)` pairs.
pub fn pick_pair<R: Rng + ?Sized>(node_count: usize, rng: &mut R) -> Result<(usize, usize)> {
    if node_count < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 nodes to pick a pair, got {node_count}"
        )));
    }
    let a = rng.random_range(0..node_count);
    let mut b = rng.random_range(0..node_count - 1);
    if b >= a {
        b += 1;
    }
    Ok((a, b))
}

/// Per-topology link tables plus the slot and iteration steps.
#[derive(Debug, Clone)]
pub struct Engine<'t> {
    topology: &'t Topology,
    params: ChannelParams,
    node_count: usize,
    dist: Vec<f64>,
    direct: Vec<f64>,
    reduced: Vec<f64>,
}

impl<'t> Engine<'t> {
    /// Precomputes all link powers. Fails if two nodes coincide.
    pub fn new(topology: &'t Topology, params: ChannelParams) -> Result<Self> {
        let m = topology.node_count();
        let dist = topology.distance_matrix();
        let mut direct = vec![0.0; m * m];
        let mut reduced = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    let d = dist[i * m + j];
                    direct[i * m + j] = channel::direct_power(d, &params)?;
                    reduced[i * m + j] = channel::reduced_power(d, &params)?;
                }
            }
        }
        Ok(Engine {
            topology,
            params,
            node_count: m,
            dist,
            direct,
            reduced,
        })
    }

    pub fn topology(&self) -> &Topology {
        self.topology
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    /// Resolves the transmission `a -> b` against the current cooperator
    /// flags without touching any state.
    pub fn resolve(&self, states: &[NodeState], a: usize, b: usize) -> SlotOutcome {
        let m = self.node_count;
        let d_ab = self.dist[a * m + b];
        let reach = self.params.nu() * d_ab;
        // Closest eligible cooperator to b; scanning upwards with a strict
        // comparison keeps the lowest index on ties.
        let mut relay: Option<(usize, f64)> = None;
        for (c, s) in states.iter().enumerate() {
            if !s.is_cooperator || c == a || c == b {
                continue;
            }
            let d_cb = self.dist[c * m + b];
            if self.dist[a * m + c] <= reach && d_cb < d_ab && relay.is_none_or(|(_, best)| d_cb < best) {
                relay = Some((c, d_cb));
            }
        }
        let direct_power = self.direct[a * m + b];
        let reduced_power = self.reduced[a * m + b];
        match relay {
            Some((c, _)) => SlotOutcome {
                transmitter: a,
                receiver: b,
                relay: Some(c),
                distance: d_ab,
                direct_power,
                reduced_power,
                transmitter_power: reduced_power,
                relay_power: self.direct[c * m + b],
                benefit: direct_power - reduced_power,
            },
            None => SlotOutcome {
                transmitter: a,
                receiver: b,
                relay: None,
                distance: d_ab,
                direct_power,
                reduced_power,
                transmitter_power: direct_power,
                relay_power: 0.0,
                benefit: 0.0,
            },
        }
    }

    /// Charges energy and fitness for a resolved slot. Only the transmitter
    /// and the selected relay can have a non-zero fitness change.
    pub fn apply(&self, states: &mut [NodeState], outcome: &SlotOutcome) {
        let tx = &mut states[outcome.transmitter];
        tx.total_energy += outcome.transmitter_power;
        tx.fitness += delta_fitness(NodeRole::Transmitter, outcome);
        if let Some(c) = outcome.relay {
            let relay = &mut states[c];
            relay.total_energy += outcome.relay_power;
            relay.fitness += delta_fitness(NodeRole::SelectedRelay, outcome);
        }
    }

    /// One slot: pick a pair, resolve it, charge the payers.
    pub fn run_slot<R: Rng + ?Sized>(&self, states: &mut [NodeState], rng: &mut R) -> Result<SlotOutcome> {
        self.check_states(states)?;
        let (a, b) = pick_pair(self.node_count, rng)?;
        let outcome = self.resolve(states, a, b);
        self.apply(states, &outcome);
        Ok(outcome)
    }

    /// Runs `slots` slots, then shifts every node's iteration-change
    /// registers. Returns each node's fitness change over the iteration.
    pub fn run_iteration<R, O>(
        &self,
        states: &mut [NodeState],
        slots: usize,
        rng: &mut R,
        mut observer: O,
    ) -> Result<Vec<f64>>
    where
        R: Rng + ?Sized,
        O: FnMut(usize, &SlotOutcome),
    {
        if slots < 1 {
            return Err(Error::InvalidConfig("an iteration needs at least one slot".into()));
        }
        self.check_states(states)?;
        for s in states.iter_mut().filter(|s| s.is_cooperator) {
            s.coop_iterations += 1;
        }
        let mut change = vec![0.0; self.node_count];
        for t in 0..slots {
            let (a, b) = pick_pair(self.node_count, rng)?;
            let outcome = self.resolve(states, a, b);
            self.apply(states, &outcome);
            change[a] += delta_fitness(NodeRole::Transmitter, &outcome);
            if let Some(c) = outcome.relay {
                change[c] += delta_fitness(NodeRole::SelectedRelay, &outcome);
            }
            observer(t, &outcome);
        }
        for (s, &c) in states.iter_mut().zip(&change) {
            s.finish_iteration(c);
        }
        Ok(change)
    }

    fn check_states(&self, states: &[NodeState]) -> Result<()> {
        if states.len() != self.node_count {
            return Err(Error::InvalidConfig(format!(
                "{} node states for {} nodes",
                states.len(),
                self.node_count
            )));
        }
        Ok(())
    }
}

/// Parameters of a single run on a single topology.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    pub channel: ChannelParams,
    pub slots_per_iteration: usize,
    pub iterations: usize,
    pub strategy: StrategyKind,
    pub initial_fitness: f64,
    /// Keep every node's cumulative energy after each iteration.
    pub record_node_trajectory: bool,
}

impl EngineConfig {
    pub fn new(channel: ChannelParams, slots_per_iteration: usize, iterations: usize, strategy: StrategyKind) -> Self {
        EngineConfig {
            channel,
            slots_per_iteration,
            iterations,
            strategy,
            initial_fitness: 0.0,
            record_node_trajectory: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.slots_per_iteration < 1 {
            return Err(Error::InvalidConfig("slots per iteration must be at least 1".into()));
        }
        if self.iterations < 1 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        if !self.initial_fitness.is_finite() {
            return Err(Error::InvalidConfig("initial fitness must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub topology_id: usize,
    pub strategy: Strategy,
    pub iterations: usize,
    pub final_states: Vec<NodeState>,
    /// Network energy spent in each iteration.
    pub iteration_energy: Vec<f64>,
    /// Number of cooperators during each iteration.
    pub iteration_cooperators: Vec<u32>,
    /// `[iteration][node]` cumulative energy, when recorded.
    pub node_energy_trajectory: Option<Vec<Vec<f64>>>,
    /// Sum of `transmitter_power + relay_power` over every slot, in slot order.
    pub network_energy: f64,
}

impl RunResult {
    pub fn with_topology_id(mut self, id: usize) -> Self {
        self.topology_id = id;
        self
    }

    pub fn node_count(&self) -> usize {
        self.final_states.len()
    }
}

/// Runs `config.iterations` iterations on `topology`.
///
/// Fixed strategies keep their flags throughout. Fitness-driven strategies
/// start with every node defecting; after iteration 0 one node drawn from
/// `seeding_rng` turns cooperator, and after every later iteration all nodes
/// apply the strategy simultaneously.
pub fn run_simulation<R1, R2>(
    config: &EngineConfig,
    topology: &Topology,
    traffic_rng: &mut R1,
    seeding_rng: &mut R2,
) -> Result<RunResult>
where
    R1: Rng + ?Sized,
    R2: Rng + ?Sized,
{
    run_simulation_observed(config, topology, traffic_rng, seeding_rng, |_, _, _| {})
}

/// [`run_simulation`] with a callback invoked as `(iteration, slot, outcome)`
/// after every slot.
pub fn run_simulation_observed<R1, R2, O>(
    config: &EngineConfig,
    topology: &Topology,
    traffic_rng: &mut R1,
    seeding_rng: &mut R2,
    mut observer: O,
) -> Result<RunResult>
where
    R1: Rng + ?Sized,
    R2: Rng + ?Sized,
    O: FnMut(usize, usize, &SlotOutcome),
{
    config.validate()?;
    let engine = Engine::new(topology, config.channel)?;
    let m = topology.node_count();
    let variant = config.strategy.variant;

    let mut states = vec![NodeState::new(config.initial_fitness); m];
    if variant == Strategy::Coop {
        for s in &mut states {
            s.is_cooperator = true;
        }
    }

    let n_iter = config.iterations;
    let mut iteration_energy = Vec::with_capacity(n_iter);
    let mut iteration_cooperators = Vec::with_capacity(n_iter);
    let mut trajectory = config.record_node_trajectory.then(|| Vec::with_capacity(n_iter));
    let mut network_energy = 0.0;

    for n in 0..n_iter {
        iteration_cooperators.push(states.iter().filter(|s| s.is_cooperator).count() as u32);
        let mut spent = 0.0;
        engine.run_iteration(&mut states, config.slots_per_iteration, traffic_rng, |t, o| {
            let p = o.total_power();
            spent += p;
            network_energy += p;
            observer(n, t, o);
        })?;
        iteration_energy.push(spent);
        if let Some(tr) = trajectory.as_mut() {
            tr.push(states.iter().map(|s| s.total_energy).collect());
        }

        if variant.is_fixed() || n + 1 == n_iter {
            continue;
        }
        if n == 0 {
            let seeded = seeding_rng.random_range(0..m);
            states[seeded].is_cooperator = true;
        } else {
            // Everyone decides from the same finished iteration before any
            // flag changes.
            let next: Vec<bool> = states
                .iter()
                .map(|s| strategy::decide(s, &config.strategy))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            for (s, flag) in states.iter_mut().zip(next) {
                s.is_cooperator = flag;
            }
        }
    }

    Ok(RunResult {
        topology_id: 0,
        strategy: variant,
        iterations: n_iter,
        final_states: states,
        iteration_energy,
        iteration_cooperators,
        node_energy_trajectory: trajectory,
        network_energy,
    })
}
