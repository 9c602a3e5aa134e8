//! Straight-line reference simulator. Recomputes every distance, power,
//! indicator, fitness change and decision from the raw model formulas with
//! plain loops, sharing no code with the engine beyond the RNG type.

use rand::Rng;

pub struct OracleSlot {
    pub tx: usize,
    pub rx: usize,
    pub relay: Option<usize>,
    pub tx_power: f64,
    pub relay_power: f64,
}

pub struct OracleNode {
    pub cooperator: bool,
    pub fitness: f64,
    pub last_change: Option<f64>,
    pub prev_change: Option<f64>,
    pub energy: f64,
    pub coop_iterations: u32,
}

pub struct OracleRun {
    pub slots: Vec<OracleSlot>,
    pub nodes: Vec<OracleNode>,
    pub cooperators_per_iteration: Vec<u32>,
    /// Every per-node, per-slot fitness change.
    pub all_deltas: Vec<f64>,
}

pub struct OracleParams {
    pub alpha: f64,
    pub nu: f64,
    pub slots: usize,
    pub iterations: usize,
    /// "def", "coop", "tft" or "wsls"
    pub strategy: &'static str,
    pub literal: bool,
    pub tie_improves: bool,
    pub f0: f64,
}

fn dist(p: (f64, f64), q: (f64, f64)) -> f64 {
    let dx = p.0 - q.0;
    let dy = p.1 - q.1;
    (dx * dx + dy * dy).sqrt()
}

pub fn simulate<R1: Rng, R2: Rng>(
    pos: &[(f64, f64)],
    p: &OracleParams,
    traffic: &mut R1,
    seeding: &mut R2,
) -> OracleRun {
    let m = pos.len();
    let mut nodes: Vec<OracleNode> = (0..m)
        .map(|_| OracleNode {
            cooperator: p.strategy == "coop",
            fitness: p.f0,
            last_change: None,
            prev_change: None,
            energy: 0.0,
            coop_iterations: 0,
        })
        .collect();
    let mut slots = Vec::new();
    let mut cooperators_per_iteration = Vec::new();
    let mut all_deltas = Vec::new();

    for n in 0..p.iterations {
        let mut coops = 0;
        for node in nodes.iter_mut() {
            if node.cooperator {
                node.coop_iterations += 1;
                coops += 1;
            }
        }
        cooperators_per_iteration.push(coops);
        let mut change = vec![0.0f64; m];

        for _ in 0..p.slots {
            let a = traffic.random_range(0..m);
            let mut b = traffic.random_range(0..m - 1);
            if b >= a {
                b += 1;
            }
            let d_ab = dist(pos[a], pos[b]);
            let p_d = 1.0 * d_ab.powf(p.alpha);
            let p_i = 1.0 * (p.nu * d_ab).powf(p.alpha);

            let mut relay: Option<usize> = None;
            for c in 0..m {
                if c == a || c == b || !nodes[c].cooperator {
                    continue;
                }
                let d_ac = dist(pos[a], pos[c]);
                let d_cb = dist(pos[c], pos[b]);
                let inside = d_ac <= p.nu * d_ab && d_cb < d_ab;
                if inside {
                    relay = match relay {
                        Some(r) if dist(pos[r], pos[b]) <= d_cb => Some(r),
                        _ => Some(c),
                    };
                }
            }
            let p_c = relay.map(|c| 1.0 * dist(pos[c], pos[b]).powf(p.alpha)).unwrap_or(0.0);
            let tx_power = if relay.is_some() { p_i } else { p_d };

            for c in 0..m {
                let alpha_ind = if c == a { 1.0 } else { 0.0 };
                let beta_ind = if c == a && relay.is_some() { 1.0 } else { 0.0 };
                let reach = if relay.is_some() { p.nu * d_ab } else { d_ab };
                let gamma_ind = if c != a && dist(pos[a], pos[c]) <= reach { 1.0 } else { 0.0 };
                let delta_ind = if nodes[c].cooperator { 1.0 } else { 0.0 };
                let own_pc = if relay == Some(c) { p_c } else { 0.0 };
                let df = -alpha_ind * (1.0 - beta_ind) * (p_d - p_i) - gamma_ind * delta_ind * own_pc;
                all_deltas.push(df);
                if df != 0.0 {
                    nodes[c].fitness += df;
                    change[c] += df;
                }
            }
            nodes[a].energy += tx_power;
            if let Some(c) = relay {
                nodes[c].energy += p_c;
            }
            slots.push(OracleSlot {
                tx: a,
                rx: b,
                relay,
                tx_power,
                relay_power: p_c,
            });
        }

        for (node, &c) in nodes.iter_mut().zip(&change) {
            node.prev_change = node.last_change;
            node.last_change = Some(c);
        }

        if p.strategy == "def" || p.strategy == "coop" || n + 1 == p.iterations {
            continue;
        }
        if n == 0 {
            let k = seeding.random_range(0..m);
            nodes[k].cooperator = true;
            continue;
        }
        let mut next = Vec::with_capacity(m);
        for node in &nodes {
            let cur = node.last_change.unwrap();
            let reference = if p.literal { 0.0 } else { node.prev_change.unwrap() };
            let improved = cur > reference || (p.tie_improves && cur == reference);
            let flag = if p.strategy == "tft" {
                improved
            } else if improved {
                node.cooperator
            } else {
                !node.cooperator
            };
            next.push(flag);
        }
        for (node, flag) in nodes.iter_mut().zip(next) {
            node.cooperator = flag;
        }
    }

    OracleRun {
        slots,
        nodes,
        cooperators_per_iteration,
        all_deltas,
    }
}
