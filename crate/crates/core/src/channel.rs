//! Propagation math: transmit power under perfect power adaptation,
//! cooperator regions, relay selection and relay cost.
//!
//! The path-loss constant, the receive-power threshold and the noise
//! variance only ever appear as one product in every power expression, so
//! they are folded into [`ChannelParams::unit_cost`].

use crate::error::{Error, Result};
use crate::geometry::Topology;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pathloss_exponent: f64,
    nu: f64,
    unit_cost: f64,
}

impl ChannelParams {
    /// Path-loss exponent in `[2, 4]`, range reduction `nu` in `(0, 1)`,
    /// unit cost fixed to 1.
    pub fn new(pathloss_exponent: f64, nu: f64) -> Result<Self> {
        Self::with_unit_cost(pathloss_exponent, nu, 1.0)
    }

    pub fn with_unit_cost(pathloss_exponent: f64, nu: f64, unit_cost: f64) -> Result<Self> {
        if !(2.0..=4.0).contains(&pathloss_exponent) {
            return Err(Error::InvalidConfig(format!(
                "path-loss exponent must lie in [2, 4], got {pathloss_exponent}"
            )));
        }
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "nu must lie in (0, 1), got {nu}"
            )));
        }
        if !(unit_cost > 0.0 && unit_cost.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "unit cost must be positive, got {unit_cost}"
            )));
        }
        Ok(ChannelParams {
            pathloss_exponent,
            nu,
            unit_cost,
        })
    }

    pub fn pathloss_exponent(&self) -> f64 {
        self.pathloss_exponent
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn unit_cost(&self) -> f64 {
        self.unit_cost
    }
}

fn check_distance(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDistance(d))
    }
}

fn check_pair(topology: &Topology, a: usize, b: usize) -> Result<()> {
    topology.position(a)?;
    topology.position(b)?;
    if a == b {
        return Err(Error::InvalidPair(a));
    }
    Ok(())
}

/// Power for an unassisted transmission over distance `d`: `c0 * d^alpha`.
pub fn direct_power(d: f64, params: &ChannelParams) -> Result<f64> {
    check_distance(d)?;
    Ok(params.unit_cost * d.powf(params.pathloss_exponent))
}

/// Transmitter power when a cooperator relays: `c0 * (nu * d_ab)^alpha`.
pub fn reduced_power(d_ab: f64, params: &ChannelParams) -> Result<f64> {
    check_distance(d_ab)?;
    Ok(params.unit_cost * (params.nu * d_ab).powf(params.pathloss_exponent))
}

/// Power the selected relay spends forwarding to the receiver over `d_cb`.
pub fn relay_cost(d_cb: f64, params: &ChannelParams) -> Result<f64> {
    direct_power(d_cb, params)
}

/// Nodes strictly closer to both `a` and `b` than `a` and `b` are to each other.
pub fn intermediate_nodes(topology: &Topology, a: usize, b: usize) -> Result<Vec<usize>> {
    check_pair(topology, a, b)?;
    let d_ab = topology.distance(a, b)?;
    let mut out = Vec::new();
    for c in 0..topology.node_count() {
        if c == a || c == b {
            continue;
        }
        if topology.distance(a, c)? < d_ab && topology.distance(c, b)? < d_ab {
            out.push(c);
        }
    }
    Ok(out)
}

/// Current cooperators inside the reduced transmitter range:
/// `d_ac <= nu * d_ab` and `d_cb < d_ab`.
pub fn eligible_cooperators(
    topology: &Topology,
    a: usize,
    b: usize,
    coop_flags: &[bool],
    params: &ChannelParams,
) -> Result<Vec<usize>> {
    check_pair(topology, a, b)?;
    if coop_flags.len() != topology.node_count() {
        return Err(Error::InvalidConfig(format!(
            "{} cooperator flags for {} nodes",
            coop_flags.len(),
            topology.node_count()
        )));
    }
    let d_ab = topology.distance(a, b)?;
    let reach = params.nu * d_ab;
    let mut out = Vec::new();
    for (c, &is_coop) in coop_flags.iter().enumerate() {
        if c == a || c == b || !is_coop {
            continue;
        }
        if topology.distance(a, c)? <= reach && topology.distance(c, b)? < d_ab {
            out.push(c);
        }
    }
    Ok(out)
}

/// The eligible node closest to the receiver; lowest index wins ties.
pub fn select_relay(topology: &Topology, eligible: &[usize], b: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &c in eligible {
        let d = topology.distance(c, b).ok()?;
        best = match best {
            Some((bc, bd)) if bd < d || (bd == d && bc < c) => Some((bc, bd)),
            _ => Some((c, d)),
        };
    }
    best.map(|(c, _)| c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::seed::SimRng;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn p4() -> ChannelParams {
        ChannelParams::new(4.0, 0.39).unwrap()
    }

    fn line(others: &[(f64, f64)]) -> Topology {
        let mut pts = vec![Point::new(0.0, 0.0), Point::new(0.8, 0.0)];
        pts.extend(others.iter().map(|&(x, y)| Point::new(x, y)));
        Topology::from_positions(pts, 1.0).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ChannelParams::new(1.9, 0.5).is_err());
        assert!(ChannelParams::new(4.1, 0.5).is_err());
        assert!(ChannelParams::new(4.0, 0.0).is_err());
        assert!(ChannelParams::new(4.0, 1.0).is_err());
        assert!(ChannelParams::with_unit_cost(4.0, 0.5, 0.0).is_err());
        assert!(ChannelParams::new(2.0, 0.5).is_ok());
    }

    #[test]
    fn direct_power_examples() {
        let p = p4();
        assert_eq!(direct_power(1.0, &p).unwrap(), 1.0);
        assert_eq!(direct_power(0.5, &p).unwrap(), 0.0625);
        assert!((direct_power(0.8, &p).unwrap() - 0.4096).abs() < 1e-12);
        assert!(matches!(direct_power(0.0, &p), Err(Error::InvalidDistance(_))));
        assert!(matches!(direct_power(-0.2, &p), Err(Error::InvalidDistance(_))));
    }

    #[test]
    fn reduced_power_examples() {
        let p = p4();
        assert!((reduced_power(0.8, &p).unwrap() - 0.0094759).abs() < 1e-6);
        assert!((reduced_power(1.0, &p).unwrap() - 0.0231344).abs() < 1e-6);
        assert!(reduced_power(0.0, &p).is_err());
        let near_one = ChannelParams::new(4.0, 1.0 - 1e-12).unwrap();
        let d = 0.7;
        let gap = direct_power(d, &near_one).unwrap() - reduced_power(d, &near_one).unwrap();
        assert!(gap > 0.0 && gap < 1e-10);
    }

    #[test]
    fn relay_cost_examples() {
        let p = p4();
        // d_cb of (0.3, 0.05) to (0.8, 0) is sqrt(0.2525).
        assert!((relay_cost(0.2525f64.sqrt(), &p).unwrap() - 0.0637563).abs() < 1e-6);
        assert_eq!(relay_cost(1.0, &p).unwrap(), 1.0);
    }

    #[test]
    fn intermediate_examples() {
        let t = line(&[(0.4, 0.0)]);
        assert_eq!(intermediate_nodes(&t, 0, 1).unwrap(), vec![2]);
        let t = line(&[(-0.1, 0.0)]);
        assert!(intermediate_nodes(&t, 0, 1).unwrap().is_empty());
        let t = line(&[]);
        assert!(intermediate_nodes(&t, 0, 1).unwrap().is_empty());
        assert!(matches!(intermediate_nodes(&t, 1, 1), Err(Error::InvalidPair(1))));
    }

    #[test]
    fn eligible_examples() {
        let p = p4();
        let t = line(&[(0.3, 0.05)]);
        assert_eq!(eligible_cooperators(&t, 0, 1, &[false, false, true], &p).unwrap(), vec![2]);
        assert!(eligible_cooperators(&t, 0, 1, &[false, false, false], &p).unwrap().is_empty());
        let t = line(&[(0.4, 0.0)]);
        assert!(eligible_cooperators(&t, 0, 1, &[false, false, true], &p).unwrap().is_empty());
        assert!(matches!(
            eligible_cooperators(&t, 0, 0, &[true; 3], &p),
            Err(Error::InvalidPair(0))
        ));
    }

    #[test]
    fn reach_boundary_is_inclusive() {
        // nu = 0.5 and d_ab = 0.8 put the reach at exactly 0.4.
        let p = ChannelParams::new(4.0, 0.5).unwrap();
        let t = line(&[(0.4, 0.0)]);
        assert_eq!(eligible_cooperators(&t, 0, 1, &[true; 3], &p).unwrap(), vec![2]);
    }

    #[test]
    fn relay_selection() {
        // B at (0.8, 0); node 2 at d_cb = 0.5, node 3 at d_cb = 0.3.
        let t = line(&[(0.3, 0.0), (0.5, 0.0)]);
        assert_eq!(select_relay(&t, &[2, 3], 1), Some(3));
        assert_eq!(select_relay(&t, &[], 1), None);
        // Mirror images about the x-axis are equidistant from B.
        let t = line(&[(0.5, 0.1), (0.5, -0.1)]);
        assert_eq!(select_relay(&t, &[3, 2], 1), Some(2));
        assert_eq!(select_relay(&t, &[2, 3], 1), Some(2));
    }

    proptest! {
        #[test]
        fn reduced_below_direct(d in 1e-6f64..2.0, nu in 0.001f64..0.999, alpha in 2.0f64..=4.0) {
            let p = ChannelParams::new(alpha, nu).unwrap();
            prop_assert!(reduced_power(d, &p).unwrap() < direct_power(d, &p).unwrap());
            prop_assert!(reduced_power(d, &p).unwrap() > 0.0);
            prop_assert_eq!(relay_cost(d, &p).unwrap(), direct_power(d, &p).unwrap());
        }

        #[test]
        fn powers_increase_with_distance(d in 1e-3f64..2.0, step in 1e-3f64..1.0, alpha in 2.0f64..=4.0) {
            let p = ChannelParams::new(alpha, 0.39).unwrap();
            prop_assert!(direct_power(d, &p).unwrap() < direct_power(d + step, &p).unwrap());
            prop_assert!(reduced_power(d, &p).unwrap() < reduced_power(d + step, &p).unwrap());
        }

        #[test]
        fn eligible_within_intermediate(seed in any::<u64>(), nu in 0.05f64..0.95, mask in any::<u16>()) {
            let mut rng = SimRng::seed_from_u64(seed);
            let t = Topology::generate(12, 1.0, &mut rng).unwrap();
            let flags: Vec<bool> = (0..12).map(|i| mask >> i & 1 == 1).collect();
            let p = ChannelParams::new(4.0, nu).unwrap();
            for a in 0..12 {
                for b in 0..12 {
                    if a == b { continue; }
                    let inter = intermediate_nodes(&t, a, b).unwrap();
                    let elig = eligible_cooperators(&t, a, b, &flags, &p).unwrap();
                    for c in &elig {
                        prop_assert!(inter.contains(c));
                        prop_assert!(flags[*c]);
                    }
                    if let Some(r) = select_relay(&t, &elig, b) {
                        prop_assert!(elig.contains(&r));
                        let best = elig.iter().map(|&c| t.distance(c, b).unwrap()).fold(f64::INFINITY, f64::min);
                        prop_assert_eq!(t.distance(r, b).unwrap(), best);
                    } else {
                        prop_assert!(elig.is_empty());
                    }
                }
            }
        }
    }
}
