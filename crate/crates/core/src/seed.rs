//! Deterministic derivation of per-topology random substreams from one master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The simulation-wide random generator. ChaCha is portable across platforms,
/// which keeps CSV outputs byte-identical between machines.
pub type SimRng = ChaCha8Rng;

/// Independent random substreams used by a single topology run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    /// Node placement.
    Topology,
    /// Transmitter/receiver pair activation.
    Traffic,
    /// Choice of the initial cooperator in fitness-driven runs.
    Seeding,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Topology => 0x746f_706f,
            Stream::Traffic => 0x7472_6166,
            Stream::Seeding => 0x7365_6564,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for `stream` of topology `topology_id` under `master`.
pub fn derive_seed(master: u64, topology_id: u64, stream: Stream) -> u64 {
    let h = splitmix64(master);
    let h = splitmix64(h ^ topology_id);
    splitmix64(h ^ stream.tag())
}

pub fn stream_rng(master: u64, topology_id: u64, stream: Stream) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, topology_id, stream))
}
