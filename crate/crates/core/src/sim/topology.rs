//! Random node placement.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::SimConfig;
use crate::types::{NodeId, Position};

/// Static description of one sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSpec {
    pub id: NodeId,
    pub position: Position,
    pub attacker: bool,
}

/// Independent random streams derived from one seed, one per concern, so
/// that switching the defense off does not shift the topology or the
/// attacker schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Topology = 1,
    Traffic = 2,
    Attack = 3,
    Crypto = 4,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// `node_count` sensors placed uniformly over the field, of which
/// `attacker_count()` are chosen uniformly at random to misbehave.
pub fn build_topology(config: &SimConfig) -> Vec<NodeSpec> {
    let mut rng = stream_rng(config.rng_seed, Stream::Topology);
    let mut nodes: Vec<NodeSpec> = (0..config.node_count)
        .map(|i| NodeSpec {
            id: NodeId(i as u32),
            position: Position::new(
                rng.gen_range(0.0..config.field_width_m),
                rng.gen_range(0.0..config.field_height_m),
            ),
            attacker: false,
        })
        .collect();
    let k = config.attacker_count();
    if k > 0 {
        for i in sample(&mut rng, nodes.len(), k) {
            nodes[i].attacker = true;
        }
    }
    nodes
}
