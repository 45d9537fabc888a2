//! Cluster-head election by residual energy and distance to the sink.
//!
//! Each node scores itself, compares against every neighbour within radio
//! range and declares itself head when its score is the neighbourhood maximum
//! (ties go to the lower id). Everyone else joins the nearest in-range head.

use std::collections::{BTreeMap, BTreeSet};

use crate::config::ScoreRule;
use crate::error::MetricError;
use crate::types::{NodeId, Position};

/// Below this many alive nodes, clustering is skipped and every node talks to
/// the sink directly.
pub const MIN_NODES_FOR_CLUSTERING: usize = 5;

/// `r_i = e_i * d(i, sink)`.
pub fn node_score(residual_energy: f64, dist_to_sink: f64) -> f64 {
    residual_energy * dist_to_sink
}

pub fn score(rule: ScoreRule, residual_energy: f64, dist_to_sink: f64) -> f64 {
    match rule {
        ScoreRule::EnergyTimesDistance => node_score(residual_energy, dist_to_sink),
        ScoreRule::EnergyOverDistance => residual_energy / (1.0 + dist_to_sink),
    }
}

/// Average drain rate `Q = e / t`.
pub fn energy_rate(energy: f64, elapsed: f64) -> Result<f64, MetricError> {
    if elapsed <= 0.0 {
        return Err(MetricError::ZeroElapsed);
    }
    Ok(energy / elapsed)
}

/// `e = Q * t`.
pub fn consumed(rate: f64, elapsed: f64) -> f64 {
    rate * elapsed
}

/// What the election needs to know about one alive node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub id: NodeId,
    pub position: Position,
    pub residual_energy: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClusterAssignment {
    pub heads: BTreeSet<NodeId>,
    /// Member to head.
    pub member_of: BTreeMap<NodeId, NodeId>,
    /// Nodes that report straight to the sink.
    pub direct: BTreeSet<NodeId>,
    pub round: u64,
}

impl ClusterAssignment {
    pub fn is_head(&self, id: NodeId) -> bool {
        self.heads.contains(&id)
    }

    pub fn head_of(&self, id: NodeId) -> Option<NodeId> {
        self.member_of.get(&id).copied()
    }

    /// Whether `id` belongs to the cluster led by `head` (the head included).
    pub fn in_cluster(&self, head: NodeId, id: NodeId) -> bool {
        id == head || self.head_of(id) == Some(head)
    }

    pub fn members(&self, head: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.member_of
            .iter()
            .filter(move |(_, h)| **h == head)
            .map(|(m, _)| *m)
    }

    pub fn is_clustered(&self) -> bool {
        !self.heads.is_empty()
    }
}

/// `a` beats `b` when its score is higher, or equal with a lower id.
fn outranks(a: (f64, NodeId), b: (f64, NodeId)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

pub fn elect_cluster_heads(
    candidates: &[Candidate],
    sink: Position,
    range: f64,
    rule: ScoreRule,
    round: u64,
) -> ClusterAssignment {
    let mut out = ClusterAssignment { round, ..Default::default() };
    if candidates.len() < MIN_NODES_FOR_CLUSTERING {
        out.direct = candidates.iter().map(|c| c.id).collect();
        return out;
    }

    let scores: Vec<f64> = candidates
        .iter()
        .map(|c| score(rule, c.residual_energy, c.position.distance_to(&sink)))
        .collect();

    for (i, c) in candidates.iter().enumerate() {
        let me = (scores[i], c.id);
        let is_max = candidates.iter().enumerate().all(|(j, other)| {
            j == i
                || c.position.distance_to(&other.position) > range
                || outranks(me, (scores[j], other.id))
        });
        if is_max {
            out.heads.insert(c.id);
        }
    }

    let heads: Vec<&Candidate> = candidates.iter().filter(|c| out.heads.contains(&c.id)).collect();
    for c in candidates.iter().filter(|c| !out.heads.contains(&c.id)) {
        let nearest = heads
            .iter()
            .map(|h| (c.position.distance_to(&h.position), h.id))
            .filter(|(d, _)| *d <= range)
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        match nearest {
            Some((_, h)) => {
                out.member_of.insert(c.id, h);
            }
            None => {
                out.direct.insert(c.id);
            }
        }
    }
    out
}
