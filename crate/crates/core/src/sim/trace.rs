//! Optional record of every counter and energy mutation, detailed enough to
//! recompute all run metrics offline.

use crate::defense::NodeVerdict;
use crate::energy::EnergyCategory;
use crate::types::NodeId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceEvent {
    /// `joules` is the amount actually withdrawn.
    Debit { node: NodeId, time: f64, category: EnergyCategory, joules: f64 },
    DataSent { node: NodeId, time: f64 },
    DataReceived { node: NodeId, time: f64 },
    HeadElected { node: NodeId, time: f64 },
    Died { node: NodeId, time: f64 },
    Verdict { node: NodeId, time: f64, verdict: NodeVerdict },
}

/// Everything a replay needs besides the event list.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub start_s: f64,
    pub stop_s: f64,
    pub packet_size_bytes: u32,
    pub initial_energy: Vec<f64>,
    /// Ground truth per sensor.
    pub attacker: Vec<bool>,
    pub events: Vec<TraceEvent>,
}
