//! Misbehaving nodes.
//!
//! An attacker holds no registered identity secret and no session key. It
//! overhears SYNs in range and, once per attack interval, puts denial-of-sleep
//! traffic on the air: a verbatim SYN replay, an RTS to every neighbour, or a
//! SYN forged under a neighbour's identity.

use rand::Rng;

use crate::config::AttackKind;
use crate::mac::{Dest, Frame, FrameKind, FrameSizes};
use crate::types::NodeId;

#[derive(Debug, Clone, PartialEq)]
pub struct AttackerProfile {
    pub id: NodeId,
    pub kind: AttackKind,
    pub interval_s: f64,
    /// Benign nodes within radio range.
    pub targets: Vec<NodeId>,
    /// Most recently overheard SYN.
    pub template: Option<Frame>,
}

impl AttackerProfile {
    pub fn new(id: NodeId, kind: AttackKind, interval_s: f64, targets: Vec<NodeId>) -> Self {
        Self { id, kind, interval_s, targets, template: None }
    }

    /// Keeps `frame` as the replay template if it is a plain SYN. Tokened SYNs
    /// are longer than `syn_bytes` and are not worth replaying. Returns
    /// whether the frame was captured.
    pub fn capture_syn(&mut self, frame: &Frame, syn_bytes: u32) -> bool {
        if frame.kind == FrameKind::Syn && frame.auth_token.is_none() && frame.size_bytes == syn_bytes && frame.src != self.id {
            self.template = Some(frame.clone());
            true
        } else {
            false
        }
    }

    /// Frames sent on one attack tick at time `now`.
    pub fn emit_attack_traffic<R: Rng + ?Sized>(
        &self,
        now: f64,
        cycle_index: u64,
        cycle_length: f64,
        sizes: &FrameSizes,
        rng: &mut R,
    ) -> Vec<Frame> {
        match self.kind {
            AttackKind::SynReplay => match &self.template {
                Some(t) => vec![Frame { src: self.id, sent_at: now, ..t.clone() }],
                None => Vec::new(),
            },
            AttackKind::RtsFlood => self
                .targets
                .iter()
                .map(|&v| Frame {
                    kind: FrameKind::Rts,
                    size_bytes: sizes.control,
                    src: self.id,
                    dst: Dest::Node(v),
                    claimed_id: self.id,
                    sleep_time_field: None,
                    auth_token: None,
                    cycle_index,
                    sent_at: now,
                })
                .collect(),
            AttackKind::ForgedIdSyn => {
                if self.targets.is_empty() {
                    return Vec::new();
                }
                let victim = self.targets[rng.gen_range(0..self.targets.len())];
                vec![Frame {
                    kind: FrameKind::Syn,
                    size_bytes: sizes.syn,
                    src: self.id,
                    dst: Dest::Broadcast,
                    claimed_id: victim,
                    sleep_time_field: Some(cycle_length),
                    auth_token: None,
                    cycle_index,
                    sent_at: now,
                }]
            }
        }
    }
}

/// Tick instants `phase, phase + interval, ...` strictly before `until`.
pub fn attack_ticks(phase: f64, interval: f64, until: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if interval <= 0.0 {
        return out;
    }
    let mut k = 0u64;
    loop {
        let t = phase + k as f64 * interval;
        if t >= until {
            break;
        }
        out.push(t);
        k += 1;
    }
    out
}
