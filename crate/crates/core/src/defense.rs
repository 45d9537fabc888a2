//! Two-level authentication against denial-of-sleep.
//!
//! Cluster level: every head remembers when each member's control frames
//! last arrived. While rates stay under the threshold, SYNs are used without
//! authentication. The first frame that pushes a member over the threshold
//! switches the cluster into authentication mode (SYN-A); from then on only
//! frames with a valid token are accepted and the transmitter of any other
//! frame becomes a suspect. Once every member has calmed down the head
//! broadcasts NO-SYN-A and returns to normal operation.
//!
//! Network level: a suspect (or a freshly elected head) must prove knowledge
//! of its identification secret to an evaluator, which fetches the public
//! square from the base station. Failure rejects the node for good.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigUint;
use rand::RngCore;

use crate::clustering::ClusterAssignment;
use crate::config::DefenseParams;
use crate::crypto::ident::{run_identification, IdentificationResult, Prover};
use crate::mac::{Frame, FrameKind};
use crate::metrics::ConfusionMatrix;
use crate::types::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuthMode {
    Normal,
    AuthRequired,
}

/// Ordered: a verdict may only move to a larger value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeVerdict {
    Accepted,
    Suspected,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynDecision {
    Accept,
    /// `suspect` names the transmitter when the rejection implicates it.
    Reject { suspect: Option<NodeId> },
    EscalateAuth,
}

/// Audit record of one switch into authentication mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Escalation {
    pub time: f64,
    pub claimed: NodeId,
    pub kind: FrameKind,
    pub rate: f64,
}

/// Raise-only verdict map.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerdictBook {
    verdicts: BTreeMap<NodeId, NodeVerdict>,
}

impl VerdictBook {
    pub fn get(&self, id: NodeId) -> NodeVerdict {
        self.verdicts.get(&id).copied().unwrap_or(NodeVerdict::Accepted)
    }

    /// Moves `id` to `verdict` unless it already holds a stronger one.
    /// Returns whether anything changed.
    pub fn raise(&mut self, id: NodeId, verdict: NodeVerdict) -> bool {
        let cur = self.get(id);
        if verdict > cur {
            self.verdicts.insert(id, verdict);
            true
        } else {
            false
        }
    }

    pub fn is_rejected(&self, id: NodeId) -> bool {
        self.get(id) == NodeVerdict::Rejected
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeVerdict)> + '_ {
        self.verdicts.iter().map(|(k, v)| (*k, *v))
    }
}

/// Per-head state of the cluster-level check.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAuthState {
    pub head: NodeId,
    pub mode: AuthMode,
    /// When the current authentication period began.
    entered_auth_at: f64,
    /// Recent arrival instants per (frame kind, claimed identity).
    arrivals: BTreeMap<(FrameKind, NodeId), VecDeque<f64>>,
    pub verdicts: VerdictBook,
    pub escalations: Vec<Escalation>,
}

impl ClusterAuthState {
    pub fn new(head: NodeId) -> Self {
        Self {
            head,
            mode: AuthMode::Normal,
            entered_auth_at: 0.0,
            arrivals: BTreeMap::new(),
            verdicts: VerdictBook::default(),
            escalations: Vec::new(),
        }
    }

    /// The state a successor head takes over: mode, arrival log and audit
    /// trail stay with the cluster.
    pub fn handover(&self, new_head: NodeId) -> Self {
        Self { head: new_head, ..self.clone() }
    }

    /// Logs an arrival, forgets those older than `window`, and returns the
    /// instantaneous rate implied by the gap to the previous arrival (0 for
    /// the first one).
    fn record(&mut self, key: (FrameKind, NodeId), now: f64, window: f64) -> f64 {
        let log = self.arrivals.entry(key).or_default();
        let rate = log.back().map_or(0.0, |&last| rate_of(now - last));
        log.push_back(now);
        while log.front().is_some_and(|&t| t <= now - window) {
            log.pop_front();
        }
        rate
    }

    /// Arrivals of `(kind, id)` within the last `window` seconds, per second.
    pub fn observed_rate(&self, kind: FrameKind, id: NodeId, now: f64, window: f64) -> f64 {
        self.arrivals.get(&(kind, id)).map_or(0.0, |log| windowed_rate(log, now, window))
    }

    /// Decides on a sync-class control frame (SYN or RTS) heard by this head.
    ///
    /// `token_ok` is only consulted in authentication mode.
    pub fn on_syn_received(
        &mut self,
        frame: &Frame,
        membership: &ClusterAssignment,
        now: f64,
        params: &DefenseParams,
        token_ok: impl FnOnce(&Frame) -> bool,
    ) -> SynDecision {
        let claimed = frame.claimed_id;
        if claimed == self.head || !membership.in_cluster(self.head, claimed) {
            return SynDecision::Reject { suspect: None };
        }
        let key = (frame.kind, claimed);
        match self.mode {
            AuthMode::Normal => {
                let rate = self.record(key, now, params.rate_window_s);
                if rate > params.syn_rate_threshold {
                    self.mode = AuthMode::AuthRequired;
                    self.entered_auth_at = now;
                    self.escalations.push(Escalation { time: now, claimed, kind: frame.kind, rate });
                    SynDecision::EscalateAuth
                } else {
                    SynDecision::Accept
                }
            }
            AuthMode::AuthRequired => {
                // Rejected frames count too: they are what keeps the cluster
                // in authentication mode while an attacker is still active.
                self.record(key, now, params.rate_window_s);
                if frame.auth_token.is_some() && token_ok(frame) {
                    SynDecision::Accept
                } else {
                    self.verdicts.raise(frame.src, NodeVerdict::Suspected);
                    SynDecision::Reject { suspect: Some(frame.src) }
                }
            }
        }
    }

    /// Leaves authentication mode when every tracked rate, averaged over the
    /// last `rate_window_s`, is below `threshold * exit_factor`. The average
    /// is only trusted once a full window has passed since entering the
    /// mode. Returns true when the head should broadcast NO-SYN-A.
    pub fn maybe_exit_auth_mode(&mut self, now: f64, params: &DefenseParams) -> bool {
        if self.mode != AuthMode::AuthRequired || now - self.entered_auth_at < params.rate_window_s {
            return false;
        }
        let limit = params.syn_rate_threshold * params.auth_mode_exit_factor;
        let window = params.rate_window_s;
        let calm = self.arrivals.values().all(|log| windowed_rate(log, now, window) < limit);
        if calm {
            self.mode = AuthMode::Normal;
        }
        calm
    }
}

fn windowed_rate(log: &VecDeque<f64>, now: f64, window: f64) -> f64 {
    log.iter().filter(|&&t| t > now - window && t <= now).count() as f64 / window
}

fn rate_of(interval: f64) -> f64 {
    if interval <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / interval
    }
}

/// Public squares the base station registered at deployment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdentityRegistry {
    entries: BTreeMap<NodeId, (BigUint, BigUint)>,
}

impl IdentityRegistry {
    pub fn register(&mut self, id: NodeId, modulus: BigUint, published: BigUint) {
        self.entries.insert(id, (modulus, published));
    }

    pub fn lookup(&self, id: NodeId) -> Option<&(BigUint, BigUint)> {
        self.entries.get(&id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Identification of whoever answers for `claimed`, with the base station as
/// trusted third party. An unregistered identity is rejected outright.
pub fn network_authenticate(
    registry: &IdentityRegistry,
    claimed: NodeId,
    prover: &mut dyn Prover,
    rounds: u32,
    rng: &mut dyn RngCore,
) -> IdentificationResult {
    match registry.lookup(claimed) {
        Some((g, f)) => run_identification(prover, g, f, rounds, rng),
        None => IdentificationResult { accepted: false, rounds_run: 0 },
    }
}

/// Scores every sensor: rejected attackers are true positives, rejected
/// benign nodes false positives. A suspect that was never rejected counts as
/// accepted.
pub fn final_classification(verdicts: &VerdictBook, ground_truth: impl IntoIterator<Item = (NodeId, bool)>) -> ConfusionMatrix {
    let mut cm = ConfusionMatrix::default();
    for (id, attacker) in ground_truth {
        match (attacker, verdicts.is_rejected(id)) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fn_ += 1,
            (false, true) => cm.fp += 1,
            (false, false) => cm.tn += 1,
        }
    }
    cm
}
