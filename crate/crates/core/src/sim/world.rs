//! The simulated network and its event loop.
//!
//! Time advances per event; each node's idle and sleep drain is settled
//! lazily up to the instant it is next touched. Sensors are `0..n`, the base
//! station is `n` and never runs out of energy.
//!
//! One duty cycle `k` starting at `T = k * cycle`, with `span` the nominal
//! listen window less one slot:
//!
//! * `T`: clusters are re-elected (newly elected heads are authenticated by
//!   the base station when the defense is on).
//! * `T + [0, 0.4) * span`: every benign node broadcasts one SYN.
//! * `T + [0.4, 0.8) * span`: members run one RTS/CTS/DATA/ACK exchange
//!   with their head (unclustered nodes with the base station).
//! * `T + 0.9 * span`: heads aggregate and forward one packet to the base
//!   station.
//!
//! Any received frame keeps the receiver awake for one slot after it
//! arrives, so scheduled traffic never stretches the listen window.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::attacker::AttackerProfile;
use crate::clustering::{elect_cluster_heads, Candidate, ClusterAssignment};
use crate::config::SimConfig;
use crate::crypto::ident::{GuessingCheater, HonestProver, IdentificationMaterial, Prover};
use crate::crypto::interlock::{interlock_exchange, DirectChannel};
use crate::crypto::rsa::{generate_keypair, RsaKeyPair, DEFAULT_PUBLIC_EXPONENT};
use crate::crypto::symmetric::{syn_token, SessionKey};
use crate::defense::{
    final_classification, network_authenticate, AuthMode, ClusterAuthState, IdentityRegistry, NodeVerdict,
    SynDecision, VerdictBook,
};
use crate::energy::{aggregation_energy, rx_energy, tx_energy, Battery, EnergyCategory};
use crate::error::ConfigError;
use crate::mac::{mode_segments, Dest, DutyCycleSchedule, Frame, FrameKind, FrameSizes, Leg};
use crate::metrics::RunMetrics;
use crate::sim::engine::EventQueue;
use crate::sim::topology::{build_topology, stream_rng, NodeSpec, Stream};
use crate::sim::trace::{Trace, TraceEvent};
use crate::types::{NodeId, Position};

const SYN_PHASE: (f64, f64) = (0.0, 0.4);
const DATA_PHASE: (f64, f64) = (0.4, 0.8);
const FORWARD_AT: f64 = 0.9;

#[derive(Debug, Clone)]
enum Action {
    CycleStart(u64),
    SendSyn(u32),
    SendData(u32),
    HeadForward(u32),
    AttackTick(usize),
    Broadcast(Frame),
    DirectRts(Frame),
}

#[derive(Debug, Clone)]
struct Node {
    spec: NodeSpec,
    battery: Battery,
    schedule: DutyCycleSchedule,
    settled_to: f64,
    hold_until: f64,
    death: Option<f64>,
    syn_offset: f64,
    data_offset: f64,
    /// Member packets a head has collected this cycle.
    inbox: u64,
}

struct DefenseMaterial {
    modulus_bytes: u32,
    registry: IdentityRegistry,
    secrets: Vec<Option<IdentificationMaterial>>,
    session_keys: Vec<Option<SessionKey>>,
}

/// One replication.
pub struct Simulation {
    cfg: SimConfig,
    nodes: Vec<Node>,
    neighbors: Vec<Vec<u32>>,
    /// Distance to the farthest in-range neighbour, used for broadcasts.
    reach: Vec<f64>,
    bs_pos: Position,
    sizes: FrameSizes,
    slot: f64,
    cycle: f64,
    /// Part of the listen window in which scheduled traffic starts.
    span: f64,
    queue: EventQueue<Action>,
    cycle_index: u64,
    assignment: ClusterAssignment,
    prev_heads: BTreeSet<NodeId>,
    auth: BTreeMap<NodeId, ClusterAuthState>,
    verdicts: VerdictBook,
    defense: Option<DefenseMaterial>,
    attackers: Vec<AttackerProfile>,
    attacker_slot: Vec<Option<usize>>,
    sent: Vec<u64>,
    received: Vec<u64>,
    first_head: BTreeMap<NodeId, f64>,
    attack_rng: ChaCha8Rng,
    crypto_rng: ChaCha8Rng,
    trace: Option<Vec<TraceEvent>>,
    alive: usize,
}

/// Runs one replication on the seeded random topology.
pub fn run(config: &SimConfig) -> Result<RunMetrics, ConfigError> {
    Ok(Simulation::new(config)?.run().0)
}

/// Like [`run`], also returning the event trace.
pub fn run_traced(config: &SimConfig) -> Result<(RunMetrics, Trace), ConfigError> {
    let cfg = SimConfig { record_trace: true, ..config.clone() };
    let (m, t) = Simulation::new(&cfg)?.run();
    Ok((m, t.expect("tracing was requested")))
}

impl Simulation {
    pub fn new(config: &SimConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let specs = build_topology(config);
        Ok(Self::with_nodes(config, specs))
    }

    /// Uses a hand-made topology. Node ids must be `0..specs.len()` in order.
    pub fn with_nodes(config: &SimConfig, specs: Vec<NodeSpec>) -> Self {
        let cfg = SimConfig { node_count: specs.len(), ..config.clone() };
        let n = specs.len();
        let slot = cfg.slot_length_s();
        let cycle = cfg.cycle_period_s;
        let window = cfg.active_window_s();
        let span = if cfg.awake_slots >= 2 { window - slot } else { window };
        let (bx, by) = cfg.base_station_position();
        let bs_pos = Position::new(bx, by);

        let mut traffic_rng = stream_rng(cfg.rng_seed, Stream::Traffic);
        let mut nodes = Vec::with_capacity(n);
        for (i, spec) in specs.iter().enumerate() {
            assert_eq!(spec.id.index(), i, "node ids must be dense and ordered");
            nodes.push(Node {
                spec: *spec,
                battery: Battery::new(cfg.initial_energy_j),
                schedule: DutyCycleSchedule::new(slot, cfg.duty_cycle_slots, cfg.awake_slots),
                settled_to: 0.0,
                hold_until: 0.0,
                death: None,
                syn_offset: span * traffic_rng.gen_range(SYN_PHASE.0..SYN_PHASE.1),
                data_offset: span * traffic_rng.gen_range(DATA_PHASE.0..DATA_PHASE.1),
                inbox: 0,
            });
        }

        let range = cfg.transmission_range_m;
        let mut neighbors = vec![Vec::new(); n];
        let mut reach = vec![0.0f64; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = specs[i].position.distance_to(&specs[j].position);
                if d <= range {
                    neighbors[i].push(j as u32);
                    reach[i] = reach[i].max(d);
                }
            }
        }

        let mut attacker_slot = vec![None; n];
        let mut attackers = Vec::new();
        for s in specs.iter().filter(|s| s.attacker) {
            let targets = neighbors[s.id.index()]
                .iter()
                .filter(|&&j| !specs[j as usize].attacker)
                .map(|&j| NodeId(j))
                .collect();
            attacker_slot[s.id.index()] = Some(attackers.len());
            attackers.push(AttackerProfile::new(s.id, cfg.attack_kind, cfg.attack_interval_s, targets));
        }

        let sizes = FrameSizes {
            data: cfg.packet_size_bytes,
            control: cfg.control_frame_bytes,
            syn: cfg.syn_frame_bytes,
            token: cfg.defense.token_bytes,
        };
        let trace = cfg.record_trace.then(Vec::new);
        Self {
            nodes,
            neighbors,
            reach,
            bs_pos,
            sizes,
            slot,
            cycle,
            span,
            queue: EventQueue::new(),
            cycle_index: 0,
            assignment: ClusterAssignment::default(),
            prev_heads: BTreeSet::new(),
            auth: BTreeMap::new(),
            verdicts: VerdictBook::default(),
            defense: None,
            attackers,
            attacker_slot,
            sent: vec![0; n + 1],
            received: vec![0; n + 1],
            first_head: BTreeMap::new(),
            attack_rng: stream_rng(cfg.rng_seed, Stream::Attack),
            crypto_rng: stream_rng(cfg.rng_seed, Stream::Crypto),
            trace,
            alive: n,
            cfg,
        }
    }

    fn n(&self) -> usize {
        self.nodes.len()
    }

    fn bs(&self) -> NodeId {
        NodeId(self.n() as u32)
    }

    fn is_bs(&self, id: NodeId) -> bool {
        id.index() == self.n()
    }

    fn pos(&self, id: NodeId) -> Position {
        if self.is_bs(id) {
            self.bs_pos
        } else {
            self.nodes[id.index()].spec.position
        }
    }

    fn dist(&self, a: NodeId, b: NodeId) -> f64 {
        self.pos(a).distance_to(&self.pos(b))
    }

    fn is_attacker(&self, id: NodeId) -> bool {
        !self.is_bs(id) && self.nodes[id.index()].spec.attacker
    }

    fn defense_on(&self) -> bool {
        self.cfg.defense_enabled
    }

    fn revoked(&self, id: NodeId) -> bool {
        self.defense_on() && self.verdicts.is_rejected(id)
    }

    fn is_alive(&self, id: NodeId) -> bool {
        self.is_bs(id) || self.nodes[id.index()].death.is_none()
    }

    fn record(&mut self, ev: TraceEvent) {
        if let Some(t) = self.trace.as_mut() {
            t.push(ev);
        }
    }

    fn debit(&mut self, id: NodeId, category: EnergyCategory, joules: f64, time: f64) {
        if self.is_bs(id) || joules <= 0.0 {
            return;
        }
        let node = &mut self.nodes[id.index()];
        if node.death.is_some() {
            return;
        }
        let taken = node.battery.debit(category, joules);
        let died = node.battery.is_depleted();
        if died {
            node.death = Some(time);
            node.settled_to = time;
        }
        self.record(TraceEvent::Debit { node: id, time, category, joules: taken });
        if died {
            self.alive -= 1;
            self.record(TraceEvent::Died { node: id, time });
        }
    }

    /// Charges idle and sleep drain from the last settlement up to `t`.
    fn settle(&mut self, id: NodeId, t: f64) {
        if self.is_bs(id) {
            return;
        }
        let node = &self.nodes[id.index()];
        if node.death.is_some() || t <= node.settled_to {
            return;
        }
        let segs = mode_segments(node.settled_to, t, self.cycle, node.schedule.current_sleep_time, node.hold_until);
        for (a, b, mode) in segs {
            let p = mode.power(&self.cfg.power);
            let need = p * (b - a);
            let residual = self.nodes[id.index()].battery.residual();
            if need >= residual {
                let at = if p > 0.0 { a + residual / p } else { a };
                self.debit(id, mode.ledger_category(), need, at.min(b));
                return;
            }
            self.debit(id, mode.ledger_category(), need, b);
        }
        self.nodes[id.index()].settled_to = t;
    }

    /// A frame reaches `id`: its radio stays on for one slot.
    fn wake(&mut self, id: NodeId, t: f64) {
        if self.is_bs(id) {
            return;
        }
        self.settle(id, t);
        let end = t + self.slot;
        let node = &mut self.nodes[id.index()];
        if node.death.is_none() {
            node.hold_until = node.hold_until.max(end);
        }
    }

    fn charge_tx(&mut self, id: NodeId, bytes: u32, distance: f64, t: f64) {
        let e = tx_energy(u64::from(bytes) * 8, distance, &self.cfg.radio);
        self.debit(id, EnergyCategory::Tx, e, t);
    }

    fn charge_rx(&mut self, id: NodeId, bytes: u32, t: f64) {
        let e = rx_energy(u64::from(bytes) * 8, &self.cfg.radio);
        self.debit(id, EnergyCategory::Rx, e, t);
    }

    fn reject(&mut self, id: NodeId, t: f64) {
        if self.verdicts.raise(id, NodeVerdict::Rejected) {
            self.record(TraceEvent::Verdict { node: id, time: t, verdict: NodeVerdict::Rejected });
        }
    }

    fn cluster_head_of(&self, id: NodeId) -> Option<NodeId> {
        if self.assignment.is_head(id) {
            Some(id)
        } else {
            self.assignment.head_of(id)
        }
    }

    fn in_auth_mode(&self, id: NodeId) -> bool {
        self.defense_on()
            && self
                .cluster_head_of(id)
                .and_then(|h| self.auth.get(&h))
                .is_some_and(|s| s.mode == AuthMode::AuthRequired)
    }

    fn token_for(&self, id: NodeId) -> Option<[u8; 8]> {
        let keys = &self.defense.as_ref()?.session_keys;
        keys.get(id.index())?.as_ref().map(|k| syn_token(k, id, self.cycle_index))
    }

    fn token_valid(&self, frame: &Frame) -> bool {
        match (frame.auth_token, self.defense.as_ref()) {
            (Some(tok), Some(d)) if frame.cycle_index == self.cycle_index => d
                .session_keys
                .get(frame.claimed_id.index())
                .and_then(|k| k.as_ref())
                .is_some_and(|k| syn_token(k, frame.claimed_id, frame.cycle_index) == tok),
            _ => false,
        }
    }

    /// A prover answering for `claimed`: the genuine owner knows the secret,
    /// anyone else can only guess.
    fn prover_for(&self, speaker: NodeId, claimed: NodeId) -> Box<dyn Prover> {
        let d = self.defense.as_ref().expect("defense material");
        if speaker == claimed && !self.is_attacker(speaker) {
            if let Some(Some(m)) = d.secrets.get(speaker.index()) {
                return Box::new(HonestProver::new(m.clone()));
            }
        }
        match d.registry.lookup(claimed) {
            Some((g, f)) => Box::new(GuessingCheater::new(g.clone(), f)),
            None => Box::new(GuessingCheater::new(BigUint::from(3u32), &BigUint::from(1u32))),
        }
    }

    /// Identification of `speaker` (claiming `claimed`) by `evaluator`, with
    /// the base station supplying the registered square.
    fn identify(&mut self, evaluator: NodeId, speaker: NodeId, claimed: NodeId, t: f64) -> bool {
        let mut prover = self.prover_for(speaker, claimed);
        let rounds = self.cfg.defense.fs_rounds;
        let d = self.defense.as_ref().expect("defense material");
        let result = network_authenticate(&d.registry, claimed, prover.as_mut(), rounds, &mut self.crypto_rng);
        let mb = d.modulus_bytes;
        let ctl = self.sizes.control;
        let bs = self.bs();
        if evaluator != bs {
            // Fetch the registered square from the base station.
            let dbs = self.dist(evaluator, bs);
            self.charge_tx(evaluator, ctl, dbs, t);
            self.charge_rx(evaluator, mb, t);
        }
        let dist = self.dist(evaluator, speaker);
        for _ in 0..result.rounds_run {
            self.charge_tx(speaker, mb, dist, t);
            self.charge_rx(evaluator, mb, t);
            self.charge_tx(evaluator, ctl, dist, t);
            self.charge_rx(speaker, ctl, t);
            self.charge_tx(speaker, mb, dist, t);
            self.charge_rx(evaluator, mb, t);
        }
        result.accepted
    }

    fn investigate(&mut self, evaluator: NodeId, suspect: NodeId, claimed: NodeId, t: f64) {
        if self.verdicts.is_rejected(suspect) {
            return;
        }
        if self.verdicts.raise(suspect, NodeVerdict::Suspected) {
            self.record(TraceEvent::Verdict { node: suspect, time: t, verdict: NodeVerdict::Suspected });
        }
        self.settle(suspect, t);
        if !self.is_alive(suspect) {
            return;
        }
        if !self.identify(evaluator, suspect, claimed, t) {
            self.reject(suspect, t);
        }
    }

    /// Head-to-members control broadcast (SYN-A / NO-SYN-A).
    fn broadcast_control(&mut self, head: NodeId, t: f64) {
        let ctl = self.sizes.control;
        let reach = self.reach[head.index()];
        self.charge_tx(head, ctl, reach, t);
        let members: Vec<NodeId> = self.assignment.members(head).collect();
        for m in members {
            if self.revoked(m) {
                continue;
            }
            self.wake(m, t);
            if self.is_alive(m) {
                self.charge_rx(m, ctl, t);
            }
        }
    }

    /// Runs the cluster-level check at head `h`. Returns whether the frame
    /// is accepted.
    fn head_check(&mut self, h: NodeId, frame: &Frame, t: f64) -> bool {
        let token_ok = frame.auth_token.is_some() && self.token_valid(frame);
        let params = self.cfg.defense;
        let Some(state) = self.auth.get_mut(&h) else {
            return false;
        };
        match state.on_syn_received(frame, &self.assignment, t, &params, |_| token_ok) {
            SynDecision::Accept => true,
            SynDecision::EscalateAuth => {
                self.broadcast_control(h, t);
                false
            }
            SynDecision::Reject { suspect } => {
                if let Some(s) = suspect {
                    self.investigate(h, s, frame.claimed_id, t);
                }
                false
            }
        }
    }

    fn absorb(&mut self, id: NodeId, frame: &Frame) {
        if let Some(st) = frame.sleep_time_field {
            let rule = self.cfg.sleep_update;
            self.nodes[id.index()].schedule.absorb_syn(st, rule);
        }
    }

    fn on_syn(&mut self, r: NodeId, frame: &Frame, t: f64) {
        if let Some(a) = self.attacker_slot[r.index()] {
            let syn = self.sizes.syn;
            self.attackers[a].capture_syn(frame, syn);
            return;
        }
        let claimed = frame.claimed_id;
        if self.assignment.is_head(r) {
            if !self.assignment.in_cluster(r, claimed) {
                return;
            }
            if !self.defense_on() || self.head_check(r, frame, t) {
                self.absorb(r, frame);
            }
        } else if let Some(h) = self.assignment.head_of(r) {
            if claimed == h {
                self.absorb(r, frame);
            }
        } else {
            self.absorb(r, frame);
        }
    }

    /// RTS/CTS/DATA/ACK from `src` to `dst`. Returns whether the ACK came
    /// back.
    fn exchange_data(&mut self, src: NodeId, dst: NodeId, t: f64) -> bool {
        let dst_is_head = self.assignment.is_head(dst);
        let token = if dst_is_head && self.in_auth_mode(src) { self.token_for(src) } else { None };
        let extra = if token.is_some() { self.sizes.token } else { 0 };
        let d = self.dist(src, dst);
        let data = self.sizes.data;
        for (kind, bytes, leg) in crate::mac::handshake_frames(&self.sizes, data, extra) {
            let (tx, rx) = match leg {
                Leg::Forward => (src, dst),
                Leg::Backward => (dst, src),
            };
            if !self.is_alive(tx) {
                return false;
            }
            if kind == FrameKind::Ack && self.is_attacker(dst) {
                // A misbehaving receiver swallows the packet.
                return false;
            }
            self.charge_tx(tx, bytes, d, t);
            if !self.is_alive(tx) {
                // The battery ran dry mid-frame; nothing reaches the air.
                return false;
            }
            if kind == FrameKind::Data {
                self.sent[src.index()] += 1;
                self.record(TraceEvent::DataSent { node: src, time: t });
            }
            self.wake(rx, t);
            if !self.is_alive(rx) {
                return false;
            }
            self.charge_rx(rx, bytes, t);
            if kind == FrameKind::Rts && dst_is_head && self.defense_on() && !self.is_attacker(dst) {
                let rts = Frame {
                    kind: FrameKind::Rts,
                    size_bytes: bytes,
                    src,
                    dst: Dest::Node(dst),
                    claimed_id: src,
                    sleep_time_field: None,
                    auth_token: token,
                    cycle_index: self.cycle_index,
                    sent_at: t,
                };
                if !self.head_check(dst, &rts, t) {
                    return false;
                }
            }
            if kind == FrameKind::Ack {
                self.received[dst.index()] += 1;
                self.record(TraceEvent::DataReceived { node: dst, time: t });
            }
        }
        true
    }

    fn setup_defense(&mut self) {
        let e = BigUint::from(DEFAULT_PUBLIC_EXPONENT);
        let keys: RsaKeyPair = generate_keypair(self.cfg.rsa_prime_bits, &e, &mut self.crypto_rng);
        let g = keys.modulus.clone();
        let modulus_bytes = g.bits().div_ceil(8) as u32;
        let n = self.n();
        let mut material = DefenseMaterial {
            modulus_bytes,
            registry: IdentityRegistry::default(),
            secrets: vec![None; n],
            session_keys: vec![None; n],
        };
        let bs = self.bs();
        let ctl = self.sizes.control as usize;
        let mut charges = Vec::new();
        for i in 0..n {
            let id = NodeId(i as u32);
            if self.nodes[i].spec.attacker {
                continue;
            }
            let m = IdentificationMaterial::random(&g, &mut self.crypto_rng);
            material.registry.register(id, m.modulus.clone(), m.published.clone());
            material.secrets[i] = Some(m);
            let outcome = interlock_exchange(id, bs, &keys, &mut DirectChannel, &mut self.crypto_rng)
                .expect("modulus holds a key half");
            if outcome.is_complete() {
                material.session_keys[i] = Some(outcome.session.session_key);
            }
            for (leg, msg) in &outcome.sent {
                charges.push((id, *leg, msg.wire_bytes(modulus_bytes as usize, ctl) as u32));
            }
        }
        self.defense = Some(material);
        for (id, leg, bytes) in charges {
            match leg {
                Leg::Forward => {
                    let d = self.dist(id, bs);
                    self.charge_tx(id, bytes, d, 0.0);
                }
                Leg::Backward => self.charge_rx(id, bytes, 0.0),
            }
        }
    }

    fn elect(&mut self, t: f64) {
        let mut excluded: BTreeSet<NodeId> = BTreeSet::new();
        let mut vetted: BTreeSet<NodeId> = BTreeSet::new();
        let assignment = loop {
            let cands: Vec<Candidate> = self
                .nodes
                .iter()
                .filter(|n| n.death.is_none() && !self.revoked(n.spec.id) && !excluded.contains(&n.spec.id))
                .map(|n| Candidate { id: n.spec.id, position: n.spec.position, residual_energy: n.battery.residual() })
                .collect();
            let a = elect_cluster_heads(
                &cands,
                self.bs_pos,
                self.cfg.transmission_range_m,
                self.cfg.score_rule,
                self.cycle_index,
            );
            if !self.defense_on() {
                break a;
            }
            let fresh: Vec<NodeId> = a
                .heads
                .iter()
                .copied()
                .filter(|h| !self.prev_heads.contains(h) && !vetted.contains(h))
                .collect();
            let mut failed = false;
            let bs = self.bs();
            for h in fresh {
                if self.identify(bs, h, h, t) && self.is_alive(h) {
                    vetted.insert(h);
                } else {
                    if self.is_alive(h) {
                        self.reject(h, t);
                    }
                    excluded.insert(h);
                    failed = true;
                }
            }
            if !failed {
                break a;
            }
        };

        for &h in &assignment.heads {
            self.first_head.entry(h).or_insert(t);
            self.record(TraceEvent::HeadElected { node: h, time: t });
        }
        let mut auth = BTreeMap::new();
        for &h in &assignment.heads {
            let state = match self.auth.get(&h) {
                Some(s) => s.clone(),
                None => match self.assignment.head_of(h).and_then(|old| self.auth.get(&old)) {
                    Some(s) => s.handover(h),
                    None => ClusterAuthState::new(h),
                },
            };
            auth.insert(h, state);
        }
        self.auth = auth;
        if self.defense_on() {
            // Newly elected heads receive their members' session keys.
            let fresh: Vec<(NodeId, u32)> = assignment
                .heads
                .iter()
                .filter(|h| !self.prev_heads.contains(h))
                .map(|&h| (h, assignment.members(h).count() as u32))
                .collect();
            for (h, members) in fresh {
                if members > 0 {
                    self.charge_rx(h, 16 * members, t);
                }
            }
        }
        self.prev_heads = assignment.heads.clone();
        self.assignment = assignment;
    }

    fn schedule(&mut self, time: f64, action: Action) {
        self.queue.schedule(time, action).expect("simulator schedules forward in time");
    }

    fn on_cycle_start(&mut self, k: u64, t: f64) {
        self.cycle_index = k;
        for i in 0..self.n() {
            self.settle(NodeId(i as u32), t);
        }
        if self.defense_on() {
            let params = self.cfg.defense;
            let heads: Vec<NodeId> = self.auth.keys().copied().collect();
            for h in heads {
                if !self.is_alive(h) {
                    continue;
                }
                let exit = self.auth.get_mut(&h).is_some_and(|s| s.maybe_exit_auth_mode(t, &params));
                if exit {
                    self.broadcast_control(h, t);
                }
            }
        }
        self.elect(t);

        for i in 0..self.n() {
            let id = NodeId(i as u32);
            let node = &self.nodes[i];
            if node.death.is_some() || node.spec.attacker || self.revoked(id) {
                continue;
            }
            let (so, dof) = (node.syn_offset, node.data_offset);
            self.schedule(t + so, Action::SendSyn(id.0));
            if self.assignment.is_head(id) {
                self.schedule(t + FORWARD_AT * self.span, Action::HeadForward(id.0));
            } else {
                self.schedule(t + dof, Action::SendData(id.0));
            }
        }
        let next = (k + 1) as f64 * self.cycle;
        if next < self.cfg.sim_time_s {
            self.schedule(next, Action::CycleStart(k + 1));
        }
    }

    fn on_send_syn(&mut self, id: NodeId, t: f64) {
        self.settle(id, t);
        if !self.is_alive(id) {
            return;
        }
        let token = if self.in_auth_mode(id) { self.token_for(id) } else { None };
        let size = self.sizes.syn + if token.is_some() { self.sizes.token } else { 0 };
        let frame = Frame {
            kind: FrameKind::Syn,
            size_bytes: size,
            src: id,
            dst: Dest::Broadcast,
            claimed_id: id,
            sleep_time_field: Some(self.nodes[id.index()].schedule.current_sleep_time),
            auth_token: token,
            cycle_index: self.cycle_index,
            sent_at: t,
        };
        let reach = self.reach[id.index()];
        self.charge_tx(id, size, reach, t);
        self.schedule(t + self.cfg.link_delay_s, Action::Broadcast(frame));
    }

    fn on_broadcast(&mut self, frame: Frame, t: f64) {
        if self.revoked(frame.src) {
            return;
        }
        let receivers = std::mem::take(&mut self.neighbors[frame.src.index()]);
        for &r in &receivers {
            let r = NodeId(r);
            if !self.is_alive(r) {
                continue;
            }
            self.wake(r, t);
            if !self.is_alive(r) {
                continue;
            }
            self.charge_rx(r, frame.size_bytes, t);
            if self.is_alive(r) && frame.kind == FrameKind::Syn {
                self.on_syn(r, &frame, t);
            }
        }
        self.neighbors[frame.src.index()] = receivers;
    }

    fn on_send_data(&mut self, id: NodeId, t: f64) {
        self.settle(id, t);
        if !self.is_alive(id) || self.revoked(id) {
            return;
        }
        let sensing = self.cfg.radio.sensing_energy_j;
        self.debit(id, EnergyCategory::Sensing, sensing, t);
        if !self.is_alive(id) {
            return;
        }
        let dst = match self.assignment.head_of(id) {
            Some(h) if self.assignment.is_head(h) => h,
            Some(_) => return,
            None => self.bs(),
        };
        if self.revoked(dst) {
            return;
        }
        if self.exchange_data(id, dst, t) && !self.is_bs(dst) {
            self.nodes[dst.index()].inbox += 1;
        }
    }

    fn on_head_forward(&mut self, id: NodeId, t: f64) {
        self.settle(id, t);
        if !self.is_alive(id) || self.revoked(id) {
            return;
        }
        let sensing = self.cfg.radio.sensing_energy_j;
        self.debit(id, EnergyCategory::Sensing, sensing, t);
        let count = std::mem::take(&mut self.nodes[id.index()].inbox) + 1;
        let agg = aggregation_energy(count, u64::from(self.sizes.data) * 8, &self.cfg.radio);
        self.debit(id, EnergyCategory::Aggregation, agg, t);
        if self.is_alive(id) {
            let bs = self.bs();
            self.exchange_data(id, bs, t);
        }
    }

    fn on_attack_tick(&mut self, a: usize, t: f64) {
        let id = self.attackers[a].id;
        self.settle(id, t);
        if !self.is_alive(id) {
            return;
        }
        let frames =
            self.attackers[a].emit_attack_traffic(t, self.cycle_index, self.cycle, &self.sizes, &mut self.attack_rng);
        let delay = self.cfg.link_delay_s;
        for (i, f) in frames.into_iter().enumerate() {
            match f.dst {
                Dest::Broadcast => {
                    let reach = self.reach[id.index()];
                    self.charge_tx(id, f.size_bytes, reach, t);
                    self.schedule(t + delay, Action::Broadcast(f));
                }
                Dest::Node(v) => {
                    let d = self.dist(id, v);
                    self.charge_tx(id, f.size_bytes, d, t);
                    self.schedule(t + delay * (i + 1) as f64, Action::DirectRts(f));
                }
            }
            if !self.is_alive(id) {
                break;
            }
        }
        let next = t + self.attackers[a].interval_s;
        if next < self.cfg.sim_time_s {
            self.schedule(next, Action::AttackTick(a));
        }
    }

    fn on_direct_rts(&mut self, frame: Frame, t: f64) {
        let Dest::Node(v) = frame.dst else { return };
        if self.revoked(frame.src) || !self.is_alive(v) {
            return;
        }
        self.wake(v, t);
        if !self.is_alive(v) {
            return;
        }
        self.charge_rx(v, frame.size_bytes, t);
        if self.defense_on()
            && self.assignment.is_head(v)
            && !self.is_attacker(v)
            && self.assignment.in_cluster(v, frame.claimed_id)
            && !self.head_check(v, &frame, t)
        {
            return;
        }
        if !self.is_alive(v) || !self.is_alive(frame.src) {
            return;
        }
        let ctl = self.sizes.control;
        let d = self.dist(v, frame.src);
        self.charge_tx(v, ctl, d, t);
        self.wake(frame.src, t);
        if self.is_alive(frame.src) {
            self.charge_rx(frame.src, ctl, t);
        }
    }

    /// Executes the whole run. The trace is `Some` iff `record_trace` is set.
    pub fn run(mut self) -> (RunMetrics, Option<Trace>) {
        let end = self.cfg.sim_time_s;
        if self.n() > 0 && end > 0.0 {
            if self.defense_on() {
                self.setup_defense();
            }
            self.schedule(0.0, Action::CycleStart(0));
            for a in 0..self.attackers.len() {
                let phase = self.attack_rng.gen_range(0.0..self.attackers[a].interval_s);
                if phase < end {
                    self.schedule(phase, Action::AttackTick(a));
                }
            }
        }
        while let Some(ev) = self.queue.pop() {
            if ev.time > end || self.alive == 0 {
                break;
            }
            let t = ev.time;
            match ev.payload {
                Action::CycleStart(k) => self.on_cycle_start(k, t),
                Action::SendSyn(i) => self.on_send_syn(NodeId(i), t),
                Action::SendData(i) => self.on_send_data(NodeId(i), t),
                Action::HeadForward(i) => self.on_head_forward(NodeId(i), t),
                Action::AttackTick(a) => self.on_attack_tick(a, t),
                Action::Broadcast(f) => self.on_broadcast(f, t),
                Action::DirectRts(f) => self.on_direct_rts(f, t),
            }
        }
        let stop = if self.n() > 0 && self.alive == 0 {
            self.nodes.iter().filter_map(|n| n.death).fold(0.0, f64::max)
        } else {
            end
        };
        for i in 0..self.n() {
            self.settle(NodeId(i as u32), stop);
        }
        self.finish(stop)
    }

    fn finish(mut self, stop: f64) -> (RunMetrics, Option<Trace>) {
        let mut m = RunMetrics::empty(self.cfg.packet_size_bytes);
        m.start_s = 0.0;
        m.stop_s = stop;
        m.sent = std::mem::take(&mut self.sent);
        m.received = std::mem::take(&mut self.received);
        m.node_end_times = self.nodes.iter().map(|n| n.death.unwrap_or(stop).min(stop)).collect();
        for (&h, &t0) in &self.first_head {
            let end = m.node_end_times[h.index()];
            m.head_lifetimes.insert(h, (end - t0).max(0.0));
        }
        m.initial_energy = self.nodes.iter().map(|n| n.battery.initial()).collect();
        m.residual_energy = self.nodes.iter().map(|n| n.battery.residual()).collect();
        m.ledgers = self.nodes.iter().map(|n| *n.battery.ledger()).collect();
        m.confusion = final_classification(&self.verdicts, self.nodes.iter().map(|n| (n.spec.id, n.spec.attacker)));
        let trace = self.trace.take().map(|events| Trace {
            start_s: 0.0,
            stop_s: stop,
            packet_size_bytes: self.cfg.packet_size_bytes,
            initial_energy: m.initial_energy.clone(),
            attacker: self.nodes.iter().map(|n| n.spec.attacker).collect(),
            events,
        });
        (m, trace)
    }
}
