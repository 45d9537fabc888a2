//! Duty-cycled medium access: frames, sleep schedules, SYN synchronization
//! and the RTS/CTS/DATA/ACK handshake.

use crate::config::SleepUpdateRule;
use crate::energy::RadioMode;
use crate::types::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrameKind {
    Data,
    Rts,
    Cts,
    Ack,
    Syn,
    SynA,
    NoSynA,
    KeyX,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dest {
    Node(NodeId),
    Broadcast,
}

/// A MAC frame on the air.
///
/// `src` is the transmitting radio. `claimed_id` is the identity field a SYN
/// (or RTS) carries in its payload, which is what a receiver reasons about;
/// a replayed or forged frame has `claimed_id != src`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub kind: FrameKind,
    pub size_bytes: u32,
    pub src: NodeId,
    pub dst: Dest,
    pub claimed_id: NodeId,
    /// Advertised sleep instant within the cycle, SYN only.
    pub sleep_time_field: Option<f64>,
    pub auth_token: Option<[u8; 8]>,
    /// Duty-cycle index the sender stamped into the frame.
    pub cycle_index: u64,
    pub sent_at: f64,
}

impl Frame {
    pub fn bits(&self) -> u64 {
        u64::from(self.size_bytes) * 8
    }

    /// Payload equality, ignoring who put it on the air and when.
    pub fn same_payload(&self, other: &Frame) -> bool {
        self.kind == other.kind
            && self.size_bytes == other.size_bytes
            && self.claimed_id == other.claimed_id
            && self.sleep_time_field == other.sleep_time_field
            && self.auth_token == other.auth_token
            && self.cycle_index == other.cycle_index
    }
}

/// Frame sizes in bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameSizes {
    pub data: u32,
    pub control: u32,
    pub syn: u32,
    pub token: u32,
}

impl FrameSizes {
    pub fn of(&self, kind: FrameKind) -> u32 {
        match kind {
            FrameKind::Data => self.data,
            FrameKind::Syn => self.syn,
            FrameKind::Rts | FrameKind::Cts | FrameKind::Ack | FrameKind::SynA | FrameKind::NoSynA | FrameKind::KeyX => {
                self.control
            }
        }
    }
}

/// Folds a SYN's advertised sleep time into the local one.
pub fn update_sleep_time(old: f64, received: f64, rule: SleepUpdateRule) -> f64 {
    match rule {
        SleepUpdateRule::Average => (old + received) / 2.0,
        SleepUpdateRule::Literal => old + received / 2.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DutyCycleSchedule {
    pub slot_length: f64,
    pub slots_per_cycle: u32,
    pub awake_slots: u32,
    /// Offset into each cycle at which the radio goes to sleep.
    pub current_sleep_time: f64,
}

impl DutyCycleSchedule {
    pub fn new(slot_length: f64, slots_per_cycle: u32, awake_slots: u32) -> Self {
        Self {
            slot_length,
            slots_per_cycle,
            awake_slots: awake_slots.min(slots_per_cycle),
            current_sleep_time: slot_length * f64::from(awake_slots.min(slots_per_cycle)),
        }
    }

    pub fn cycle_length(&self) -> f64 {
        self.slot_length * f64::from(self.slots_per_cycle)
    }

    pub fn nominal_awake(&self) -> f64 {
        self.slot_length * f64::from(self.awake_slots)
    }

    pub fn nominal_sleep_fraction(&self) -> f64 {
        1.0 - f64::from(self.awake_slots) / f64::from(self.slots_per_cycle)
    }

    /// Applies a received SYN, clamping the result into one cycle.
    pub fn absorb_syn(&mut self, received: f64, rule: SleepUpdateRule) {
        let next = update_sleep_time(self.current_sleep_time, received, rule);
        self.current_sleep_time = next.clamp(0.0, self.cycle_length());
    }
}

/// Splits `[from, to)` into chronological awake/asleep pieces.
///
/// The radio listens during `[k*T, k*T + listen)` of every cycle `k`, and
/// additionally until `hold_until` (the end of the last activity hold).
pub fn mode_segments(from: f64, to: f64, cycle: f64, listen: f64, hold_until: f64) -> Vec<(f64, f64, RadioMode)> {
    let mut out: Vec<(f64, f64, RadioMode)> = Vec::new();
    let mut t = from;
    while t < to {
        let mut k = (t / cycle).floor();
        if (k + 1.0) * cycle <= t {
            k += 1.0;
        }
        let start = k * cycle;
        let next = (k + 1.0) * cycle;
        let window_end = start + listen;
        let in_window = t < window_end;
        let held = t < hold_until;
        let (end, mode) = if in_window || held {
            let mut e = t;
            if in_window {
                e = e.max(window_end);
            }
            if held {
                e = e.max(hold_until);
            }
            (e.min(next).min(to), RadioMode::Idle)
        } else {
            (next.min(to), RadioMode::Sleep)
        };
        let end = if end > t { end } else { next.min(to).max(t) };
        if end <= t {
            break;
        }
        match out.last_mut() {
            Some(last) if last.2 == mode && last.1 == t => last.1 = end,
            _ => out.push((t, end, mode)),
        }
        t = end;
    }
    out
}

/// Direction of one handshake leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    Forward,
    Backward,
}

/// Frames of an RTS/CTS/DATA/ACK exchange in order. A zero-byte payload
/// skips the DATA leg.
pub fn handshake_frames(sizes: &FrameSizes, payload_bytes: u32, rts_extra: u32) -> Vec<(FrameKind, u32, Leg)> {
    let mut legs = vec![
        (FrameKind::Rts, sizes.control + rts_extra, Leg::Forward),
        (FrameKind::Cts, sizes.control, Leg::Backward),
    ];
    if payload_bytes > 0 {
        legs.push((FrameKind::Data, payload_bytes, Leg::Forward));
    }
    legs.push((FrameKind::Ack, sizes.control, Leg::Backward));
    legs
}
