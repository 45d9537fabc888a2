//! First-order radio energy model and per-mode power drain.
//!
//! Transmit and receive events are charged per bit. Mode powers are only used
//! for idle and sleep time (plus the fixed sensing cost), so no transmission is
//! paid for twice.

use crate::config::{PowerProfile, RadioParams};

/// Distance at which the path-loss regime switches from d^2 to d^4.
pub fn crossover_distance(radio: &RadioParams) -> f64 {
    (radio.eps_fs / radio.eps_mp).sqrt()
}

/// Energy to transmit `bits` over `distance` meters.
///
/// Below the crossover distance the free-space term applies; at or beyond it
/// the multipath term does.
pub fn tx_energy(bits: u64, distance: f64, radio: &RadioParams) -> f64 {
    let b = bits as f64;
    let amp = if distance < crossover_distance(radio) {
        radio.eps_fs * distance * distance
    } else {
        radio.eps_mp * distance.powi(4)
    };
    b * radio.e_elec + b * amp
}

pub fn rx_energy(bits: u64, radio: &RadioParams) -> f64 {
    bits as f64 * radio.e_elec
}

/// Cost for a cluster head to fuse `member_count` packets.
pub fn aggregation_energy(member_count: u64, bits_per_packet: u64, radio: &RadioParams) -> f64 {
    member_count as f64 * bits_per_packet as f64 * radio.eda
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RadioMode {
    Sleep,
    Idle,
    Receive,
    Transmit,
}

impl RadioMode {
    pub fn power(self, power: &PowerProfile) -> f64 {
        match self {
            RadioMode::Sleep => power.sleep_w,
            RadioMode::Idle => power.idle_w,
            RadioMode::Receive => power.rx_w,
            RadioMode::Transmit => power.tx_w,
        }
    }

    pub fn ledger_category(self) -> EnergyCategory {
        match self {
            RadioMode::Sleep => EnergyCategory::Sleep,
            RadioMode::Idle => EnergyCategory::Idle,
            RadioMode::Receive => EnergyCategory::Rx,
            RadioMode::Transmit => EnergyCategory::Tx,
        }
    }
}

/// Energy drawn by holding the radio in `mode` for `duration` seconds.
pub fn mode_drain(mode: RadioMode, duration: f64, power: &PowerProfile) -> f64 {
    mode.power(power) * duration
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnergyCategory {
    Tx,
    Rx,
    Idle,
    Sleep,
    Sensing,
    Aggregation,
}

impl EnergyCategory {
    pub const ALL: [EnergyCategory; 6] = [
        EnergyCategory::Tx,
        EnergyCategory::Rx,
        EnergyCategory::Idle,
        EnergyCategory::Sleep,
        EnergyCategory::Sensing,
        EnergyCategory::Aggregation,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

/// Running per-category energy totals for one node.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyLedger {
    sums: [f64; 6],
}

impl EnergyLedger {
    pub fn get(&self, category: EnergyCategory) -> f64 {
        self.sums[category.index()]
    }

    pub fn total(&self) -> f64 {
        self.sums.iter().sum()
    }

    fn add(&mut self, category: EnergyCategory, joules: f64) {
        self.sums[category.index()] += joules;
    }
}

/// A node's energy store. The base station is modelled as unbounded: it keeps
/// a ledger but never drains.
#[derive(Debug, Clone, PartialEq)]
pub struct Battery {
    initial: f64,
    residual: f64,
    ledger: EnergyLedger,
    unbounded: bool,
}

impl Battery {
    pub fn new(initial: f64) -> Self {
        Self {
            initial,
            residual: initial,
            ledger: EnergyLedger::default(),
            unbounded: false,
        }
    }

    pub fn unbounded() -> Self {
        Self {
            initial: f64::INFINITY,
            residual: f64::INFINITY,
            ledger: EnergyLedger::default(),
            unbounded: true,
        }
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn ledger(&self) -> &EnergyLedger {
        &self.ledger
    }

    pub fn is_unbounded(&self) -> bool {
        self.unbounded
    }

    pub fn is_depleted(&self) -> bool {
        !self.unbounded && self.residual <= 0.0
    }

    /// Withdraws up to `joules`, returning the amount actually taken. A
    /// request larger than the residual empties the battery exactly.
    pub fn debit(&mut self, category: EnergyCategory, joules: f64) -> f64 {
        debug_assert!(joules >= 0.0 && joules.is_finite());
        if self.unbounded {
            self.ledger.add(category, joules);
            return joules;
        }
        let taken = joules.min(self.residual);
        if taken == self.residual {
            self.residual = 0.0;
        } else {
            self.residual -= taken;
        }
        self.ledger.add(category, taken);
        taken
    }
}
