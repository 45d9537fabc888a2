//! Simulation parameters.
//!
//! Every default below is the deployment used for the reference experiments:
//! an 80 x 80 m field, 300 nodes, 70 s of simulated time, 20-slot duty cycle,
//! 512-byte data packets, 30-byte control frames and 35 J batteries.

use crate::error::ConfigError;

/// First-order radio constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    /// Electronics energy per bit, J/bit.
    pub e_elec: f64,
    /// Free-space amplifier energy, J/bit/m^2.
    pub eps_fs: f64,
    /// Multipath amplifier energy, J/bit/m^4.
    pub eps_mp: f64,
    /// Data aggregation energy at a cluster head, J/bit.
    pub eda: f64,
    /// Energy of one sensing action, J.
    pub sensing_energy_j: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            e_elec: 100e-9,
            eps_fs: 20e-12,
            eps_mp: 0.0015e-12,
            eda: 5e-9,
            sensing_energy_j: 5e-8,
        }
    }
}

/// Per-mode radio power draw, watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerProfile {
    pub idle_w: f64,
    pub rx_w: f64,
    pub tx_w: f64,
    pub sleep_w: f64,
}

impl Default for PowerProfile {
    fn default() -> Self {
        Self {
            idle_w: 41e-3,
            rx_w: 45e-3,
            tx_w: 41e-3,
            sleep_w: 25e-6,
        }
    }
}

/// Knobs of the two-level authentication defense.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefenseParams {
    /// Control frames per second per member above which a head suspects an attack.
    pub syn_rate_threshold: f64,
    /// A head leaves authentication mode once every member's rate is below
    /// `syn_rate_threshold * auth_mode_exit_factor`.
    pub auth_mode_exit_factor: f64,
    /// Challenge rounds of one identification session.
    pub fs_rounds: u32,
    /// Size of the authentication token appended to SYN/RTS in auth mode.
    pub token_bytes: u32,
    /// Look-back window over which a head averages arrival rates when
    /// deciding to leave authentication mode, seconds.
    pub rate_window_s: f64,
}

impl Default for DefenseParams {
    fn default() -> Self {
        Self {
            syn_rate_threshold: 2.0,
            auth_mode_exit_factor: 0.75,
            fs_rounds: 20,
            token_bytes: 8,
            rate_window_s: 3.0,
        }
    }
}

/// Cluster-head election score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreRule {
    /// `r = e * d`, the product of residual energy and distance to the sink.
    #[default]
    EnergyTimesDistance,
    /// `r = e / (1 + d)`, favouring energetic nodes close to the sink.
    EnergyOverDistance,
}

/// How a received SYN sleep time is folded into the local schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SleepUpdateRule {
    /// `(old + received) / 2`
    #[default]
    Average,
    /// `old + received / 2`
    Literal,
}

/// Denial-of-sleep behaviour of misbehaving nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AttackKind {
    /// Re-broadcast the most recently overheard SYN verbatim.
    #[default]
    SynReplay,
    /// Send an RTS to every in-range victim.
    RtsFlood,
    /// Broadcast SYNs under another node's identity advertising a long wake period.
    ForgedIdSyn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub field_width_m: f64,
    pub field_height_m: f64,
    pub node_count: usize,
    pub sim_time_s: f64,
    /// Slots per duty cycle.
    pub duty_cycle_slots: u32,
    /// Slots at the start of each cycle in which the radio listens.
    pub awake_slots: u32,
    /// Length of one duty cycle (one clustering round), seconds.
    pub cycle_period_s: f64,
    pub transmission_range_m: f64,
    pub packet_size_bytes: u32,
    pub control_frame_bytes: u32,
    pub syn_frame_bytes: u32,
    pub initial_energy_j: f64,
    pub misbehaving_ratio: f64,
    pub attack_interval_s: f64,
    pub attack_kind: AttackKind,
    pub defense_enabled: bool,
    pub rng_seed: u64,
    /// Fixed per-frame latency used only to order deliveries.
    pub link_delay_s: f64,
    /// Bit length of each RSA prime held by the base station.
    pub rsa_prime_bits: u64,
    /// Base-station position; `None` places it at the field centre.
    pub base_station: Option<(f64, f64)>,
    pub score_rule: ScoreRule,
    pub sleep_update: SleepUpdateRule,
    /// Record every counter and ledger mutation for offline replay.
    pub record_trace: bool,
    pub radio: RadioParams,
    pub power: PowerProfile,
    pub defense: DefenseParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            field_width_m: 80.0,
            field_height_m: 80.0,
            node_count: 300,
            sim_time_s: 70.0,
            duty_cycle_slots: 20,
            awake_slots: 2,
            cycle_period_s: 1.0,
            transmission_range_m: 150.0,
            packet_size_bytes: 512,
            control_frame_bytes: 30,
            syn_frame_bytes: 10,
            initial_energy_j: 35.0,
            misbehaving_ratio: 0.0,
            attack_interval_s: 1.5,
            attack_kind: AttackKind::SynReplay,
            defense_enabled: true,
            rng_seed: 1,
            link_delay_s: 1e-3,
            rsa_prime_bits: 512,
            base_station: None,
            score_rule: ScoreRule::EnergyTimesDistance,
            sleep_update: SleepUpdateRule::Average,
            record_trace: false,
            radio: RadioParams::default(),
            power: PowerProfile::default(),
            defense: DefenseParams::default(),
        }
    }
}

fn positive(key: &'static str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::OutOfRange { key, value: v.to_string(), expected: "> 0" })
    }
}

fn non_negative(key: &'static str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(ConfigError::OutOfRange { key, value: v.to_string(), expected: ">= 0" })
    }
}

impl SimConfig {
    pub fn slot_length_s(&self) -> f64 {
        self.cycle_period_s / f64::from(self.duty_cycle_slots)
    }

    /// Nominal listen window at the start of each cycle.
    pub fn active_window_s(&self) -> f64 {
        self.slot_length_s() * f64::from(self.awake_slots)
    }

    /// `ceil(ratio * n)` attackers.
    pub fn attacker_count(&self) -> usize {
        let raw = self.misbehaving_ratio * self.node_count as f64;
        // 0.05 * 300 lands a hair above 15 in binary; snap before ceil.
        let snapped = (raw * 1e9).round() / 1e9;
        (snapped.ceil() as usize).min(self.node_count)
    }

    pub fn base_station_position(&self) -> (f64, f64) {
        self.base_station
            .unwrap_or((self.field_width_m / 2.0, self.field_height_m / 2.0))
    }

    /// `node_count = 0` and `sim_time_s = 0` are accepted as degenerate runs.
    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("field_width_m", self.field_width_m)?;
        positive("field_height_m", self.field_height_m)?;
        non_negative("sim_time_s", self.sim_time_s)?;
        if self.duty_cycle_slots == 0 {
            return Err(ConfigError::OutOfRange {
                key: "duty_cycle_slots",
                value: "0".into(),
                expected: ">= 1",
            });
        }
        if self.awake_slots > self.duty_cycle_slots {
            return Err(ConfigError::OutOfRange {
                key: "awake_slots",
                value: self.awake_slots.to_string(),
                expected: "<= duty_cycle_slots",
            });
        }
        positive("cycle_period_s", self.cycle_period_s)?;
        positive("transmission_range_m", self.transmission_range_m)?;
        for (key, v) in [
            ("packet_size_bytes", self.packet_size_bytes),
            ("control_frame_bytes", self.control_frame_bytes),
            ("syn_frame_bytes", self.syn_frame_bytes),
        ] {
            positive(key, f64::from(v))?;
        }
        positive("initial_energy_j", self.initial_energy_j)?;
        if !(0.0..=1.0).contains(&self.misbehaving_ratio) {
            return Err(ConfigError::OutOfRange {
                key: "misbehaving_ratio",
                value: self.misbehaving_ratio.to_string(),
                expected: "within [0, 1]",
            });
        }
        positive("attack_interval_s", self.attack_interval_s)?;
        positive("link_delay_s", self.link_delay_s)?;
        if self.rsa_prime_bits < 16 {
            return Err(ConfigError::OutOfRange {
                key: "rsa_prime_bits",
                value: self.rsa_prime_bits.to_string(),
                expected: ">= 16",
            });
        }
        if let Some((x, y)) = self.base_station {
            non_negative("base_station_x", x)?;
            non_negative("base_station_y", y)?;
        }

        positive("e_elec", self.radio.e_elec)?;
        positive("eps_fs", self.radio.eps_fs)?;
        positive("eps_mp", self.radio.eps_mp)?;
        positive("eda", self.radio.eda)?;
        positive("sensing_energy_j", self.radio.sensing_energy_j)?;

        positive("idle_w", self.power.idle_w)?;
        positive("rx_w", self.power.rx_w)?;
        positive("tx_w", self.power.tx_w)?;
        positive("sleep_w", self.power.sleep_w)?;
        if self.power.sleep_w >= self.power.idle_w {
            return Err(ConfigError::OutOfRange {
                key: "sleep_w",
                value: self.power.sleep_w.to_string(),
                expected: "< idle_w",
            });
        }

        positive("syn_rate_threshold", self.defense.syn_rate_threshold)?;
        positive("rate_window_s", self.defense.rate_window_s)?;
        let f = self.defense.auth_mode_exit_factor;
        if !(f > 0.0 && f <= 1.0) {
            return Err(ConfigError::OutOfRange {
                key: "auth_mode_exit_factor",
                value: f.to_string(),
                expected: "within (0, 1]",
            });
        }
        if self.defense.fs_rounds == 0 {
            return Err(ConfigError::OutOfRange {
                key: "fs_rounds",
                value: "0".into(),
                expected: ">= 1",
            });
        }
        Ok(())
    }
}
