//! Flat `key = value` experiment files.
//!
//! Keys are the field names of [`SimConfig`] and its nested radio, power and
//! defense parameters, plus a few sweep keys. `#` starts a comment. Keys not
//! mentioned keep their defaults.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use wsn_core::{AttackKind, ConfigError, ScoreRule, SimConfig, SleepUpdateRule};

use crate::error::CliError;
use crate::sweep::{Axis, DefenseSelect};

/// Everything an experiment file can set.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentFile {
    pub base: SimConfig,
    pub axis: Option<Axis>,
    pub values: Option<Vec<f64>>,
    pub replications: Option<u32>,
    pub defense: Option<DefenseSelect>,
}

/// Reads `path` on top of the default configuration.
pub fn parse_config(path: &Path) -> Result<ExperimentFile, CliError> {
    parse_config_onto(path, SimConfig::default())
}

pub fn parse_config_onto(path: &Path, base: SimConfig) -> Result<ExperimentFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    parse_config_str(&text, base)
}

fn canonical(key: &str) -> &str {
    match key {
        "nodes" => "node_count",
        "sim_time" => "sim_time_s",
        "attack_interval" => "attack_interval_s",
        "seed" => "rng_seed",
        "defense" => "defense_enabled",
        "axis" => "sweep_axis",
        "values" => "sweep_values",
        "seeds" => "replications",
        other => other,
    }
}

struct Entry<'a> {
    key: &'a str,
    value: &'a str,
    line: usize,
}

impl Entry<'_> {
    fn bad(&self, expected: &'static str) -> CliError {
        CliError::InvalidValue { key: self.key.to_string(), line: self.line, value: self.value.to_string(), expected }
    }

    fn parse<T: FromStr>(&self, expected: &'static str) -> Result<T, CliError> {
        self.value.parse().map_err(|_| self.bad(expected))
    }

    fn float(&self) -> Result<f64, CliError> {
        let v: f64 = self.parse("a number")?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.bad("a finite number"))
        }
    }

    fn flag(&self) -> Result<bool, CliError> {
        match self.value {
            "true" | "on" | "yes" => Ok(true),
            "false" | "off" | "no" => Ok(false),
            _ => Err(self.bad("true or false")),
        }
    }
}

pub fn parse_config_str(text: &str, base: SimConfig) -> Result<ExperimentFile, CliError> {
    let mut out = ExperimentFile { base, axis: None, values: None, replications: None, defense: None };
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content.split_once('=').ok_or(CliError::Syntax { line })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(CliError::Syntax { line });
        }
        let key = canonical(k);
        if let Some(&first) = seen.get(key) {
            return Err(CliError::DuplicateKey { key: k.to_string(), line, first });
        }
        let entry = Entry { key: k, value: v, line };
        apply(&mut out, key, &entry)?;
        seen.insert(key.to_string(), line);
    }
    out.base.validate().map_err(|e| located(e, &seen))?;
    if let Some(values) = &out.values {
        crate::sweep::check_values(values)?;
    }
    if out.replications == Some(0) {
        return Err(CliError::OutOfRange {
            key: "replications".into(),
            line: seen.get("replications").copied(),
            value: "0".into(),
            expected: ">= 1".into(),
        });
    }
    Ok(out)
}

fn located(err: ConfigError, seen: &BTreeMap<String, usize>) -> CliError {
    let ConfigError::OutOfRange { key, value, expected } = err;
    let file_key = match key {
        "base_station_x" | "base_station_y" => "base_station",
        k => k,
    };
    CliError::OutOfRange {
        key: key.to_string(),
        line: seen.get(file_key).copied(),
        value,
        expected: expected.to_string(),
    }
}

fn apply(out: &mut ExperimentFile, key: &str, e: &Entry) -> Result<(), CliError> {
    let c = &mut out.base;
    match key {
        "field_width_m" => c.field_width_m = e.float()?,
        "field_height_m" => c.field_height_m = e.float()?,
        "node_count" => c.node_count = e.parse("a non-negative integer")?,
        "sim_time_s" => c.sim_time_s = e.float()?,
        "duty_cycle_slots" => c.duty_cycle_slots = e.parse("a non-negative integer")?,
        "awake_slots" => c.awake_slots = e.parse("a non-negative integer")?,
        "cycle_period_s" => c.cycle_period_s = e.float()?,
        "transmission_range_m" => c.transmission_range_m = e.float()?,
        "packet_size_bytes" => c.packet_size_bytes = e.parse("a non-negative integer")?,
        "control_frame_bytes" => c.control_frame_bytes = e.parse("a non-negative integer")?,
        "syn_frame_bytes" => c.syn_frame_bytes = e.parse("a non-negative integer")?,
        "initial_energy_j" => c.initial_energy_j = e.float()?,
        "misbehaving_ratio" => c.misbehaving_ratio = e.float()?,
        "attack_interval_s" => c.attack_interval_s = e.float()?,
        "attack_kind" => {
            c.attack_kind = match e.value {
                "syn_replay" => AttackKind::SynReplay,
                "rts_flood" => AttackKind::RtsFlood,
                "forged_id_syn" => AttackKind::ForgedIdSyn,
                _ => return Err(e.bad("syn_replay, rts_flood or forged_id_syn")),
            }
        }
        "defense_enabled" => {
            let sel = if e.value == "both" { DefenseSelect::Both } else if e.flag()? { DefenseSelect::On } else { DefenseSelect::Off };
            c.defense_enabled = sel != DefenseSelect::Off;
            out.defense = Some(sel);
        }
        "rng_seed" => c.rng_seed = e.parse("a non-negative integer")?,
        "link_delay_s" => c.link_delay_s = e.float()?,
        "rsa_prime_bits" => c.rsa_prime_bits = e.parse("a non-negative integer")?,
        "base_station" => {
            let parts: Vec<&str> = e.value.split(',').map(str::trim).collect();
            let [x, y] = parts.as_slice() else { return Err(e.bad("`x, y`")) };
            let x: f64 = x.parse().map_err(|_| e.bad("`x, y`"))?;
            let y: f64 = y.parse().map_err(|_| e.bad("`x, y`"))?;
            c.base_station = Some((x, y));
        }
        "score_rule" => {
            c.score_rule = match e.value {
                "energy_times_distance" => ScoreRule::EnergyTimesDistance,
                "energy_over_distance" => ScoreRule::EnergyOverDistance,
                _ => return Err(e.bad("energy_times_distance or energy_over_distance")),
            }
        }
        "sleep_update" => {
            c.sleep_update = match e.value {
                "average" => SleepUpdateRule::Average,
                "literal" => SleepUpdateRule::Literal,
                _ => return Err(e.bad("average or literal")),
            }
        }
        "record_trace" => c.record_trace = e.flag()?,
        "e_elec" => c.radio.e_elec = e.float()?,
        "eps_fs" => c.radio.eps_fs = e.float()?,
        "eps_mp" => c.radio.eps_mp = e.float()?,
        "eda" => c.radio.eda = e.float()?,
        "sensing_energy_j" => c.radio.sensing_energy_j = e.float()?,
        "idle_w" => c.power.idle_w = e.float()?,
        "rx_w" => c.power.rx_w = e.float()?,
        "tx_w" => c.power.tx_w = e.float()?,
        "sleep_w" => c.power.sleep_w = e.float()?,
        "syn_rate_threshold" => c.defense.syn_rate_threshold = e.float()?,
        "auth_mode_exit_factor" => c.defense.auth_mode_exit_factor = e.float()?,
        "fs_rounds" => c.defense.fs_rounds = e.parse("a non-negative integer")?,
        "token_bytes" => c.defense.token_bytes = e.parse("a non-negative integer")?,
        "rate_window_s" => c.defense.rate_window_s = e.float()?,
        "sweep_axis" => out.axis = Some(e.value.parse().map_err(|_| e.bad("an axis name"))?),
        "sweep_values" => {
            let mut vs = Vec::new();
            for part in e.value.split(',') {
                let v: f64 = part.trim().parse().map_err(|_| e.bad("a comma-separated list of numbers"))?;
                vs.push(v);
            }
            out.values = Some(vs);
        }
        "replications" => out.replications = Some(e.parse("a positive integer")?),
        _ => return Err(CliError::UnknownKey { key: e.key.to_string(), line: e.line }),
    }
    Ok(())
}
