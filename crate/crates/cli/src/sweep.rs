//! Parameter grids: one simulator run per axis value, seed and defense flag.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use wsn_core::{run, summarize, MetricSummary, RunMetrics, SimConfig};

use crate::error::CliError;

/// Misbehaving-ratio grid used when no values are given.
pub const DEFAULT_RATIO_GRID: [f64; 9] = [0.0, 0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    NodeCount,
    MisbehavingRatio,
    SimTime,
    AttackInterval,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::NodeCount, Axis::MisbehavingRatio, Axis::SimTime, Axis::AttackInterval];

    pub fn name(self) -> &'static str {
        match self {
            Axis::NodeCount => "node_count",
            Axis::MisbehavingRatio => "misbehaving_ratio",
            Axis::SimTime => "sim_time",
            Axis::AttackInterval => "attack_interval",
        }
    }

    pub fn default_values(self) -> Vec<f64> {
        match self {
            Axis::NodeCount => vec![50.0, 100.0, 150.0, 200.0, 250.0, 300.0],
            Axis::MisbehavingRatio => DEFAULT_RATIO_GRID.to_vec(),
            Axis::SimTime => vec![10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0],
            Axis::AttackInterval => vec![1.5, 2.0, 2.5, 3.0, 3.5, 4.0],
        }
    }

    /// `base` with this axis set to `value`.
    pub fn apply(self, base: &SimConfig, value: f64) -> Result<SimConfig, CliError> {
        let mut c = base.clone();
        match self {
            Axis::NodeCount => {
                if !(value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err(CliError::Sweep(format!("node_count value {value} is not a whole number")));
                }
                c.node_count = value as usize;
            }
            Axis::MisbehavingRatio => c.misbehaving_ratio = value,
            Axis::SimTime => c.sim_time_s = value,
            Axis::AttackInterval => c.attack_interval_s = value,
        }
        Ok(c)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "node_count" | "nodes" => Ok(Axis::NodeCount),
            "misbehaving_ratio" | "ratio" => Ok(Axis::MisbehavingRatio),
            "sim_time" | "sim_time_s" => Ok(Axis::SimTime),
            "attack_interval" | "attack_interval_s" => Ok(Axis::AttackInterval),
            _ => Err(CliError::Sweep(format!("unknown axis `{s}`"))),
        }
    }
}

/// Which defense settings each grid point is run under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DefenseSelect {
    On,
    Off,
    #[default]
    Both,
}

impl DefenseSelect {
    /// Flags in row order.
    pub fn flags(self) -> &'static [bool] {
        match self {
            DefenseSelect::On => &[true],
            DefenseSelect::Off => &[false],
            DefenseSelect::Both => &[true, false],
        }
    }
}

impl FromStr for DefenseSelect {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "on" => Ok(DefenseSelect::On),
            "off" => Ok(DefenseSelect::Off),
            "both" => Ok(DefenseSelect::Both),
            _ => Err(CliError::Sweep(format!("defense must be on, off or both, not `{s}`"))),
        }
    }
}

pub(crate) fn check_values(values: &[f64]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Sweep("no values".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Sweep("values must be finite".into()));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Sweep("values must be strictly increasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    /// Seeds `base.rng_seed, base.rng_seed + 1, ...`.
    pub replications: u32,
    pub base: SimConfig,
    pub defense: DefenseSelect,
}

impl SweepSpec {
    pub fn new(axis: Axis, values: Vec<f64>, replications: u32, base: SimConfig) -> Result<Self, CliError> {
        let spec = Self { axis, values, replications, base, defense: DefenseSelect::Both };
        spec.check()?;
        Ok(spec)
    }

    pub fn with_defense(mut self, defense: DefenseSelect) -> Self {
        self.defense = defense;
        self
    }

    pub fn check(&self) -> Result<(), CliError> {
        check_values(&self.values)?;
        if self.replications == 0 {
            return Err(CliError::Sweep("replications must be at least 1".into()));
        }
        Ok(())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..u64::from(self.replications)).map(|r| self.base.rng_seed.wrapping_add(r))
    }

    /// Grid points in output order: value, then seed, then defense flag.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &value in &self.values {
            for seed in self.seeds() {
                for &defense in self.defense.flags() {
                    out.push(Cell { axis: self.axis, value, seed, defense });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub axis: Axis,
    pub value: f64,
    pub seed: u64,
    pub defense: bool,
}

impl Cell {
    pub fn config(&self, base: &SimConfig) -> Result<SimConfig, CliError> {
        let mut c = self.axis.apply(base, self.value)?;
        c.rng_seed = self.seed;
        c.defense_enabled = self.defense;
        c.validate().map_err(|source| CliError::Cell {
            axis: self.axis,
            value: self.value,
            seed: self.seed,
            defense: self.defense,
            source,
        })?;
        Ok(c)
    }
}

/// Runs every cell. All cells are validated before any runs, so a bad cell
/// fails fast and the first offender in grid order is the one reported.
pub fn run_cells(spec: &SweepSpec) -> Result<Vec<(Cell, RunMetrics)>, CliError> {
    spec.check()?;
    let cells = spec.cells();
    let configs = cells.iter().map(|c| c.config(&spec.base)).collect::<Result<Vec<_>, _>>()?;
    let metrics: Vec<RunMetrics> = configs
        .par_iter()
        .map(|c| run(c).expect("configuration validated above"))
        .collect();
    Ok(cells.into_iter().zip(metrics).collect())
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ResultRow>, CliError> {
    Ok(run_cells(spec)?.iter().map(|(c, m)| ResultRow::new(c, &summarize(m))).collect())
}

/// One CSV line. Throughput and PDR are `None` when undefined for the run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub axis: Axis,
    pub value: f64,
    pub seed: u64,
    pub defense: bool,
    pub throughput_kbps: Option<f64>,
    pub pdr_pct: Option<f64>,
    pub lifetime_s: f64,
    pub residual_pct: f64,
    pub dr_pct: f64,
    pub tpr_pct: f64,
    pub tnr_pct: f64,
    pub fpr_pct: f64,
    pub fnr_pct: f64,
}

impl ResultRow {
    pub fn new(cell: &Cell, s: &MetricSummary) -> Self {
        Self {
            axis: cell.axis,
            value: cell.value,
            seed: cell.seed,
            defense: cell.defense,
            throughput_kbps: s.throughput_kbps,
            pdr_pct: s.pdr_pct,
            lifetime_s: s.lifetime_s,
            residual_pct: s.residual_pct,
            dr_pct: s.detection.dr,
            tpr_pct: s.detection.tpr,
            tnr_pct: s.detection.tnr,
            fpr_pct: s.detection.fpr,
            fnr_pct: s.detection.fnr,
        }
    }
}

/// Named presets for `--scenario`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: &'static str,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub replications: Option<u32>,
    /// Overrides applied to the default configuration.
    pub base: SimConfig,
}

pub const SCENARIO_NAMES: [&str; 5] = ["ratio", "nodes", "sim_time", "attack_interval", "smoke"];

pub fn scenario(name: &str) -> Result<Scenario, CliError> {
    let base = SimConfig { misbehaving_ratio: 0.15, ..SimConfig::default() };
    let (axis, base, replications) = match name {
        "ratio" => (Axis::MisbehavingRatio, SimConfig::default(), None),
        "nodes" => (Axis::NodeCount, base, None),
        "sim_time" => (Axis::SimTime, base, None),
        "attack_interval" => (Axis::AttackInterval, base, None),
        "smoke" => {
            let small = SimConfig { node_count: 40, sim_time_s: 10.0, rsa_prime_bits: 64, ..SimConfig::default() };
            let s = Scenario {
                name: "smoke",
                axis: Axis::MisbehavingRatio,
                values: vec![0.0, 0.25],
                replications: Some(2),
                base: small,
            };
            return Ok(s);
        }
        _ => return Err(CliError::UnknownScenario(name.to_string())),
    };
    let name = SCENARIO_NAMES.iter().copied().find(|n| *n == name).expect("matched above");
    Ok(Scenario { name, axis, values: axis.default_values(), replications, base })
}
