//! Experiment runner for the `wsn-core` simulator.
//!
//! An experiment is a [`SweepSpec`]: a base configuration, one axis to vary,
//! the values to visit, and a replication count. [`resolve`] builds one from
//! a named scenario, a config file and command-line overrides, in that order
//! of increasing precedence.

pub mod config_file;
pub mod error;
pub mod output;
pub mod sweep;

use std::path::{Path, PathBuf};

pub use config_file::{parse_config, parse_config_str, ExperimentFile};
pub use error::CliError;
pub use output::{read_csv, summarize_rows, summary_path, write_csv, write_summary_csv, SummaryRow, HEADER};
pub use sweep::{run_cells, run_sweep, scenario, Axis, Cell, DefenseSelect, ResultRow, Scenario, SweepSpec};

use wsn_core::SimConfig;

pub const DEFAULT_REPLICATIONS: u32 = 10;

/// Command-line overrides; `None` leaves the lower layer in charge.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Options {
    pub config: Option<PathBuf>,
    /// `AXIS` or `AXIS=v1,v2,...`
    pub sweep: Option<String>,
    pub seeds: Option<u32>,
    pub defense: Option<DefenseSelect>,
    pub scenario: Option<String>,
}

/// Splits `AXIS=v1,v2,...`. Without `=`, the axis keeps its default grid.
pub fn parse_sweep_arg(arg: &str) -> Result<(Axis, Option<Vec<f64>>), CliError> {
    let (axis, values) = match arg.split_once('=') {
        Some((a, v)) => (a.trim(), Some(v)),
        None => (arg.trim(), None),
    };
    let axis: Axis = axis.parse()?;
    let values = values
        .map(|v| {
            v.split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Sweep(format!("`{s}` is not a number"))))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    Ok((axis, values))
}

pub fn resolve(opts: &Options) -> Result<SweepSpec, CliError> {
    let (mut base, mut axis, mut values, mut replications) = match &opts.scenario {
        Some(name) => {
            let s = scenario(name)?;
            (s.base, s.axis, Some(s.values), s.replications.unwrap_or(DEFAULT_REPLICATIONS))
        }
        None => (SimConfig::default(), Axis::MisbehavingRatio, None, DEFAULT_REPLICATIONS),
    };
    let mut defense = DefenseSelect::Both;
    if let Some(path) = &opts.config {
        let file = config_file::parse_config_onto(path, base)?;
        base = file.base;
        if let Some(a) = file.axis {
            if a != axis {
                values = None;
            }
            axis = a;
        }
        values = file.values.or(values);
        replications = file.replications.unwrap_or(replications);
        defense = file.defense.unwrap_or(defense);
    }
    if let Some(arg) = &opts.sweep {
        let (a, v) = parse_sweep_arg(arg)?;
        if a != axis {
            values = None;
        }
        axis = a;
        values = v.or(values);
    }
    replications = opts.seeds.unwrap_or(replications);
    defense = opts.defense.unwrap_or(defense);
    let values = values.unwrap_or_else(|| axis.default_values());
    Ok(SweepSpec::new(axis, values, replications, base)?.with_defense(defense))
}

/// What a finished experiment wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: usize,
    pub out: PathBuf,
    pub summary: PathBuf,
}

/// Runs `spec` and writes the per-run CSV plus its `_summary` companion.
pub fn execute(spec: &SweepSpec, out: &Path) -> Result<Report, CliError> {
    let rows = run_sweep(spec)?;
    write_csv(&rows, out)?;
    let summary = summary_path(out);
    write_summary_csv(&summarize_rows(&rows), &summary)?;
    Ok(Report { rows: rows.len(), out: out.to_path_buf(), summary })
}
