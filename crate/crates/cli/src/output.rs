//! CSV results and per-grid-point means.
//!
//! Numbers are written with six decimals. An undefined throughput or PDR
//! (zero-length run, no traffic sent) is an empty field.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{on_off, CliError};
use crate::sweep::{Axis, ResultRow};

pub const HEADER: [&str; 13] = [
    "axis",
    "value",
    "seed",
    "defense",
    "throughput_kbps",
    "pdr_pct",
    "lifetime_s",
    "residual_pct",
    "dr_pct",
    "tpr_pct",
    "tnr_pct",
    "fpr_pct",
    "fnr_pct",
];

pub const SUMMARY_HEADER: [&str; 13] = [
    "axis",
    "value",
    "defense",
    "replications",
    "throughput_kbps",
    "pdr_pct",
    "lifetime_s",
    "residual_pct",
    "dr_pct",
    "tpr_pct",
    "tnr_pct",
    "fpr_pct",
    "fnr_pct",
];

fn num(v: f64) -> String {
    format!("{v:.6}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn row_record(r: &ResultRow) -> [String; 13] {
    [
        r.axis.name().to_string(),
        num(r.value),
        r.seed.to_string(),
        on_off(r.defense).to_string(),
        opt(r.throughput_kbps),
        opt(r.pdr_pct),
        num(r.lifetime_s),
        num(r.residual_pct),
        num(r.dr_pct),
        num(r.tpr_pct),
        num(r.tnr_pct),
        num(r.fpr_pct),
        num(r.fnr_pct),
    ]
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Csv(e.to_string())
}

fn write_records<W: Write, const N: usize>(w: W, header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> Result<(), csv::Error> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(header)?;
    for r in rows {
        wtr.write_record(&r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_rows<W: Write>(rows: &[ResultRow], w: W) -> Result<(), CliError> {
    write_records(w, HEADER, rows.iter().map(row_record)).map_err(csv_err)
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|source| CliError::Write { path: path.to_path_buf(), source })?;
    write_rows(rows, std::io::BufWriter::new(file)).map_err(|e| io_context(e, path))
}

fn io_context(e: CliError, path: &Path) -> CliError {
    match e {
        CliError::Csv(msg) => CliError::Write { path: path.to_path_buf(), source: std::io::Error::other(msg) },
        other => other,
    }
}

pub fn read_rows<R: std::io::Read>(r: R) -> Result<Vec<ResultRow>, CliError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = rdr.headers().map_err(csv_err)?;
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(CliError::Csv(format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let bad = |field: &str| CliError::Csv(format!("row {}: bad {field}", i + 1));
        let f = |idx: usize| -> Result<f64, CliError> { rec[idx].parse().map_err(|_| bad(HEADER[idx])) };
        let o = |idx: usize| -> Result<Option<f64>, CliError> {
            if rec[idx].is_empty() {
                Ok(None)
            } else {
                f(idx).map(Some)
            }
        };
        let axis: Axis = rec[0].parse().map_err(|_| bad("axis"))?;
        let defense = match &rec[3] {
            "on" => true,
            "off" => false,
            _ => return Err(bad("defense")),
        };
        out.push(ResultRow {
            axis,
            value: f(1)?,
            seed: rec[2].parse().map_err(|_| bad("seed"))?,
            defense,
            throughput_kbps: o(4)?,
            pdr_pct: o(5)?,
            lifetime_s: f(6)?,
            residual_pct: f(7)?,
            dr_pct: f(8)?,
            tpr_pct: f(9)?,
            tnr_pct: f(10)?,
            fpr_pct: f(11)?,
            fnr_pct: f(12)?,
        });
    }
    Ok(out)
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>, CliError> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    read_rows(file)
}

/// Means over seeds for one (axis value, defense flag).
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub axis: Axis,
    pub value: f64,
    pub defense: bool,
    pub replications: usize,
    /// Mean over the replications where the metric is defined.
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

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (n, s) = xs.fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
    (n > 0).then(|| s / n as f64)
}

/// Groups rows by (axis, value, defense) in first-seen order.
pub fn summarize_rows(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut order: Vec<(Axis, u64, bool)> = Vec::new();
    let mut groups: BTreeMap<(Axis, u64, bool), Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        let key = (r.axis, r.value.to_bits(), r.defense);
        groups.entry(key).or_insert_with(|| {
            order.push(key);
            Vec::new()
        });
        groups.get_mut(&key).expect("inserted").push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let g = &groups[&key];
            let m = |f: fn(&ResultRow) -> f64| mean(g.iter().map(|r| f(r))).expect("group is non-empty");
            SummaryRow {
                axis: key.0,
                value: f64::from_bits(key.1),
                defense: key.2,
                replications: g.len(),
                throughput_kbps: mean(g.iter().filter_map(|r| r.throughput_kbps)),
                pdr_pct: mean(g.iter().filter_map(|r| r.pdr_pct)),
                lifetime_s: m(|r| r.lifetime_s),
                residual_pct: m(|r| r.residual_pct),
                dr_pct: m(|r| r.dr_pct),
                tpr_pct: m(|r| r.tpr_pct),
                tnr_pct: m(|r| r.tnr_pct),
                fpr_pct: m(|r| r.fpr_pct),
                fnr_pct: m(|r| r.fnr_pct),
            }
        })
        .collect()
}

fn summary_record(s: &SummaryRow) -> [String; 13] {
    [
        s.axis.name().to_string(),
        num(s.value),
        on_off(s.defense).to_string(),
        s.replications.to_string(),
        opt(s.throughput_kbps),
        opt(s.pdr_pct),
        num(s.lifetime_s),
        num(s.residual_pct),
        num(s.dr_pct),
        num(s.tpr_pct),
        num(s.tnr_pct),
        num(s.fpr_pct),
        num(s.fnr_pct),
    ]
}

pub fn write_summary_csv(summary: &[SummaryRow], path: &Path) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|source| CliError::Write { path: path.to_path_buf(), source })?;
    write_records(std::io::BufWriter::new(file), SUMMARY_HEADER, summary.iter().map(summary_record))
        .map_err(|e| io_context(csv_err(e), path))
}

/// `results.csv` -> `results_summary.csv`.
pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}_summary.{}", ext.to_string_lossy()),
        None => format!("{stem}_summary"),
    };
    out.with_file_name(name)
}
