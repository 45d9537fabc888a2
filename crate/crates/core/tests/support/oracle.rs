//! Recomputes every run metric from a trace alone.

use std::collections::BTreeMap;

use wsn_core::defense::NodeVerdict;
use wsn_core::{Trace, TraceEvent};

#[derive(Debug, Clone, PartialEq)]
pub struct Recount {
    pub sent: u64,
    pub received: u64,
    pub residual: Vec<f64>,
    pub throughput_kbps: Option<f64>,
    pub pdr_pct: Option<f64>,
    pub lifetime_s: f64,
    pub residual_pct: f64,
    pub dr: f64,
    pub tpr: f64,
    pub tnr: f64,
    pub fpr: f64,
    pub fnr: f64,
}

pub fn replay(trace: &Trace) -> Recount {
    let n = trace.initial_energy.len();
    let mut residual = trace.initial_energy.clone();
    let mut death: Vec<Option<f64>> = vec![None; n];
    let mut first_head: BTreeMap<u32, f64> = BTreeMap::new();
    let mut rejected = vec![false; n];
    let (mut sent, mut received) = (0u64, 0u64);
    for ev in &trace.events {
        match *ev {
            TraceEvent::Debit { node, joules, .. } => {
                let r = &mut residual[node.index()];
                // Batteries empty exactly when the last withdrawal equals what is left.
                if joules == *r {
                    *r = 0.0;
                } else {
                    *r -= joules;
                }
            }
            TraceEvent::DataSent { .. } => sent += 1,
            TraceEvent::DataReceived { .. } => received += 1,
            TraceEvent::HeadElected { node, time } => {
                first_head.entry(node.0).or_insert(time);
            }
            TraceEvent::Died { node, time } => death[node.index()] = Some(time),
            TraceEvent::Verdict { node, verdict, .. } => {
                if verdict == NodeVerdict::Rejected && node.index() < n {
                    rejected[node.index()] = true;
                }
            }
        }
    }

    let start = trace.start_s;
    let stop = trace.stop_s;
    let duration = stop - start;
    let end_of = |i: usize| death[i].unwrap_or(stop).min(stop);

    let throughput_kbps = (duration > 0.0)
        .then(|| received as f64 * f64::from(trace.packet_size_bytes) / duration * 8.0 / 1000.0);
    let pdr_pct = (sent > 0).then(|| received as f64 / sent as f64 * 100.0);

    let lifetime_s = if first_head.is_empty() {
        (0..n).map(|i| end_of(i) - start).fold(0.0, f64::max)
    } else {
        first_head.iter().map(|(&h, &t0)| (end_of(h as usize) - t0).max(0.0)).sum()
    };

    let initial: f64 = trace.initial_energy.iter().sum();
    let residual_pct = if initial <= 0.0 { 100.0 } else { 100.0 * residual.iter().sum::<f64>() / initial };

    let (mut tp, mut fp, mut tn, mut fn_) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..n {
        match (trace.attacker[i], rejected[i]) {
            (true, true) => tp += 1,
            (true, false) => fn_ += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
        }
    }
    let pct = |a: u64, b: u64| 100.0 * a as f64 / b as f64;
    let (tpr, fnr) = if tp + fn_ == 0 { (100.0, 0.0) } else { (pct(tp, tp + fn_), pct(fn_, tp + fn_)) };
    let (tnr, fpr) = if tn + fp == 0 { (100.0, 0.0) } else { (pct(tn, tn + fp), pct(fp, tn + fp)) };

    Recount {
        sent,
        received,
        residual,
        throughput_kbps,
        pdr_pct,
        lifetime_s,
        residual_pct,
        dr: tpr,
        tpr,
        tnr,
        fpr,
        fnr,
    }
}

/// Names the first metric on which the recount and the folded summary differ.
pub fn mismatch(r: &Recount, m: &wsn_core::RunMetrics) -> Option<String> {
    let s = wsn_core::summarize(m);
    let checks: [(&str, Option<f64>, Option<f64>); 10] = [
        ("throughput", r.throughput_kbps, s.throughput_kbps),
        ("pdr", r.pdr_pct, s.pdr_pct),
        ("lifetime", Some(r.lifetime_s), Some(s.lifetime_s)),
        ("residual", Some(r.residual_pct), Some(s.residual_pct)),
        ("dr", Some(r.dr), Some(s.detection.dr)),
        ("tpr", Some(r.tpr), Some(s.detection.tpr)),
        ("tnr", Some(r.tnr), Some(s.detection.tnr)),
        ("fpr", Some(r.fpr), Some(s.detection.fpr)),
        ("fnr", Some(r.fnr), Some(s.detection.fnr)),
        ("received", Some(r.received as f64), Some(m.total_received() as f64)),
    ];
    for (name, a, b) in checks {
        if a != b {
            return Some(format!("{name}: replay {a:?} vs folded {b:?}"));
        }
    }
    if r.sent != m.total_sent() {
        return Some(format!("sent: replay {} vs folded {}", r.sent, m.total_sent()));
    }
    if r.residual != m.residual_energy {
        return Some("per-node residual energy".into());
    }
    None
}
