//! The five evaluation metrics: average throughput, packet delivery ratio,
//! network lifetime, residual energy and detection rates.

use std::collections::BTreeMap;

use crate::energy::EnergyLedger;
use crate::error::MetricError;
use crate::types::NodeId;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    /// Attackers rejected.
    pub tp: u64,
    /// Benign nodes rejected.
    pub fp: u64,
    /// Benign nodes accepted.
    pub tn: u64,
    /// Attackers accepted.
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn merge(&self, other: &ConfusionMatrix) -> ConfusionMatrix {
        ConfusionMatrix {
            tp: self.tp + other.tp,
            fp: self.fp + other.fp,
            tn: self.tn + other.tn,
            fn_: self.fn_ + other.fn_,
        }
    }
}

/// All values are percentages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionRates {
    pub dr: f64,
    pub tpr: f64,
    pub tnr: f64,
    pub fpr: f64,
    pub fnr: f64,
}

fn pct(num: u64, den: u64) -> f64 {
    100.0 * num as f64 / den as f64
}

/// An empty attacker population counts as fully detected; an empty benign
/// population as fully accepted.
pub fn detection_metrics(cm: &ConfusionMatrix) -> DetectionRates {
    let positives = cm.tp + cm.fn_;
    let negatives = cm.tn + cm.fp;
    let (tpr, fnr) = if positives == 0 { (100.0, 0.0) } else { (pct(cm.tp, positives), pct(cm.fn_, positives)) };
    let (tnr, fpr) = if negatives == 0 { (100.0, 0.0) } else { (pct(cm.tn, negatives), pct(cm.fp, negatives)) };
    DetectionRates { dr: tpr, tpr, tnr, fpr, fnr }
}

/// Counters of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// Data packets emitted, per source node.
    pub sent: Vec<u64>,
    /// Data packets acknowledged, per destination node.
    pub received: Vec<u64>,
    pub packet_size_bytes: u32,
    pub start_s: f64,
    pub stop_s: f64,
    /// Time each node spent from its first election as head until its death
    /// or the end of the run.
    pub head_lifetimes: BTreeMap<NodeId, f64>,
    /// Death time, or stop time for survivors, per sensor node.
    pub node_end_times: Vec<f64>,
    pub initial_energy: Vec<f64>,
    pub residual_energy: Vec<f64>,
    pub ledgers: Vec<EnergyLedger>,
    pub confusion: ConfusionMatrix,
    pub replications: u32,
}

impl RunMetrics {
    pub fn empty(packet_size_bytes: u32) -> Self {
        Self {
            sent: Vec::new(),
            received: Vec::new(),
            packet_size_bytes,
            start_s: 0.0,
            stop_s: 0.0,
            head_lifetimes: BTreeMap::new(),
            node_end_times: Vec::new(),
            initial_energy: Vec::new(),
            residual_energy: Vec::new(),
            ledgers: Vec::new(),
            confusion: ConfusionMatrix::default(),
            replications: 1,
        }
    }

    pub fn total_sent(&self) -> u64 {
        self.sent.iter().sum()
    }

    pub fn total_received(&self) -> u64 {
        self.received.iter().sum()
    }

    pub fn duration(&self) -> f64 {
        self.stop_s - self.start_s
    }
}

/// Average throughput in kbit/s.
pub fn throughput_kbps(m: &RunMetrics) -> Result<f64, MetricError> {
    let dur = m.duration();
    if dur <= 0.0 {
        return Err(MetricError::ZeroDuration);
    }
    let bytes = m.total_received() as f64 * f64::from(m.packet_size_bytes);
    Ok(bytes / dur * 8.0 / 1000.0 / f64::from(m.replications.max(1)))
}

/// Packet delivery ratio in percent.
pub fn pdr_percent(m: &RunMetrics) -> Result<f64, MetricError> {
    let sent = m.total_sent();
    if sent == 0 {
        return Err(MetricError::NoTraffic);
    }
    Ok(m.total_received() as f64 / sent as f64 * 100.0 / f64::from(m.replications.max(1)))
}

/// Sum of cluster-head lifetimes; without any heads, the time until the last
/// sensor died (or the run ended).
pub fn network_lifetime(m: &RunMetrics) -> f64 {
    if m.head_lifetimes.is_empty() {
        return m
            .node_end_times
            .iter()
            .map(|t| t - m.start_s)
            .fold(0.0, f64::max);
    }
    m.head_lifetimes.values().sum()
}

/// Percentage of the sensors' initial energy still unspent.
pub fn residual_energy_percent(m: &RunMetrics) -> f64 {
    let initial: f64 = m.initial_energy.iter().sum();
    if initial <= 0.0 {
        return 100.0;
    }
    100.0 * m.residual_energy.iter().sum::<f64>() / initial
}

/// Every metric of one run. Throughput and PDR are `None` when undefined
/// (zero-length run, no traffic).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    pub throughput_kbps: Option<f64>,
    pub pdr_pct: Option<f64>,
    pub lifetime_s: f64,
    pub residual_pct: f64,
    pub detection: DetectionRates,
}

pub fn summarize(m: &RunMetrics) -> MetricSummary {
    MetricSummary {
        throughput_kbps: throughput_kbps(m).ok(),
        pdr_pct: pdr_percent(m).ok(),
        lifetime_s: network_lifetime(m),
        residual_pct: residual_energy_percent(m),
        detection: detection_metrics(&m.confusion),
    }
}

/// Mean throughput over replications.
pub fn mean_throughput_kbps(runs: &[RunMetrics]) -> Result<f64, MetricError> {
    if runs.is_empty() {
        return Err(MetricError::ZeroDuration);
    }
    let mut acc = 0.0;
    for r in runs {
        acc += throughput_kbps(r)?;
    }
    Ok(acc / runs.len() as f64)
}

/// Mean PDR over replications.
pub fn mean_pdr_percent(runs: &[RunMetrics]) -> Result<f64, MetricError> {
    if runs.is_empty() {
        return Err(MetricError::NoTraffic);
    }
    let mut acc = 0.0;
    for r in runs {
        acc += pdr_percent(r)?;
    }
    Ok(acc / runs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn run_with(sent: u64, received: u64, dur: f64) -> RunMetrics {
        let mut m = RunMetrics::empty(512);
        m.sent = vec![sent];
        m.received = vec![received];
        m.stop_s = dur;
        m
    }

    #[test]
    fn throughput_examples() {
        assert_relative_eq!(throughput_kbps(&run_with(1, 1, 1.0)).unwrap(), 4.096);
        assert_eq!(throughput_kbps(&run_with(5, 0, 1.0)).unwrap(), 0.0);
        assert_eq!(throughput_kbps(&run_with(1, 1, 0.0)), Err(MetricError::ZeroDuration));
    }

    #[test]
    fn pdr_examples() {
        assert_relative_eq!(pdr_percent(&run_with(100, 94, 1.0)).unwrap(), 94.0);
        assert_eq!(pdr_percent(&run_with(37, 37, 1.0)).unwrap(), 100.0);
        assert_eq!(pdr_percent(&run_with(10, 0, 1.0)).unwrap(), 0.0);
        assert_eq!(pdr_percent(&run_with(0, 0, 1.0)), Err(MetricError::NoTraffic));
    }

    #[test]
    fn lifetime_examples() {
        let mut m = RunMetrics::empty(512);
        m.stop_s = 400.0;
        m.head_lifetimes.insert(NodeId(0), 300.0);
        m.head_lifetimes.insert(NodeId(1), 400.0);
        assert_eq!(network_lifetime(&m), 700.0);

        let mut m = RunMetrics::empty(512);
        m.stop_s = 70.0;
        for i in 0..3 {
            m.head_lifetimes.insert(NodeId(i), 70.0);
        }
        assert_eq!(network_lifetime(&m), 210.0);

        let mut m = RunMetrics::empty(512);
        m.stop_s = 70.0;
        m.node_end_times = vec![12.0, 55.5, 30.0];
        assert_eq!(network_lifetime(&m), 55.5);
    }

    #[test]
    fn residual_examples() {
        let mut m = RunMetrics::empty(512);
        m.initial_energy = vec![35.0; 4];
        m.residual_energy = vec![35.0; 4];
        assert_eq!(residual_energy_percent(&m), 100.0);
        m.initial_energy = vec![2.0, 2.0];
        m.residual_energy = vec![1.0, 2.0];
        assert_eq!(residual_energy_percent(&m), 75.0);
        m.residual_energy = vec![0.0, 0.0];
        assert_eq!(residual_energy_percent(&m), 0.0);
    }

    #[test]
    fn detection_examples() {
        let d = detection_metrics(&ConfusionMatrix { tp: 98, fn_: 2, ..Default::default() });
        assert_relative_eq!(d.dr, 98.0);
        let d = detection_metrics(&ConfusionMatrix { tn: 300, ..Default::default() });
        assert_eq!((d.dr, d.fpr), (100.0, 0.0));
        let d = detection_metrics(&ConfusionMatrix { tp: 7, fn_: 7, ..Default::default() });
        assert_eq!(d.dr, 50.0);
    }

    proptest! {
        #[test]
        fn complementary_rates(tp in 0u64..1000, fp in 0u64..1000, tn in 0u64..1000, fn_ in 0u64..1000) {
            let d = detection_metrics(&ConfusionMatrix { tp, fp, tn, fn_ });
            prop_assert!((d.tpr + d.fnr - 100.0).abs() < 1e-9);
            prop_assert!((d.tnr + d.fpr - 100.0).abs() < 1e-9);
            for v in [d.dr, d.tpr, d.tnr, d.fpr, d.fnr] {
                prop_assert!((0.0..=100.0).contains(&v));
            }
        }

        #[test]
        fn pdr_bounded(sent in 1u64..10_000, frac in 0.0f64..=1.0) {
            let recv = (sent as f64 * frac).floor() as u64;
            let p = pdr_percent(&run_with(sent, recv, 1.0)).unwrap();
            prop_assert!((0.0..=100.0).contains(&p));
        }
    }
}
