use wsn_core::config::AttackKind;
use wsn_core::energy::EnergyCategory;
use wsn_core::{run, NodeId, NodeSpec, Position, SimConfig, Simulation};

fn spec(i: u32, x: f64, y: f64, attacker: bool) -> NodeSpec {
    NodeSpec { id: NodeId(i), position: Position::new(x, y), attacker }
}

/// First-order radio, written out independently of the library.
fn tx(bits: f64, d: f64) -> f64 {
    let (e_elec, eps_fs, eps_mp): (f64, f64, f64) = (100e-9, 20e-12, 0.0015e-12);
    let d0 = (eps_fs / eps_mp).sqrt();
    if d < d0 {
        e_elec * bits + eps_fs * bits * d * d
    } else {
        e_elec * bits + eps_mp * bits * d.powi(4)
    }
}

fn rx(bits: f64) -> f64 {
    100e-9 * bits
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-12)
}

#[test]
fn lone_node_cycle_matches_hand_count() {
    // One sensor 50 m from the sink: no neighbours, no clusters, one
    // RTS/CTS/DATA/ACK exchange straight with the base station.
    let cfg = SimConfig { sim_time_s: 1.0, defense_enabled: false, base_station: Some((0.0, 0.0)), ..SimConfig::default() };
    let (m, _) = Simulation::with_nodes(&cfg, vec![spec(0, 30.0, 40.0, false)]).run();
    let l = &m.ledgers[0];
    let syn = tx(80.0, 0.0);
    let handshake_tx = tx(240.0, 50.0) + tx(4096.0, 50.0);
    assert!(close(l.get(EnergyCategory::Tx), syn + handshake_tx), "{}", l.get(EnergyCategory::Tx));
    assert!(close(l.get(EnergyCategory::Rx), 2.0 * rx(240.0)));
    assert!(close(l.get(EnergyCategory::Sensing), 5e-8));
    assert!(close(l.get(EnergyCategory::Idle), 0.1 * 41e-3));
    assert!(close(l.get(EnergyCategory::Sleep), 0.9 * 25e-6));
    assert_eq!(l.get(EnergyCategory::Aggregation), 0.0);
    assert_eq!(m.sent, vec![1, 0]);
    assert_eq!(m.received, vec![0, 1]);
    assert!(close(35.0 - m.residual_energy[0], l.total()));
}

#[test]
fn attack_free_nodes_sleep_exactly_outside_the_window() {
    let cycles = 20.0;
    let cfg = SimConfig { node_count: 40, sim_time_s: cycles, defense_enabled: false, ..SimConfig::default() };
    let m = run(&cfg).unwrap();
    for l in &m.ledgers {
        assert!(close(l.get(EnergyCategory::Idle), cycles * 0.1 * 41e-3), "{}", l.get(EnergyCategory::Idle));
        assert!(close(l.get(EnergyCategory::Sleep), cycles * 0.9 * 25e-6));
    }
}

/// Six sensors around the sink with one attacker in range of all of them.
fn flood_nodes(with_attacker: bool) -> Vec<NodeSpec> {
    let mut v: Vec<NodeSpec> = [(20.0, 20.0), (60.0, 20.0), (20.0, 60.0), (60.0, 60.0), (40.0, 10.0), (40.0, 70.0)]
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| spec(i as u32, x, y, false))
        .collect();
    if with_attacker {
        v.push(spec(6, 45.0, 45.0, true));
    }
    v
}

#[test]
fn flood_faster_than_a_slot_keeps_victims_awake() {
    let cycles = 10.0;
    for kind in [AttackKind::RtsFlood, AttackKind::ForgedIdSyn, AttackKind::SynReplay] {
        let cfg = SimConfig {
            sim_time_s: cycles,
            defense_enabled: false,
            attack_kind: kind,
            attack_interval_s: 0.02,
            ..SimConfig::default()
        };
        let (hit, _) = Simulation::with_nodes(&cfg, flood_nodes(true)).run();
        let (calm, _) = Simulation::with_nodes(&cfg, flood_nodes(false)).run();
        let bound = (41e-3 - 25e-6) * 0.9 * 1.0;
        for v in 0..6 {
            assert_eq!(hit.ledgers[v].get(EnergyCategory::Sleep), 0.0, "{kind:?} node {v}");
            let extra = (hit.ledgers[v].total() - calm.ledgers[v].total()) / cycles;
            assert!(extra >= bound, "{kind:?} node {v}: {extra} < {bound}");
        }
    }
}

#[test]
fn defense_identifies_the_flooder() {
    for kind in [AttackKind::RtsFlood, AttackKind::ForgedIdSyn, AttackKind::SynReplay] {
        let cfg = SimConfig {
            sim_time_s: 10.0,
            attack_kind: kind,
            attack_interval_s: 0.02,
            rsa_prime_bits: 64,
            ..SimConfig::default()
        };
        let (m, _) = Simulation::with_nodes(&cfg, flood_nodes(true)).run();
        assert_eq!((m.confusion.tp, m.confusion.fn_, m.confusion.fp, m.confusion.tn), (1, 0, 0, 6), "{kind:?}");
    }
}

#[test]
fn defense_saves_energy_under_flood() {
    let base = SimConfig { sim_time_s: 20.0, attack_kind: AttackKind::RtsFlood, attack_interval_s: 0.02, rsa_prime_bits: 64, ..SimConfig::default() };
    let (on, _) = Simulation::with_nodes(&base, flood_nodes(true)).run();
    let (off, _) = Simulation::with_nodes(&SimConfig { defense_enabled: false, ..base }, flood_nodes(true)).run();
    let spent = |m: &wsn_core::RunMetrics| m.ledgers[..6].iter().map(|l| l.total()).sum::<f64>();
    assert!(spent(&on) < 0.5 * spent(&off), "{} vs {}", spent(&on), spent(&off));
}

#[test]
fn same_seed_same_metrics() {
    let cfg = SimConfig { node_count: 60, sim_time_s: 10.0, misbehaving_ratio: 0.15, rsa_prime_bits: 128, ..SimConfig::default() };
    assert_eq!(run(&cfg).unwrap(), run(&cfg).unwrap());
    let other = run(&SimConfig { rng_seed: 2, ..cfg.clone() }).unwrap();
    assert_ne!(run(&cfg).unwrap(), other);
}

#[test]
fn no_nodes() {
    let m = run(&SimConfig { node_count: 0, ..SimConfig::default() }).unwrap();
    assert!(m.residual_energy.is_empty());
    assert_eq!(m.total_sent(), 0);
    let s = wsn_core::summarize(&m);
    assert_eq!(s.pdr_pct, None);
    assert_eq!(s.residual_pct, 100.0);
    assert_eq!(s.detection.dr, 100.0);
}

#[test]
fn zero_length_run() {
    let m = run(&SimConfig { sim_time_s: 0.0, misbehaving_ratio: 0.3, ..SimConfig::default() }).unwrap();
    assert_eq!(m.total_sent() + m.total_received(), 0);
    assert!(m.ledgers.iter().all(|l| l.total() == 0.0));
    let s = wsn_core::summarize(&m);
    assert_eq!(s.residual_pct, 100.0);
    assert_eq!(s.throughput_kbps, None);
}

#[test]
fn no_attackers_no_false_alarms() {
    let cfg = SimConfig { node_count: 80, sim_time_s: 15.0, rsa_prime_bits: 128, ..SimConfig::default() };
    let m = run(&cfg).unwrap();
    let s = wsn_core::summarize(&m);
    assert_eq!((s.detection.dr, s.detection.fpr), (100.0, 0.0));
    assert_eq!(s.pdr_pct, Some(100.0));
}
