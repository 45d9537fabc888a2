use wsn_cli::{run_sweep, Axis, DefenseSelect, SweepSpec};
use wsn_core::SimConfig;

fn small() -> SimConfig {
    SimConfig { node_count: 25, sim_time_s: 8.0, misbehaving_ratio: 0.2, rsa_prime_bits: 64, ..SimConfig::default() }
}

#[test]
fn rows_follow_grid_order() {
    let spec = SweepSpec::new(Axis::MisbehavingRatio, vec![0.0, 0.2], 2, small()).unwrap();
    let rows = run_sweep(&spec).unwrap();
    let keys: Vec<(f64, u64, bool)> = rows.iter().map(|r| (r.value, r.seed, r.defense)).collect();
    assert_eq!(
        keys,
        vec![(0.0, 1, true), (0.0, 1, false), (0.0, 2, true), (0.0, 2, false), (0.2, 1, true), (0.2, 1, false), (0.2, 2, true), (0.2, 2, false)]
    );
}

#[test]
fn defense_off_ignores_defense_parameters() {
    let base = small();
    let mut tuned = small();
    tuned.defense.syn_rate_threshold = 0.3;
    tuned.defense.fs_rounds = 3;
    tuned.defense.rate_window_s = 0.5;
    tuned.defense.auth_mode_exit_factor = 0.2;
    tuned.defense.token_bytes = 32;
    let rows = |b: SimConfig| {
        let spec = SweepSpec::new(Axis::MisbehavingRatio, vec![0.1, 0.3], 2, b).unwrap().with_defense(DefenseSelect::Off);
        let mut buf = Vec::new();
        wsn_cli::output::write_rows(&run_sweep(&spec).unwrap(), &mut buf).unwrap();
        buf
    };
    assert_eq!(rows(base), rows(tuned));
}

#[test]
fn node_count_axis_sets_population() {
    let spec = SweepSpec::new(Axis::NodeCount, vec![0.0, 3.0, 12.0], 1, small()).unwrap().with_defense(DefenseSelect::On);
    let rows = run_sweep(&spec).unwrap();
    assert_eq!(rows.len(), 3);
    // No sensors: nothing sent, nothing to detect.
    assert_eq!(rows[0].pdr_pct, None);
    assert_eq!(rows[0].dr_pct, 100.0);
    assert_eq!(rows[0].residual_pct, 100.0);
    assert!(rows[2].pdr_pct.is_some());
}

#[test]
fn zero_length_runs_have_undefined_throughput() {
    let spec = SweepSpec::new(Axis::SimTime, vec![0.0, 2.0], 1, small()).unwrap();
    let rows = run_sweep(&spec).unwrap();
    assert!(rows[..2].iter().all(|r| r.throughput_kbps.is_none() && r.pdr_pct.is_none()));
    assert!(rows[2..].iter().all(|r| r.throughput_kbps.is_some()));
}
