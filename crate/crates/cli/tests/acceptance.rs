//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wsn_cli::sweep::DEFAULT_RATIO_GRID;
use wsn_cli::{run_cells, run_sweep, write_csv, Axis, DefenseSelect, SweepSpec};
use wsn_core::crypto::interlock::{Channel, InterlockMsg};
use wsn_core::crypto::rsa::generate_keypair;
use wsn_core::crypto::{fs_identify, interlock_exchange, rsa_decrypt, rsa_encrypt, rsa_keygen, GuessingCheater, HonestProver, IdentificationMaterial};
use wsn_core::energy::{crossover_distance, EnergyCategory};
use wsn_core::mac::Leg;
use wsn_core::{run, run_traced, summarize, AttackKind, NodeId, NodeSpec, Position, RadioParams, RunMetrics, SimConfig, Simulation};

struct Gate {
    failed: usize,
    /// Every run the gate has made, for the conservation check.
    runs: Vec<RunMetrics>,
}

impl Gate {
    fn report(&mut self, n: u32, name: &str, ok: bool, detail: String) {
        println!("{} {n:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed += 1;
        }
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (n, s) = xs.fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
    s / n as f64
}

fn zero_attacker_fixed_points(g: &mut Gate) {
    let on_cfg = SimConfig { misbehaving_ratio: 0.0, defense_enabled: true, ..SimConfig::default() };
    let started = Instant::now();
    let on = run(&on_cfg).expect("default config is valid");
    let elapsed = started.elapsed().as_secs_f64();
    let off = run(&SimConfig { defense_enabled: false, ..on_cfg.clone() }).expect("valid");
    let (s_on, s_off) = (summarize(&on), summarize(&off));
    let gap = (s_on.residual_pct - s_off.residual_pct).abs();
    let ok = s_on.detection.dr == 100.0 && s_on.pdr_pct == Some(100.0) && gap <= 0.5 && elapsed < 10.0;
    g.report(
        1,
        "zero-attacker fixed points",
        ok,
        format!(
            "DR {:.3}, PDR {:?}, residual on {:.3} off {:.3} (|diff| {gap:.3}), {} nodes / {} s in {elapsed:.2} s",
            s_on.detection.dr, s_on.pdr_pct, s_on.residual_pct, s_off.residual_pct, on_cfg.node_count, on_cfg.sim_time_s
        ),
    );
    g.runs.push(on);
    g.runs.push(off);
}

/// Ratio grid, 10 seeds, defense on and off. Feeds criteria 2 and 3.
fn ratio_sweep(g: &mut Gate) {
    let spec = SweepSpec::new(Axis::MisbehavingRatio, DEFAULT_RATIO_GRID.to_vec(), 10, SimConfig::default())
        .expect("grid is valid")
        .with_defense(DefenseSelect::Both);
    let cells = run_cells(&spec).expect("sweep runs");
    let means = |defense: bool, f: fn(&RunMetrics) -> f64| -> Vec<f64> {
        DEFAULT_RATIO_GRID
            .iter()
            .map(|&r| mean(cells.iter().filter(|(c, _)| c.value == r && c.defense == defense).map(|(_, m)| f(m))))
            .collect()
    };
    let dr = |m: &RunMetrics| summarize(m).detection.dr;
    let res = |m: &RunMetrics| summarize(m).residual_pct;
    let (dr_on, dr_off) = (means(true, dr), means(false, dr));
    let (res_on, res_off) = (means(true, res), means(false, res));

    let monotone = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0] + 1.0);
    let dominates = DEFAULT_RATIO_GRID.iter().enumerate().filter(|(_, &r)| r >= 0.05).all(|(i, _)| dr_on[i] > dr_off[i]);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.1}")).collect::<Vec<_>>().join(" ");
    g.report(
        2,
        "monotone detection trend",
        monotone(&dr_on) && monotone(&dr_off) && dominates,
        format!("DR on [{}] off [{}]", fmt(&dr_on), fmt(&dr_off)),
    );

    let i = DEFAULT_RATIO_GRID.iter().position(|&r| r == 0.35).expect("0.35 on grid");
    let gain = res_on[i] - res_off[i];
    g.report(
        3,
        "energy benefit at ratio 0.35",
        gain >= 5.0,
        format!("residual on {:.3} off {:.3}, gain {gain:.3} pp", res_on[i], res_off[i]),
    );
    g.runs.extend(cells.into_iter().map(|(_, m)| m));
}

fn crossover(g: &mut Gate) {
    let d0 = crossover_distance(&RadioParams::default());
    g.report(4, "crossover distance", (d0 - 115.470).abs() <= 1e-3, format!("{d0:.6} m"));
}

fn conservation(g: &mut Gate) {
    let mut worst = 0.0f64;
    let mut nodes = 0usize;
    for m in &g.runs {
        for i in 0..m.residual_energy.len() {
            let spent = m.initial_energy[i] - m.residual_energy[i];
            let rel = (spent - m.ledgers[i].total()).abs() / m.initial_energy[i];
            worst = worst.max(rel);
            nodes += 1;
        }
    }
    let runs = g.runs.len();
    g.report(5, "energy conservation", worst <= 1e-9, format!("{runs} runs, {nodes} node ledgers, worst relative error {worst:.3e}"));
}

fn naive_pow(base: u64, exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    for _ in 0..exp {
        acc = acc * base % m;
    }
    acc
}

fn small_primes() -> Vec<u64> {
    (11u64..256).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect()
}

fn rsa_oracle(g: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let primes = small_primes();
    let big = |v: u64| BigUint::from(v);
    let small = |v: &BigUint| -> u64 { v.try_into().expect("small key") };
    let mut bad = 0usize;
    let mut done = 0usize;
    while done < 1000 {
        let s = primes[rng.gen_range(0..primes.len())];
        let r = primes[rng.gen_range(0..primes.len())];
        let phi = (s - 1) * (r - 1);
        let e = rng.gen_range(3..phi) | 1;
        let Ok(k) = rsa_keygen(&big(s), &big(r), &big(e), &mut rng) else { continue };
        let (m, d) = (s * r, small(&k.private_exponent));
        let msg = rng.gen_range(0..m);
        let c = rsa_encrypt(&big(msg), &k.public()).expect("message below modulus");
        let plain = rsa_decrypt(&c, &k.private_exponent, &k.modulus).expect("valid");
        let crt = k.decrypt_crt(&c).expect("valid");
        let ok = e * d % phi == 1
            && small(&c) == naive_pow(msg, e, m)
            && naive_pow(small(&c), d, m) == msg
            && small(&plain) == msg
            && small(&crt) == msg;
        if !ok {
            bad += 1;
        }
        done += 1;
    }
    let k = rsa_keygen(&big(61), &big(53), &big(17), &mut rng).expect("textbook key");
    let c = rsa_encrypt(&big(65), &k.public()).expect("valid");
    let back = rsa_decrypt(&big(2790), &k.private_exponent, &k.modulus).expect("valid");
    let worked = k.private_exponent == big(2753) && c == big(2790) && back == big(65);
    g.report(
        6,
        "RSA oracle equivalence",
        bad == 0 && worked,
        format!("{bad}/1000 random pairs disagree, (61, 53, 17): d = {}, 65 -> {c}, 2790 -> {back}", k.private_exponent),
    );
}

fn identification(g: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let modulus = generate_keypair(256, &BigUint::from(65537u32), &mut rng).modulus;
    let (mut honest, mut cheats) = (0, 0);
    for _ in 0..1000 {
        let material = IdentificationMaterial::random(&modulus, &mut rng);
        let (g_mod, published) = material.public_part();
        if fs_identify(&mut HonestProver::new(material), &g_mod, &published, 20, &mut rng) {
            honest += 1;
        }
        let mut cheater = GuessingCheater::new(g_mod.clone(), &published);
        if fs_identify(&mut cheater, &g_mod, &published, 20, &mut rng) {
            cheats += 1;
        }
    }
    g.report(
        7,
        "identification soundness and completeness",
        honest == 1000 && cheats == 0,
        format!("honest accepted {honest}/1000, cheater accepted {cheats}/1000 at k = 20"),
    );
}

/// Ways a man in the middle can mangle an exchange.
#[derive(Clone, Copy, Debug)]
enum Tamper {
    /// Forwards only the first half and swallows the second.
    FirstHalfOnly,
    /// Replaces the second half with one of its own.
    SwapSecondHalf,
    FlipFirstHalf,
    FlipSecondHalf,
    FlipProbe,
}

struct Mitm {
    how: Tamper,
    forged: BigUint,
}

fn flip(v: &BigUint) -> BigUint {
    v ^ BigUint::from(1u32 << 7)
}

impl Channel for Mitm {
    fn carry(&mut self, _leg: Leg, msg: InterlockMsg) -> Option<InterlockMsg> {
        match (self.how, msg) {
            (Tamper::FirstHalfOnly, InterlockMsg::SecondHalf { .. }) => None,
            (Tamper::SwapSecondHalf, InterlockMsg::SecondHalf { probe, .. }) => {
                Some(InterlockMsg::SecondHalf { wrapped: self.forged.clone(), probe })
            }
            (Tamper::FlipFirstHalf, InterlockMsg::FirstHalf(w)) => Some(InterlockMsg::FirstHalf(flip(&w))),
            (Tamper::FlipSecondHalf, InterlockMsg::SecondHalf { wrapped, probe }) => {
                Some(InterlockMsg::SecondHalf { wrapped: flip(&wrapped), probe })
            }
            (Tamper::FlipProbe, InterlockMsg::SecondHalf { wrapped, mut probe }) => {
                let last = probe.len() - 1;
                probe[last] ^= 1;
                Some(InterlockMsg::SecondHalf { wrapped, probe })
            }
            (_, other) => Some(other),
        }
    }
}

fn interlock(g: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let e = BigUint::from(65537u32);
    let mut complete = 0;
    let mut slipped = Vec::new();
    let mut keys = generate_keypair(48, &e, &mut rng);
    for i in 0..1000u32 {
        if i % 50 == 0 {
            keys = generate_keypair(48, &e, &mut rng);
        }
        let (a, b) = (NodeId(i + 1), NodeId(0));
        let out = interlock_exchange(a, b, &keys, &mut wsn_core::crypto::interlock::DirectChannel, &mut rng).expect("large modulus");
        if out.is_complete() && out.responder_key == Some(out.session.session_key) {
            complete += 1;
        }
        let forged = rsa_encrypt(&BigUint::from(rng.gen::<u64>()), &keys.public()).expect("fits");
        for how in [Tamper::FirstHalfOnly, Tamper::SwapSecondHalf, Tamper::FlipFirstHalf, Tamper::FlipSecondHalf, Tamper::FlipProbe] {
            let mut mitm = Mitm { how, forged: forged.clone() };
            let out = interlock_exchange(a, b, &keys, &mut mitm, &mut rng).expect("large modulus");
            if out.is_complete() {
                slipped.push((i, how));
            }
        }
    }
    g.report(
        8,
        "interlock integrity",
        complete == 1000 && slipped.is_empty(),
        format!("{complete}/1000 honest sessions complete, {}/5000 tampered sessions authenticated {:?}", slipped.len(), slipped.first()),
    );
}

fn node(i: u32, x: f64, y: f64, attacker: bool) -> NodeSpec {
    NodeSpec { id: NodeId(i), position: Position::new(x, y), attacker }
}

fn flood_check(g: &mut Gate) {
    let cycles = 10.0;
    let victims = [(20.0, 20.0), (60.0, 20.0), (20.0, 60.0), (60.0, 60.0), (40.0, 10.0), (40.0, 70.0)];
    let specs = |attacker: bool| {
        let mut v: Vec<NodeSpec> = victims.iter().enumerate().map(|(i, &(x, y))| node(i as u32, x, y, false)).collect();
        if attacker {
            v.push(node(6, 45.0, 45.0, true));
        }
        v
    };
    let mut failures = Vec::new();
    let mut least_extra = f64::INFINITY;
    let mut bound = 0.0;
    for kind in [AttackKind::SynReplay, AttackKind::RtsFlood, AttackKind::ForgedIdSyn] {
        let cfg = SimConfig {
            sim_time_s: cycles,
            defense_enabled: false,
            attack_kind: kind,
            attack_interval_s: 0.02,
            ..SimConfig::default()
        };
        let slot = cfg.cycle_period_s / cfg.duty_cycle_slots as f64;
        assert!(cfg.attack_interval_s < slot);
        let sleep_fraction = 1.0 - cfg.awake_slots as f64 / cfg.duty_cycle_slots as f64;
        bound = (cfg.power.idle_w - cfg.power.sleep_w) * sleep_fraction * cfg.cycle_period_s;
        let (hit, _) = Simulation::with_nodes(&cfg, specs(true)).run();
        let (calm, _) = Simulation::with_nodes(&cfg, specs(false)).run();
        for v in 0..victims.len() {
            let sleep = hit.ledgers[v].get(EnergyCategory::Sleep);
            let extra = (hit.ledgers[v].total() - calm.ledgers[v].total()) / (cycles / cfg.cycle_period_s);
            least_extra = least_extra.min(extra);
            if sleep != 0.0 || extra < bound {
                failures.push((kind, v, sleep, extra));
            }
        }
        g.runs.push(hit);
        g.runs.push(calm);
    }
    g.report(
        9,
        "flood steals all sleep",
        failures.is_empty(),
        format!("18 victims, least extra drain {least_extra:.6} J/cycle vs bound {bound:.6}, failures {failures:?}"),
    );
}

fn determinism(g: &mut Gate) {
    let base = SimConfig { node_count: 60, sim_time_s: 10.0, rsa_prime_bits: 64, ..SimConfig::default() };
    let spec = SweepSpec::new(Axis::MisbehavingRatio, vec![0.0, 0.25], 2, base).expect("valid").with_defense(DefenseSelect::Both);
    let dir = tempfile::tempdir().expect("temp dir");
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for p in &paths {
        write_csv(&run_sweep(&spec).expect("runs"), p).expect("writes");
    }
    let (a, b) = (std::fs::read(&paths[0]).expect("read"), std::fs::read(&paths[1]).expect("read"));
    g.report(10, "determinism", a == b && !a.is_empty(), format!("two sweeps of 8 cells, {} vs {} bytes, identical: {}", a.len(), b.len(), a == b));
}

fn metric_oracle(g: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let kinds = [AttackKind::SynReplay, AttackKind::RtsFlood, AttackKind::ForgedIdSyn];
    let mut bad = Vec::new();
    for i in 0..20 {
        let cfg = SimConfig {
            node_count: rng.gen_range(1..=30),
            sim_time_s: rng.gen_range(2.0..15.0),
            misbehaving_ratio: [0.0, 0.1, 0.3][rng.gen_range(0..3)],
            defense_enabled: rng.gen(),
            attack_kind: kinds[rng.gen_range(0..3)],
            attack_interval_s: [0.02, 0.4, 2.0][rng.gen_range(0..3)],
            initial_energy_j: [0.05, 35.0][rng.gen_range(0..2)],
            rng_seed: rng.gen(),
            rsa_prime_bits: 64,
            ..SimConfig::default()
        };
        let (m, trace) = run_traced(&cfg).expect("valid");
        if let Some(why) = oracle::mismatch(&oracle::replay(&trace), &m) {
            bad.push(format!("run {i}: {why}"));
        }
        g.runs.push(m);
    }
    g.report(11, "metric oracle", bad.is_empty(), format!("{}/20 runs disagree {:?}", bad.len(), bad.first()));
}

fn main() {
    let mut g = Gate { failed: 0, runs: Vec::new() };
    zero_attacker_fixed_points(&mut g);
    ratio_sweep(&mut g);
    crossover(&mut g);
    rsa_oracle(&mut g);
    identification(&mut g);
    interlock(&mut g);
    flood_check(&mut g);
    determinism(&mut g);
    metric_oracle(&mut g);
    conservation(&mut g);
    println!("{} of 11 criteria failed", g.failed);
    if g.failed > 0 {
        std::process::exit(1);
    }
}
