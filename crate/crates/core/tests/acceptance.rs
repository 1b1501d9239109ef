//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use owpan::capacity::{sweep_capacity, SweepSpec, SweepVariable};
use owpan::channel::beers_lambert_transmittance;
use owpan::net::{
    classify_topology, run_simulation, FlowSpec, Link, NetworkClass, Node, NodeKind,
    ReturnTechnology, SimConfig, Technology, Topology, TrafficKind,
};
use owpan::params::LinkBudgetParams;
use owpan::phy::eightb10b::{encode_8b10b, RunningDisparity};
use owpan::phy::fourb6b::encode_4b6b_bits;
use owpan::phy::manchester::manchester_encode;
use owpan::phy::rs::ReedSolomon;
use owpan::phy::{data_rate, phy_mode_catalog, PhyClass, PhyCodec};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within_budget(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

/// Rate-table reproduction.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    // printed Table 2 rates for PHY I/II, bit/s
    let printed = [
        11.67e3, 100e3, 35.56e3, 266.6e3, 1.25e6, 5e6, 6e6, 96e6,
    ];
    let modes: Vec<_> = phy_mode_catalog()
        .iter()
        .filter(|m| matches!(m.phy, PhyClass::I | PhyClass::II))
        .collect();
    let mut problems = Vec::new();
    let mut rates = Vec::new();
    for m in &modes {
        match data_rate(m) {
            Ok(r) => rates.push(r),
            Err(e) => problems.push(e.to_string()),
        }
    }
    for p in printed {
        if !rates.iter().any(|r| (r - p).abs() / p <= 0.005) {
            problems.push(format!("no mode reproduces {p} bit/s"));
        }
    }
    let elapsed = start.elapsed();
    if !within_budget(elapsed, 1.0) {
        problems.push(format!("runtime {elapsed:?} >= 1 s"));
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            format!(
                "{} PHY I/II modes consistent, {} printed rates within 0.5% ({elapsed:.2?})",
                modes.len(),
                printed.len()
            )
        } else {
            problems.join("; ")
        },
    )
}

/// Capacity sweep shape.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let params = LinkBudgetParams::default();
    let mut problems = Vec::new();

    let pr = sweep_capacity(&params, &SweepSpec::new(SweepVariable::PrOverN0Db, 0.0, 30.0))
        .expect("Pr/N0 sweep");
    for c in &pr.curves {
        if c.points.len() != 200 || !c.is_non_decreasing() {
            problems.push(format!("Pr/N0 curve alpha={} not non-decreasing", c.alpha_db_per_km));
        }
    }

    let span = sweep_capacity(&params, &SweepSpec::new(SweepVariable::SpanM, 0.0, 2000.0))
        .expect("span sweep");
    for c in &span.curves {
        if c.points.len() != 200 || !c.is_non_increasing() {
            problems.push(format!("L curve alpha={} not non-increasing", c.alpha_db_per_km));
        }
    }
    let inversions = span.slope_inversions();
    if let Some(first) = inversions.first() {
        let intervals = span.curves[0].points.len() - 1;
        problems.push(format!(
            "slope magnitudes not ordered by alpha at {} of {} interval/pair checks; first at L = {:.1} m: |dC/dL| alpha={} is {:.3e}, alpha={} is {:.3e}",
            inversions.len(),
            intervals * (span.curves.len() - 1),
            first.x,
            first.lower_alpha,
            first.lower_alpha_slope.abs(),
            first.higher_alpha,
            first.higher_alpha_slope.abs()
        ));
    }
    let elapsed = start.elapsed();
    if !within_budget(elapsed, 5.0) {
        problems.push(format!("runtime {elapsed:?} >= 5 s"));
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            format!("4 monotone curves per sweep, slopes ordered ({elapsed:.2?})")
        } else {
            problems.join("; ")
        },
    )
}

/// Beers-Lambert point checks.
fn criterion_3() -> Outcome {
    let t5 = beers_lambert_transmittance(5.0, 160.0).value();
    let t80 = beers_lambert_transmittance(80.0, 160.0).value();
    let pass = (t5 - 0.8318).abs() <= 1e-4 && (t80 - 0.05248).abs() <= 1e-4;
    outcome(pass, format!("T(5 dB/km, 160 m) = {t5:.6}, T(80 dB/km, 160 m) = {t80:.6}"))
}

/// Codec suite.
fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x157);
    let mut problems = Vec::new();
    let mut trials = 0usize;

    for mode in phy_mode_catalog().iter().filter(|m| m.has_codec()) {
        let codec = PhyCodec::new(mode).expect("codec mode");
        let mut failures = 0;
        let mut negative = false;
        for _ in 0..1000 {
            let len = rng.random_range(1..=64);
            let payload: Vec<u8> = (0..len).map(|_| rng.random()).collect();
            let dimming = rng.random_range(0.05..0.95);
            let ok = codec.encode(&payload).and_then(|frame| {
                let w = codec.modulate(&frame, dimming)?;
                negative |= w.iter().any(|&s| s < 0.0 || !s.is_finite());
                codec.decode(&codec.demodulate(&w, len)?)
            });
            if ok.as_deref() != Ok(payload.as_slice()) {
                failures += 1;
            }
            trials += 1;
        }
        if failures > 0 {
            problems.push(format!("{}: {failures} round-trip failures", mode.id));
        }
        if negative {
            problems.push(format!("{}: negative waveform sample", mode.id));
        }
    }

    // RS(15,11): every 1- and 2-symbol error pattern on 100 random codewords
    let rs = ReedSolomon::gf16(15, 11).unwrap();
    let mut miscorrections = 0usize;
    let mut patterns = 0usize;
    for _ in 0..100 {
        let data: Vec<u16> = (0..11).map(|_| rng.random_range(0..16)).collect();
        let cw = rs.encode(&data).unwrap();
        for i in 0..15 {
            for ei in 1..16u16 {
                let mut rx = cw.clone();
                rx[i] ^= ei;
                patterns += 1;
                if rs.decode(&rx).map(|d| d.data) != Ok(data.clone()) {
                    miscorrections += 1;
                }
                for j in i + 1..15 {
                    for ej in 1..16u16 {
                        let mut rx2 = rx.clone();
                        rx2[j] ^= ej;
                        patterns += 1;
                        if rs.decode(&rx2).map(|d| d.data) != Ok(data.clone()) {
                            miscorrections += 1;
                        }
                    }
                }
            }
        }
    }
    if miscorrections > 0 {
        problems.push(format!("RS(15,11): {miscorrections} of {patterns} patterns not corrected"));
    }

    // DC balance
    for _ in 0..200 {
        let len = rng.random_range(1..=256) * 4;
        let bits: Vec<u8> = (0..len).map(|_| rng.random_range(0..2)).collect();
        let m = manchester_encode(&bits).unwrap();
        let f = encode_4b6b_bits(&bits).unwrap();
        let ones = |v: &[u8]| v.iter().filter(|&&c| c == 1).count();
        if 2 * ones(&m) != m.len() || 2 * ones(&f) != f.len() {
            problems.push("line code not DC balanced".into());
            break;
        }
        let bytes: Vec<u8> = (0..len / 4).map(|_| rng.random()).collect();
        let (symbols, _) = encode_8b10b(&bytes, RunningDisparity::Negative);
        let mut rd = -1i32;
        for s in symbols {
            rd += 2 * s.count_ones() as i32 - 10;
            if rd != -1 && rd != 1 {
                problems.push("8b/10b running disparity out of bounds".into());
                break;
            }
        }
    }

    let elapsed = start.elapsed();
    if !within_budget(elapsed, 30.0) {
        problems.push(format!("runtime {elapsed:?} >= 30 s"));
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            format!(
                "{trials} round trips, {patterns} RS error patterns corrected, DC balance exact ({elapsed:.2?})"
            )
        } else {
            problems.join("; ")
        },
    )
}

/// Worst-link law on random three-hop paths.
fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xCA5CADE);
    let packet_bytes = 1000usize;
    let bits = (packet_bytes * 8) as f64;
    let mut above = 0;
    let mut below = 0;
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let caps: Vec<f64> = (0..3).map(|_| 10f64.powf(rng.random_range(6.0..8.0))).collect();
        let nodes = (1..=4)
            .map(|a| Node::new(format!("n{a}"), a, NodeKind::VlcAccessPoint))
            .collect();
        let links = caps
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let mut l = Link::new(format!("l{k}"), k as u64 + 1, k as u64 + 2, Technology::VlcLd, c);
                l.propagation_delay = rng.random_range(0.0..1e-6);
                l
            })
            .collect();
        let t = Topology { nodes, links };
        let min = caps.iter().copied().fold(f64::INFINITY, f64::min);
        let cfg = SimConfig {
            // about 500 packets through the bottleneck
            duration: 500.0 * bits / min,
            seed: i,
            buffer_packets: 32,
        };
        let flow = FlowSpec {
            id: "f".into(),
            src: 1,
            dst: 4,
            kind: TrafficKind::Saturating,
            packet_bytes,
        };
        let m = run_simulation(&t, &[flow], &cfg).expect("simulation");
        let thr = m.flows[0].throughput_bps;
        if thr > min * (1.0 + 1e-9) {
            above += 1;
        }
        let rel = (thr - min).abs() / min;
        worst = worst.max(rel);
        if rel > 0.02 {
            below += 1;
        }
    }
    outcome(
        above == 0 && below == 0,
        format!(
            "1000 paths: {above} above min capacity, {below} outside 2% of it (worst deviation {:.3}%)",
            worst * 100.0
        ),
    )
}

fn ap(name: &str, a: u64) -> Node {
    Node::new(name, a, NodeKind::VlcAccessPoint)
}

fn ud(name: &str, a: u64, proto: &str) -> Node {
    let mut n = Node::new(name, a, NodeKind::UserDevice);
    n.protocols.insert(proto.into());
    n
}

fn link(id: &str, s: u64, d: u64, t: Technology) -> Link {
    Link::new(id, s, d, t, 1e7)
}

fn pair(a: &mut Link, b: &mut Link) {
    a.pair = Some(b.id.clone());
    b.pair = Some(a.id.clone());
}

fn class(relayed: bool, duplex: bool, ret: ReturnTechnology, multi: bool) -> NetworkClass {
    NetworkClass {
        relayed,
        duplex,
        return_technology: ret,
        homogeneous: true,
        multi_channel: multi,
        parallel: false,
    }
}

fn canonical_topologies() -> Vec<(&'static str, Topology, NetworkClass)> {
    use ReturnTechnology::*;
    let mut out = Vec::new();

    // P2P: narrow LD beam to one device
    out.push((
        "P2P",
        Topology {
            nodes: vec![ap("ap", 1), ud("ud", 2, "802.15.7")],
            links: vec![link("ld", 1, 2, Technology::VlcLd)],
        },
        class(false, false, NotApplicable, false),
    ));

    // OWPAN: one AP broadcasting to similar UDs
    let mut links = Vec::new();
    for k in 0..3 {
        let mut l = link(&format!("led{k}"), 1, 2 + k, Technology::VlcLed);
        l.beam = owpan::net::Beam::P2mp;
        links.push(l);
    }
    out.push((
        "OWPAN",
        Topology {
            nodes: vec![ap("ap", 1), ud("a", 2, "802.15.7"), ud("b", 3, "802.15.7"), ud("c", 4, "802.15.7")],
            links,
        },
        class(false, false, NotApplicable, false),
    ));

    // Relayed: message reaches the serving AP through a relay
    out.push((
        "relayed",
        Topology {
            nodes: vec![ap("src", 1), Node::new("relay", 2, NodeKind::Relay), ap("ap", 3), ud("ud", 4, "802.15.7")],
            links: vec![
                link("hop1", 1, 2, Technology::VlcLd),
                link("hop2", 2, 3, Technology::VlcLd),
                link("down", 3, 4, Technology::VlcLed),
            ],
        },
        class(true, false, NotApplicable, false),
    ));

    // Standalone: VLC both ways
    let (mut d, mut u) = (link("down", 1, 2, Technology::VlcLed), link("up", 2, 1, Technology::VlcLd));
    pair(&mut d, &mut u);
    out.push((
        "standalone",
        Topology {
            nodes: vec![ap("ap", 1), ud("ud", 2, "802.15.7")],
            links: vec![d, u],
        },
        class(false, true, Standalone, false),
    ));

    // Aggregate: VLC down, RF up
    let (mut d, mut u) = (link("down", 1, 2, Technology::VlcLed), link("up", 2, 1, Technology::Rf));
    pair(&mut d, &mut u);
    out.push((
        "aggregate",
        Topology {
            nodes: vec![ap("ap", 1), ud("ud", 2, "802.15.7")],
            links: vec![d, u],
        },
        class(false, true, Aggregate, false),
    ));

    // Multi-channel: one beam made of several wavelengths
    let mut l = link("rgb", 1, 2, Technology::VlcLed);
    l.channel_count = 3;
    out.push((
        "multi-channel",
        Topology {
            nodes: vec![ap("ap", 1), ud("ud", 2, "802.15.7")],
            links: vec![l],
        },
        class(false, false, NotApplicable, true),
    ));
    out
}

fn random_topology(rng: &mut ChaCha8Rng) -> Topology {
    let n = rng.random_range(2..10u64);
    let kinds = [NodeKind::UserDevice, NodeKind::VlcAccessPoint, NodeKind::Relay];
    let techs = [
        Technology::VlcLed,
        Technology::VlcLd,
        Technology::Rf,
        Technology::Ethernet,
        Technology::Plc,
        Technology::Fso,
    ];
    let nodes: Vec<Node> = (1..=n)
        .map(|a| {
            let mut node = Node::new(format!("n{a}"), a * 7919, kinds[rng.random_range(0..3)]);
            for _ in 0..rng.random_range(0..3) {
                node.protocols.insert(["x", "y", "z"][rng.random_range(0..3)].into());
            }
            node
        })
        .collect();
    let mut links: Vec<Link> = Vec::new();
    for k in 0..rng.random_range(0..15) {
        let s = rng.random_range(1..=n);
        let mut d = rng.random_range(1..=n);
        if d == s {
            d = s % n + 1;
        }
        let mut l = Link::new(format!("l{k}"), s * 7919, d * 7919, techs[rng.random_range(0..6)], 1e6);
        l.channel_count = if rng.random_bool(0.2) { 2 } else { 1 };
        if rng.random_bool(0.4) {
            let mut r = Link::new(format!("r{k}"), d * 7919, s * 7919, techs[rng.random_range(0..6)], 1e6);
            pair(&mut l, &mut r);
            links.push(r);
        }
        links.push(l);
    }
    Topology { nodes, links }
}

/// Classifier conformance and permutation invariance.
fn criterion_6() -> Outcome {
    let mut problems = Vec::new();
    for (name, t, expected) in canonical_topologies() {
        match classify_topology(&t) {
            Ok(c) if c == expected => {}
            Ok(c) => problems.push(format!("{name}: got `{c}`, expected `{expected}`")),
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let mut checked = 0;
    for _ in 0..500 {
        let t = random_topology(&mut rng);
        let base = classify_topology(&t);
        let mut shuffled = t.clone();
        shuffled.nodes.shuffle(&mut rng);
        shuffled.links.shuffle(&mut rng);
        if classify_topology(&shuffled) != base {
            problems.push("classification changed under node/link reordering".into());
            break;
        }
        checked += 1;
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            format!("6 canonical topologies labelled, {checked} random topologies permutation-invariant")
        } else {
            problems.join("; ")
        },
    )
}

/// Simulation determinism through the CLI.
fn criterion_7() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_owpan");
    let config = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/w_owpan.toml");
    let dir = std::env::temp_dir().join(format!("owpan-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.join(format!("run{run}.csv"));
        let status = Command::new(exe)
            .args(["simulate", "--seed", "42", "--config"])
            .arg(&config)
            .arg("--output")
            .arg(&out)
            .env_remove("OWPAN_PARAMS")
            .output()
            .expect("run owpan");
        if !status.status.success() {
            let _ = std::fs::remove_dir_all(&dir);
            return outcome(false, format!("simulate exited with {}", status.status));
        }
        outputs.push(std::fs::read(&out).expect("read csv"));
    }
    let _ = std::fs::remove_dir_all(&dir);
    let same = outputs[0] == outputs[1] && !outputs[0].is_empty();
    outcome(
        same,
        format!("two seeded runs, {} CSV bytes each, identical: {same}", outputs[0].len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("rate-table reproduction", criterion_1),
        ("capacity sweep shape", criterion_2),
        ("Beers-Lambert point checks", criterion_3),
        ("codec suite", criterion_4),
        ("cascade / worst-channel law", criterion_5),
        ("classifier conformance", criterion_6),
        ("simulation determinism", criterion_7),
    ];
    let mut failed = 0;
    println!();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} - {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("\nacceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
