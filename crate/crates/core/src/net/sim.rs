//! Deterministic discrete-event packet simulator.
//!
//! Every link is a store-and-forward FIFO server at its effective capacity
//! with a finite buffer, followed by its propagation delay. Events are
//! ordered by `(time, insertion sequence)`, so equal-time events run in the
//! order they were scheduled and a run is a pure function of its inputs.
//!
//! Traffic sources:
//!
//! - saturating: an unbounded backlog at the source; the first link draws a
//!   new packet whenever it would otherwise go idle.
//! - poisson: exponential inter-arrival times from ChaCha8 seeded with the
//!   run seed, one stream per flow (stream index = flow index).
//! - constant: one packet every `packet_bits / rate` seconds from t = 0.
//!
//! The run stops at `duration`. Packets still queued or in flight then count
//! as dropped (and as truncated), so delivered + dropped = injected.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use super::topology::Topology;
use super::NetError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrafficKind {
    Saturating,
    Poisson { rate_bps: f64 },
    Constant { rate_bps: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSpec {
    pub id: String,
    pub src: u64,
    pub dst: u64,
    pub kind: TrafficKind,
    pub packet_bytes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Seconds.
    pub duration: f64,
    pub seed: u64,
    /// Packets each link may queue behind the one in service.
    pub buffer_packets: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            duration: 1.0,
            seed: 1,
            buffer_packets: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LatencyStats {
    pub mean: f64,
    pub p50: f64,
    pub p95: f64,
    pub p99: f64,
    pub max: f64,
}

impl LatencyStats {
    /// Nearest-rank percentiles. `None` for an empty sample.
    fn from_samples(mut v: Vec<f64>) -> Option<Self> {
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let rank = |p: f64| v[((p * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
        Some(LatencyStats {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            p50: rank(0.50),
            p95: rank(0.95),
            p99: rank(0.99),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowMetrics {
    pub id: String,
    pub injected: u64,
    pub delivered: u64,
    pub dropped: u64,
    /// Delivered payload bits over the run duration.
    pub throughput_bps: f64,
    pub latency: Option<LatencyStats>,
    /// Sum of propagation delays along the route, a latency lower bound.
    pub propagation_delay: f64,
    /// Cascade (worst-link) capacity of the route.
    pub path_capacity: f64,
    pub path: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkMetrics {
    pub id: String,
    pub offered: u64,
    pub forwarded: u64,
    pub dropped: u64,
    pub throughput_bps: f64,
    /// Busy fraction of the run.
    pub utilization: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimMetrics {
    pub duration: f64,
    pub seed: u64,
    pub injected: u64,
    pub delivered: u64,
    pub dropped: u64,
    /// Dropped because the run ended before delivery.
    pub truncated: u64,
    pub throughput_bps: f64,
    pub latency: Option<LatencyStats>,
    pub flows: Vec<FlowMetrics>,
    pub links: Vec<LinkMetrics>,
}

/// CSV header of [`SimMetrics::to_csv`].
pub const METRICS_CSV_HEADER: &str = "scope,id,injected,delivered,dropped,throughput_bps,mean_latency_s,p50_latency_s,p95_latency_s,p99_latency_s,utilization";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SimMetrics {
    /// One row per flow, then per link, then a `total` row. Link rows use
    /// `injected` for packets offered to the link and `delivered` for packets
    /// it forwarded; latency columns are empty there and `utilization` is
    /// empty on flow and total rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(METRICS_CSV_HEADER);
        out.push('\n');
        let lat = |l: &Option<LatencyStats>| {
            [
                opt(l.map(|l| l.mean)),
                opt(l.map(|l| l.p50)),
                opt(l.map(|l| l.p95)),
                opt(l.map(|l| l.p99)),
            ]
            .join(",")
        };
        for f in &self.flows {
            let _ = writeln!(
                out,
                "flow,{},{},{},{},{},{},",
                f.id,
                f.injected,
                f.delivered,
                f.dropped,
                f.throughput_bps,
                lat(&f.latency)
            );
        }
        for l in &self.links {
            let _ = writeln!(
                out,
                "link,{},{},{},{},{},,,,,{}",
                l.id, l.offered, l.forwarded, l.dropped, l.throughput_bps, l.utilization
            );
        }
        let _ = writeln!(
            out,
            "total,all,{},{},{},{},{},",
            self.injected,
            self.delivered,
            self.dropped,
            self.throughput_bps,
            lat(&self.latency)
        );
        out
    }

    /// Human-readable summary block.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "simulation summary");
        let _ = writeln!(s, "  duration        {} s (seed {})", self.duration, self.seed);
        let _ = writeln!(
            s,
            "  packets         {} injected, {} delivered, {} dropped ({} truncated)",
            self.injected, self.delivered, self.dropped, self.truncated
        );
        let _ = writeln!(s, "  throughput      {:.6e} bit/s", self.throughput_bps);
        if let Some(l) = self.latency {
            let _ = writeln!(
                s,
                "  latency         mean {:.6e} s, p50 {:.6e} s, p99 {:.6e} s",
                l.mean, l.p50, l.p99
            );
        }
        for f in &self.flows {
            let _ = writeln!(
                s,
                "  flow {:<10} {:.6e} bit/s over {} (bottleneck {:.6e} bit/s)",
                f.id,
                f.throughput_bps,
                f.path.join(" -> "),
                f.path_capacity
            );
        }
        s
    }
}

#[derive(Debug, Clone, Copy)]
enum Event {
    Inject { flow: usize },
    TxDone { link: usize },
    Arrive { packet: usize },
}

#[derive(Debug)]
struct Scheduled {
    time: f64,
    seq: u64,
    event: Event,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scheduled {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Packet {
    flow: usize,
    created: f64,
    hop: usize,
    done: bool,
}

#[derive(Default)]
struct LinkState {
    capacity: f64,
    delay: f64,
    queue: VecDeque<usize>,
    busy: Option<(usize, f64)>,
    busy_time: f64,
    /// Saturating flows whose first hop is this link.
    backlog: Vec<usize>,
    next_backlog: usize,
    offered: u64,
    forwarded: u64,
    forwarded_bits: f64,
    dropped: u64,
}

struct Engine<'a> {
    now: f64,
    seq: u64,
    heap: BinaryHeap<Scheduled>,
    duration: f64,
    buffer: usize,
    flows: &'a [FlowSpec],
    paths: Vec<Vec<usize>>,
    links: Vec<LinkState>,
    packets: Vec<Packet>,
    injected: Vec<u64>,
    dropped: Vec<u64>,
    latencies: Vec<Vec<f64>>,
}

impl Engine<'_> {
    fn schedule(&mut self, time: f64, event: Event) {
        self.heap.push(Scheduled {
            time,
            seq: self.seq,
            event,
        });
        self.seq += 1;
    }

    fn bits(&self, packet: usize) -> f64 {
        (self.flows[self.packets[packet].flow].packet_bytes * 8) as f64
    }

    fn new_packet(&mut self, flow: usize) -> usize {
        self.injected[flow] += 1;
        self.packets.push(Packet {
            flow,
            created: self.now,
            hop: 0,
            done: false,
        });
        self.packets.len() - 1
    }

    fn start(&mut self, link: usize, packet: usize) {
        let t = self.bits(packet) / self.links[link].capacity;
        self.links[link].busy = Some((packet, self.now));
        self.schedule(self.now + t, Event::TxDone { link });
    }

    /// Next packet for an idle link: queue first, then saturating backlog.
    fn serve_next(&mut self, link: usize) {
        if let Some(p) = self.links[link].queue.pop_front() {
            self.start(link, p);
            return;
        }
        let l = &mut self.links[link];
        if l.backlog.is_empty() {
            return;
        }
        let flow = l.backlog[l.next_backlog % l.backlog.len()];
        l.next_backlog += 1;
        l.offered += 1;
        let p = self.new_packet(flow);
        self.start(link, p);
    }

    fn offer(&mut self, link: usize, packet: usize) {
        let l = &mut self.links[link];
        l.offered += 1;
        if l.busy.is_none() {
            self.start(link, packet);
        } else if l.queue.len() < self.buffer {
            l.queue.push_back(packet);
        } else {
            l.dropped += 1;
            self.packets[packet].done = true;
            let flow = self.packets[packet].flow;
            self.dropped[flow] += 1;
        }
    }

    fn handle(&mut self, event: Event, rngs: &mut [Option<(ChaCha8Rng, Exp<f64>)>]) {
        match event {
            Event::Inject { flow } => {
                let p = self.new_packet(flow);
                let first = self.paths[flow][0];
                self.offer(first, p);
                let bits = (self.flows[flow].packet_bytes * 8) as f64;
                let gap = match (self.flows[flow].kind, &mut rngs[flow]) {
                    (TrafficKind::Constant { rate_bps }, _) => bits / rate_bps,
                    (TrafficKind::Poisson { .. }, Some((rng, exp))) => exp.sample(rng),
                    _ => unreachable!("saturating flows have no inject events"),
                };
                self.schedule(self.now + gap, Event::Inject { flow });
            }
            Event::TxDone { link } => {
                let (p, started) = self.links[link].busy.take().expect("busy link");
                let bits = self.bits(p);
                let l = &mut self.links[link];
                l.forwarded_bits += bits;
                l.busy_time += self.now - started;
                l.forwarded += 1;
                let delay = l.delay;
                self.schedule(self.now + delay, Event::Arrive { packet: p });
                self.serve_next(link);
            }
            Event::Arrive { packet } => {
                let flow = self.packets[packet].flow;
                self.packets[packet].hop += 1;
                let hop = self.packets[packet].hop;
                if hop == self.paths[flow].len() {
                    self.packets[packet].done = true;
                    let latency = self.now - self.packets[packet].created;
                    self.latencies[flow].push(latency);
                } else {
                    let next = self.paths[flow][hop];
                    self.offer(next, packet);
                }
            }
        }
    }
}

/// Runs the topology under `traffic` for `config.duration` seconds.
pub fn run_simulation(
    topology: &Topology,
    traffic: &[FlowSpec],
    config: &SimConfig,
) -> Result<SimMetrics, NetError> {
    topology.validate()?;
    if !(config.duration > 0.0 && config.duration.is_finite()) {
        return Err(NetError::Malformed(format!(
            "duration {} must be > 0",
            config.duration
        )));
    }
    let mut paths = Vec::with_capacity(traffic.len());
    let mut rngs = Vec::with_capacity(traffic.len());
    for (i, f) in traffic.iter().enumerate() {
        if f.packet_bytes == 0 {
            return Err(NetError::Malformed(format!("flow `{}` has zero-byte packets", f.id)));
        }
        let bits = (f.packet_bytes * 8) as f64;
        let rng = match f.kind {
            TrafficKind::Saturating => None,
            TrafficKind::Poisson { rate_bps } | TrafficKind::Constant { rate_bps } => {
                if !(rate_bps > 0.0 && rate_bps.is_finite()) {
                    return Err(NetError::Malformed(format!("flow `{}` rate must be > 0", f.id)));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(i as u64);
                let exp = Exp::new(rate_bps / bits)
                    .map_err(|e| NetError::Malformed(format!("flow `{}`: {e}", f.id)))?;
                Some((rng, exp))
            }
        };
        rngs.push(rng);
        paths.push(topology.route(f.src, f.dst).map_err(|e| match e {
            NetError::Routing(msg) => NetError::Routing(format!("flow `{}`: {msg}", f.id)),
            other => other,
        })?);
    }

    let mut engine = Engine {
        now: 0.0,
        seq: 0,
        heap: BinaryHeap::new(),
        duration: config.duration,
        buffer: config.buffer_packets,
        flows: traffic,
        paths,
        links: topology
            .links
            .iter()
            .map(|l| LinkState {
                capacity: l.effective_capacity(),
                delay: l.propagation_delay,
                ..Default::default()
            })
            .collect(),
        packets: Vec::new(),
        injected: vec![0; traffic.len()],
        dropped: vec![0; traffic.len()],
        latencies: vec![Vec::new(); traffic.len()],
    };
    for (i, l) in engine.links.iter().enumerate() {
        if !(l.capacity > 0.0) {
            return Err(NetError::Malformed(format!(
                "link `{}` has zero capacity",
                topology.links[i].id
            )));
        }
    }

    for (i, f) in traffic.iter().enumerate() {
        match f.kind {
            TrafficKind::Saturating => {
                let first = engine.paths[i][0];
                engine.links[first].backlog.push(i);
            }
            TrafficKind::Constant { .. } => engine.schedule(0.0, Event::Inject { flow: i }),
            TrafficKind::Poisson { .. } => {
                let (rng, exp) = rngs[i].as_mut().expect("poisson stream");
                let t = exp.sample(rng);
                engine.schedule(t, Event::Inject { flow: i });
            }
        }
    }
    for link in 0..engine.links.len() {
        if engine.links[link].busy.is_none() {
            engine.serve_next(link);
        }
    }

    while let Some(next) = engine.heap.pop() {
        if next.time > engine.duration {
            break;
        }
        engine.now = next.time;
        engine.handle(next.event, &mut rngs);
    }

    let duration = engine.duration;
    for l in &mut engine.links {
        if let Some((_, started)) = l.busy {
            l.busy_time += duration - started;
        }
    }
    let mut truncated = 0u64;
    for p in &engine.packets {
        if !p.done {
            truncated += 1;
            engine.dropped[p.flow] += 1;
        }
    }

    let mut all_latencies = Vec::new();
    let mut delivered_bits = 0.0;
    let flows: Vec<FlowMetrics> = traffic
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let lat = std::mem::take(&mut engine.latencies[i]);
            let delivered = lat.len() as u64;
            let bits = delivered as f64 * (f.packet_bytes * 8) as f64;
            delivered_bits += bits;
            all_latencies.extend_from_slice(&lat);
            let path = &engine.paths[i];
            FlowMetrics {
                id: f.id.clone(),
                injected: engine.injected[i],
                delivered,
                dropped: engine.dropped[i],
                throughput_bps: bits / duration,
                latency: LatencyStats::from_samples(lat),
                propagation_delay: path.iter().map(|&l| topology.links[l].propagation_delay).sum(),
                path_capacity: path
                    .iter()
                    .map(|&l| engine.links[l].capacity)
                    .fold(f64::INFINITY, f64::min),
                path: path.iter().map(|&l| topology.links[l].id.clone()).collect(),
            }
        })
        .collect();
    let links = topology
        .links
        .iter()
        .zip(&engine.links)
        .map(|(l, s)| LinkMetrics {
            id: l.id.clone(),
            offered: s.offered,
            forwarded: s.forwarded,
            dropped: s.dropped,
            throughput_bps: s.forwarded_bits / duration,
            utilization: s.busy_time / duration,
        })
        .collect();

    Ok(SimMetrics {
        duration,
        seed: config.seed,
        injected: flows.iter().map(|f| f.injected).sum(),
        delivered: flows.iter().map(|f| f.delivered).sum(),
        dropped: flows.iter().map(|f| f.dropped).sum(),
        truncated,
        throughput_bps: delivered_bits / duration,
        latency: LatencyStats::from_samples(all_latencies),
        flows,
        links,
    })
}
