//! TOML topology and traffic configuration.
//!
//! ```toml
//! [simulation]
//! duration_s = 0.5        # required
//! seed = 7                # default 1
//! buffer_packets = 64     # default 64
//!
//! [[node]]
//! name = "ap1"
//! kind = "access-point"   # user-device | access-point | relay
//! address = 4096          # optional; see `assign_addresses`
//! capabilities = ["vlc-led", "rf"]
//! protocols = ["802.15.7"]
//!
//! [[link]]
//! id = "ap1-a1"
//! from = "ap1"
//! to = "a1"
//! technology = "vlc-led"  # vlc-led | vlc-ld | rf | ethernet | plc | fso
//! beam = "p2mp"           # p2p (default) | p2mp
//! scenario = 3            # 1-6, default 1
//! channels = 1
//! delay_s = 8.3e-9
//! pair = "a1-ap1"         # reverse link of a duplex pair
//! # capacity: either a fixed rate ...
//! capacity_bps = 1e8
//! # ... or a channel model evaluated with the link-budget parameters
//! model = "indoor"        # indoor | outdoor
//! attenuation_db_per_km = 20.0  # outdoor only; default first listed value
//! span_m = 160.0                # outdoor only; default parameter span
//! pr_over_n0_db = 30.0          # default parameter value
//! obstruction_db = 0.0          # applied in scenarios 4-6
//!
//! [[flow]]
//! id = "a1-to-b1"
//! from = "a1"
//! to = "b1"
//! traffic = "saturating"  # saturating | poisson | constant
//! rate_bps = 1e6          # poisson and constant only
//! packet_bytes = 1500
//! ```
//!
//! Nodes without an address are numbered 1, 2, ... in file order.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;

use crate::channel::{fso_link_gain, indoor_dc_gain, ChannelGain};
use crate::params::LinkBudgetParams;

use super::sim::{FlowSpec, SimConfig, TrafficKind};
use super::topology::{Beam, Link, LinkCapacity, Node, NodeKind, Scenario, Technology, Topology};
use super::NetError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    simulation: Option<RawSimulation>,
    #[serde(default)]
    node: Vec<RawNode>,
    #[serde(default)]
    link: Vec<RawLink>,
    #[serde(default)]
    flow: Vec<RawFlow>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    duration_s: f64,
    seed: Option<u64>,
    buffer_packets: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    name: String,
    kind: String,
    address: Option<u64>,
    #[serde(default)]
    capabilities: Vec<String>,
    #[serde(default)]
    protocols: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    id: String,
    from: String,
    to: String,
    technology: String,
    beam: Option<String>,
    scenario: Option<u8>,
    channels: Option<u32>,
    delay_s: Option<f64>,
    pair: Option<String>,
    capacity_bps: Option<f64>,
    model: Option<String>,
    attenuation_db_per_km: Option<f64>,
    span_m: Option<f64>,
    pr_over_n0_db: Option<f64>,
    obstruction_db: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFlow {
    id: String,
    from: String,
    to: String,
    traffic: String,
    rate_bps: Option<f64>,
    packet_bytes: usize,
}

/// A parsed configuration: topology, traffic and run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub topology: Topology,
    pub flows: Vec<FlowSpec>,
    pub sim: Option<SimConfig>,
}

fn malformed(msg: String) -> NetError {
    NetError::Config(msg)
}

fn node_kind(s: &str) -> Result<NodeKind, NetError> {
    match s {
        "user-device" => Ok(NodeKind::UserDevice),
        "access-point" => Ok(NodeKind::VlcAccessPoint),
        "relay" => Ok(NodeKind::Relay),
        _ => Err(malformed(format!("unknown node kind `{s}`"))),
    }
}

fn link_capacity(raw: &RawLink, params: &LinkBudgetParams) -> Result<LinkCapacity, NetError> {
    let err = |msg: &str| malformed(format!("link `{}`: {msg}", raw.id));
    match (raw.capacity_bps, raw.model.as_deref()) {
        (Some(c), None) => {
            if raw.attenuation_db_per_km.is_some() || raw.span_m.is_some() || raw.pr_over_n0_db.is_some() {
                return Err(err("channel-model keys given with a fixed capacity"));
            }
            Ok(LinkCapacity::Fixed(c))
        }
        (None, Some(model)) => {
            let pr = raw.pr_over_n0_db.unwrap_or(params.pr_over_n0_db);
            let (gain, responsivity) = match model {
                "indoor" => {
                    if raw.attenuation_db_per_km.is_some() || raw.span_m.is_some() {
                        return Err(err("attenuation and span apply to the outdoor model only"));
                    }
                    let g = indoor_dc_gain(&params.indoor).value() * params.amplification_gain;
                    (ChannelGain::saturating(g), params.indoor.responsivity)
                }
                "outdoor" => {
                    let alpha = raw
                        .attenuation_db_per_km
                        .or_else(|| params.attenuation_db_per_km.first().copied())
                        .ok_or_else(|| err("no attenuation coefficient"))?;
                    let mut o = params.outdoor_at(alpha);
                    if let Some(span) = raw.span_m {
                        o.span = span;
                    }
                    o.validate().map_err(|e| err(&e.to_string()))?;
                    (fso_link_gain(&o), o.responsivity)
                }
                other => return Err(err(&format!("unknown model `{other}`"))),
            };
            Ok(LinkCapacity::Shannon {
                gain,
                responsivity,
                pr_over_n0_db: pr,
                bandwidth: params.bandwidth,
            })
        }
        (Some(_), Some(_)) => Err(err("give either capacity_bps or model, not both")),
        (None, None) => Err(err("needs capacity_bps or model")),
    }
}

/// Parses a configuration. Channel-model links use `params`.
pub fn parse_network_config(text: &str, params: &LinkBudgetParams) -> Result<NetworkConfig, NetError> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| malformed(e.to_string()))?;

    let mut nodes = Vec::with_capacity(raw.node.len());
    for (i, n) in raw.node.iter().enumerate() {
        let mut node = Node::new(&n.name, n.address.unwrap_or(i as u64 + 1), node_kind(&n.kind)?);
        for c in &n.capabilities {
            node.capabilities
                .insert(c.parse().map_err(|e: String| malformed(format!("node `{}`: {e}", n.name)))?);
        }
        node.protocols = n.protocols.iter().cloned().collect::<BTreeSet<_>>();
        nodes.push(node);
    }
    let address = |name: &str, what: &str| {
        nodes
            .iter()
            .find(|n| n.name == name)
            .map(|n| n.address)
            .ok_or_else(|| malformed(format!("{what} references unknown node `{name}`")))
    };

    let mut links = Vec::with_capacity(raw.link.len());
    for l in &raw.link {
        let what = format!("link `{}`", l.id);
        let technology: Technology = l
            .technology
            .parse()
            .map_err(|e: String| malformed(format!("{what}: {e}")))?;
        let beam = match l.beam.as_deref() {
            None | Some("p2p") => Beam::P2p,
            Some("p2mp") => Beam::P2mp,
            Some(other) => return Err(malformed(format!("{what}: unknown beam `{other}`"))),
        };
        let mut link = Link::new(&l.id, address(&l.from, &what)?, address(&l.to, &what)?, technology, 0.0);
        link.beam = beam;
        link.scenario = Scenario::new(l.scenario.unwrap_or(1))?;
        link.channel_count = l.channels.unwrap_or(1);
        link.propagation_delay = l.delay_s.unwrap_or(0.0);
        link.obstruction_db = l.obstruction_db.unwrap_or(0.0);
        link.pair = l.pair.clone();
        link.capacity = link_capacity(l, params)?;
        links.push(link);
    }

    let topology = Topology { nodes, links };
    topology.validate()?;

    let mut flows = Vec::with_capacity(raw.flow.len());
    for f in &raw.flow {
        let what = format!("flow `{}`", f.id);
        let kind = match (f.traffic.as_str(), f.rate_bps) {
            ("saturating", None) => TrafficKind::Saturating,
            ("poisson", Some(rate_bps)) => TrafficKind::Poisson { rate_bps },
            ("constant", Some(rate_bps)) => TrafficKind::Constant { rate_bps },
            ("saturating", Some(_)) => {
                return Err(malformed(format!("{what}: saturating flows take no rate")))
            }
            ("poisson" | "constant", None) => {
                return Err(malformed(format!("{what}: rate_bps is required")))
            }
            (other, _) => return Err(malformed(format!("{what}: unknown traffic `{other}`"))),
        };
        let endpoint = |name: &str| {
            topology
                .node_by_name(name)
                .map(|n| n.address)
                .ok_or_else(|| malformed(format!("{what} references unknown node `{name}`")))
        };
        flows.push(FlowSpec {
            id: f.id.clone(),
            src: endpoint(&f.from)?,
            dst: endpoint(&f.to)?,
            kind,
            packet_bytes: f.packet_bytes,
        });
    }

    let sim = raw.simulation.map(|s| {
        let d = SimConfig::default();
        SimConfig {
            duration: s.duration_s,
            seed: s.seed.unwrap_or(d.seed),
            buffer_packets: s.buffer_packets.unwrap_or(d.buffer_packets),
        }
    });

    Ok(NetworkConfig { topology, flows, sim })
}

pub fn load_network_config(path: &Path, params: &LinkBudgetParams) -> Result<NetworkConfig, NetError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    parse_network_config(&text, params)
}
