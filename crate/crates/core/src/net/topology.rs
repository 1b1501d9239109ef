//! Nodes, links and topologies.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::capacity::{electrical_snr, link_capacity, SnrBudget};
use crate::channel::ChannelGain;

use super::NetError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    UserDevice,
    VlcAccessPoint,
    Relay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Technology {
    VlcLed,
    VlcLd,
    Rf,
    Ethernet,
    Plc,
    Fso,
}

impl Technology {
    pub fn is_vlc(self) -> bool {
        matches!(self, Technology::VlcLed | Technology::VlcLd)
    }

    pub fn label(self) -> &'static str {
        match self {
            Technology::VlcLed => "vlc-led",
            Technology::VlcLd => "vlc-ld",
            Technology::Rf => "rf",
            Technology::Ethernet => "ethernet",
            Technology::Plc => "plc",
            Technology::Fso => "fso",
        }
    }
}

impl fmt::Display for Technology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Technology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Technology::VlcLed,
            Technology::VlcLd,
            Technology::Rf,
            Technology::Ethernet,
            Technology::Plc,
            Technology::Fso,
        ]
        .into_iter()
        .find(|t| t.label() == s)
        .ok_or_else(|| format!("unknown technology `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub address: u64,
    pub kind: NodeKind,
    pub capabilities: BTreeSet<Technology>,
    /// Connectivity protocol tags; decide the homogeneity axis.
    pub protocols: BTreeSet<String>,
}

impl Node {
    pub fn new(name: impl Into<String>, address: u64, kind: NodeKind) -> Self {
        Node {
            name: name.into(),
            address,
            kind,
            capabilities: BTreeSet::new(),
            protocols: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Simplex,
    HalfOfDuplexPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Beam {
    P2p,
    P2mp,
}

/// Connectivity scenario 1-6. Scenarios 1-3 are line-of-sight; 4-6 are
/// their obstructed counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scenario(u8);

impl Scenario {
    pub fn new(n: u8) -> Result<Self, NetError> {
        if (1..=6).contains(&n) {
            Ok(Scenario(n))
        } else {
            Err(NetError::Malformed(format!("scenario {n} is outside 1..=6")))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn is_los(self) -> bool {
        self.0 <= 3
    }
}

/// How a link's capacity is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkCapacity {
    /// Configured rate, bit/s (RF, Ethernet and other unmodelled hops).
    Fixed(f64),
    /// Shannon capacity of an optical hop.
    Shannon {
        gain: ChannelGain,
        responsivity: f64,
        pr_over_n0_db: f64,
        bandwidth: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub id: String,
    pub src: u64,
    pub dst: u64,
    pub technology: Technology,
    pub beam: Beam,
    pub scenario: Scenario,
    pub capacity: LinkCapacity,
    /// Seconds.
    pub propagation_delay: f64,
    /// Parallel wavelength channels, each at the per-channel capacity.
    pub channel_count: u32,
    /// Reflection loss applied to the optical gain in obstructed scenarios, dB.
    pub obstruction_db: f64,
    /// Id of the reverse link of a duplex pair.
    pub pair: Option<String>,
}

impl Link {
    pub fn new(id: impl Into<String>, src: u64, dst: u64, technology: Technology, capacity_bps: f64) -> Self {
        Link {
            id: id.into(),
            src,
            dst,
            technology,
            beam: Beam::P2p,
            scenario: Scenario(1),
            capacity: LinkCapacity::Fixed(capacity_bps),
            propagation_delay: 0.0,
            channel_count: 1,
            obstruction_db: 0.0,
            pair: None,
        }
    }

    pub fn direction(&self) -> Direction {
        if self.pair.is_some() {
            Direction::HalfOfDuplexPair
        } else {
            Direction::Simplex
        }
    }

    pub fn is_los(&self) -> bool {
        self.scenario.is_los()
    }

    /// Capacity of all channels together, bit/s. Obstruction loss applies
    /// only in non-line-of-sight scenarios.
    pub fn effective_capacity(&self) -> f64 {
        let per_channel = match self.capacity {
            LinkCapacity::Fixed(c) => c,
            LinkCapacity::Shannon {
                gain,
                responsivity,
                pr_over_n0_db,
                bandwidth,
            } => {
                let loss = if self.is_los() {
                    1.0
                } else {
                    10f64.powf(-self.obstruction_db / 10.0)
                };
                let snr = electrical_snr(&SnrBudget {
                    pr_over_n0_db,
                    bandwidth,
                    responsivity,
                    channel_gain: ChannelGain::saturating(gain.value() * loss),
                });
                link_capacity(snr, bandwidth)
            }
        };
        per_channel * self.channel_count as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Topology {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
}

impl Topology {
    pub fn node(&self, address: u64) -> Option<&Node> {
        self.nodes.iter().find(|n| n.address == address)
    }

    pub fn node_by_name(&self, name: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub fn link(&self, id: &str) -> Option<&Link> {
        self.links.iter().find(|l| l.id == id)
    }

    pub fn validate(&self) -> Result<(), NetError> {
        let bad = |msg: String| Err(NetError::Malformed(msg));
        let mut addresses = HashSet::new();
        let mut names = HashSet::new();
        for n in &self.nodes {
            if !addresses.insert(n.address) {
                return bad(format!("duplicate address {:#018x}", n.address));
            }
            if !names.insert(n.name.as_str()) {
                return bad(format!("duplicate node name `{}`", n.name));
            }
        }
        let mut by_id: HashMap<&str, &Link> = HashMap::new();
        for l in &self.links {
            if by_id.insert(l.id.as_str(), l).is_some() {
                return bad(format!("duplicate link id `{}`", l.id));
            }
            for end in [l.src, l.dst] {
                if !addresses.contains(&end) {
                    return bad(format!("link `{}` references unknown node {end:#018x}", l.id));
                }
            }
            if l.src == l.dst {
                return bad(format!("link `{}` is a self-loop", l.id));
            }
            if l.channel_count == 0 {
                return bad(format!("link `{}` has zero channels", l.id));
            }
            if !(l.propagation_delay >= 0.0 && l.propagation_delay.is_finite()) {
                return bad(format!("link `{}` has invalid propagation delay", l.id));
            }
            if !(l.obstruction_db >= 0.0 && l.obstruction_db.is_finite()) {
                return bad(format!("link `{}` has invalid obstruction loss", l.id));
            }
            match l.capacity {
                LinkCapacity::Fixed(c) => {
                    if !(c > 0.0 && c.is_finite()) {
                        return bad(format!("link `{}` capacity must be > 0", l.id));
                    }
                    if !l.is_los() && l.obstruction_db > 0.0 {
                        return bad(format!(
                            "link `{}`: obstruction loss needs a channel-model capacity",
                            l.id
                        ));
                    }
                }
                LinkCapacity::Shannon {
                    responsivity,
                    bandwidth,
                    ..
                } => {
                    if !(responsivity > 0.0 && bandwidth > 0.0) {
                        return bad(format!("link `{}` has invalid SNR budget", l.id));
                    }
                    if !l.technology.is_vlc() && l.technology != Technology::Fso {
                        return bad(format!(
                            "link `{}`: channel-model capacity needs an optical technology",
                            l.id
                        ));
                    }
                }
            }
        }
        for l in &self.links {
            let Some(pair_id) = &l.pair else { continue };
            let Some(other) = by_id.get(pair_id.as_str()) else {
                return bad(format!("link `{}` pairs with unknown link `{pair_id}`", l.id));
            };
            if other.pair.as_deref() != Some(l.id.as_str()) {
                return bad(format!("links `{}` and `{pair_id}` do not pair each other", l.id));
            }
            if other.src != l.dst || other.dst != l.src {
                return bad(format!("links `{}` and `{pair_id}` are not reverse of each other", l.id));
            }
        }
        Ok(())
    }

    /// Links leaving `address`, in topology order.
    pub fn outgoing(&self, address: u64) -> impl Iterator<Item = &Link> {
        self.links.iter().filter(move |l| l.src == address)
    }

    pub fn incoming(&self, address: u64) -> impl Iterator<Item = &Link> {
        self.links.iter().filter(move |l| l.dst == address)
    }

    /// Fewest-hop path as link indices. Ties go to the lexicographically
    /// smallest link ids, so the answer does not depend on list order.
    pub fn route(&self, src: u64, dst: u64) -> Result<Vec<usize>, NetError> {
        if self.node(src).is_none() || self.node(dst).is_none() {
            return Err(NetError::Routing(format!(
                "unknown endpoint {src:#018x} or {dst:#018x}"
            )));
        }
        if src == dst {
            return Err(NetError::Routing("flow source equals destination".into()));
        }
        let mut order: Vec<usize> = (0..self.links.len()).collect();
        order.sort_by(|&a, &b| self.links[a].id.cmp(&self.links[b].id));
        let mut via: HashMap<u64, usize> = HashMap::new();
        let mut frontier = vec![src];
        let mut seen: HashSet<u64> = HashSet::from([src]);
        while !frontier.is_empty() && !seen.contains(&dst) {
            let mut next = Vec::new();
            for &node in &frontier {
                for &li in &order {
                    let l = &self.links[li];
                    if l.src == node && seen.insert(l.dst) {
                        via.insert(l.dst, li);
                        next.push(l.dst);
                    }
                }
            }
            frontier = next;
        }
        if !seen.contains(&dst) {
            return Err(NetError::Routing(format!(
                "no path from {} to {}",
                self.node(src).map_or("?", |n| &n.name),
                self.node(dst).map_or("?", |n| &n.name)
            )));
        }
        let mut path = Vec::new();
        let mut at = dst;
        while at != src {
            let li = via[&at];
            path.push(li);
            at = self.links[li].src;
        }
        path.reverse();
        Ok(path)
    }
}
