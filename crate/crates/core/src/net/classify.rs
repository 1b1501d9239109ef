//! Five-axis classification of a topology.
//!
//! - relayed: some non-UD node forwards traffic it received from another
//!   non-UD node to a third party, or a relay node carries links.
//! - duplex: every terminal of the VLC network (the UDs touching a VLC link,
//!   or every VLC endpoint when there are no UDs) both sends and receives.
//! - standalone: a duplex network whose terminals use VLC, and only VLC, in
//!   both directions. Any other duplex network is aggregate; a terminal with
//!   both a VLC and a non-VLC connection in each direction sets the
//!   parallel-connection flag.
//! - homogeneous: for every access point, the UDs linked to it carry equal
//!   protocol tag sets.
//! - multi-channel: some VLC link has more than one channel.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use super::topology::{NodeKind, Topology};
use super::NetError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReturnTechnology {
    Standalone,
    Aggregate,
    /// Simplex networks have no return path to classify.
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NetworkClass {
    pub relayed: bool,
    pub duplex: bool,
    pub return_technology: ReturnTechnology,
    pub homogeneous: bool,
    pub multi_channel: bool,
    /// Aggregate variant with independent VLC and non-VLC connections side
    /// by side.
    pub parallel: bool,
}

impl fmt::Display for NetworkClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ret = match self.return_technology {
            ReturnTechnology::Standalone => "standalone",
            ReturnTechnology::Aggregate if self.parallel => "aggregate (parallel)",
            ReturnTechnology::Aggregate => "aggregate",
            ReturnTechnology::NotApplicable => "n/a",
        };
        write!(
            f,
            "{}, {}, {}, {}, {}",
            if self.relayed { "relayed" } else { "non-relayed" },
            if self.duplex { "duplex" } else { "simplex" },
            ret,
            if self.homogeneous { "homogeneous" } else { "heterogeneous" },
            if self.multi_channel { "multi-channel" } else { "single-channel" },
        )
    }
}

pub fn classify_topology(t: &Topology) -> Result<NetworkClass, NetError> {
    t.validate()?;
    let kind = |a: u64| t.node(a).map(|n| n.kind).unwrap_or(NodeKind::UserDevice);

    let relay_used = t
        .links
        .iter()
        .any(|l| kind(l.src) == NodeKind::Relay || kind(l.dst) == NodeKind::Relay);
    let forwards = t.nodes.iter().filter(|n| n.kind != NodeKind::UserDevice).any(|n| {
        t.incoming(n.address)
            .filter(|i| kind(i.src) != NodeKind::UserDevice)
            .any(|i| t.outgoing(n.address).any(|o| o.dst != i.src))
    });
    let relayed = relay_used || forwards;

    let vlc_ends: BTreeSet<u64> = t
        .links
        .iter()
        .filter(|l| l.technology.is_vlc())
        .flat_map(|l| [l.src, l.dst])
        .filter(|&a| kind(a) != NodeKind::Relay)
        .collect();
    let ud_ends: BTreeSet<u64> = vlc_ends
        .iter()
        .copied()
        .filter(|&a| kind(a) == NodeKind::UserDevice)
        .collect();
    let terminals = if ud_ends.is_empty() { vlc_ends } else { ud_ends };

    let duplex = !terminals.is_empty()
        && terminals
            .iter()
            .all(|&a| t.incoming(a).next().is_some() && t.outgoing(a).next().is_some());

    let mut standalone = true;
    let mut parallel = false;
    for &a in &terminals {
        let vlc_in = t.incoming(a).any(|l| l.technology.is_vlc());
        let vlc_out = t.outgoing(a).any(|l| l.technology.is_vlc());
        let other_in = t.incoming(a).any(|l| !l.technology.is_vlc());
        let other_out = t.outgoing(a).any(|l| !l.technology.is_vlc());
        if !(vlc_in && vlc_out) || other_in || other_out {
            standalone = false;
        }
        if vlc_in && vlc_out && other_in && other_out {
            parallel = true;
        }
    }
    let return_technology = match (duplex, standalone) {
        (false, _) => ReturnTechnology::NotApplicable,
        (true, true) => ReturnTechnology::Standalone,
        (true, false) => ReturnTechnology::Aggregate,
    };

    let homogeneous = t
        .nodes
        .iter()
        .filter(|n| n.kind == NodeKind::VlcAccessPoint)
        .all(|ap| {
            let uds: HashSet<u64> = t
                .links
                .iter()
                .filter_map(|l| {
                    if l.src == ap.address {
                        Some(l.dst)
                    } else if l.dst == ap.address {
                        Some(l.src)
                    } else {
                        None
                    }
                })
                .filter(|&a| kind(a) == NodeKind::UserDevice)
                .collect();
            let mut tags = uds.iter().filter_map(|&a| t.node(a)).map(|n| &n.protocols);
            match tags.next() {
                None => true,
                Some(first) => tags.all(|s| s == first),
            }
        });

    let multi_channel = t
        .links
        .iter()
        .any(|l| l.technology.is_vlc() && l.channel_count > 1);

    Ok(NetworkClass {
        relayed,
        duplex,
        return_technology,
        homogeneous,
        multi_channel,
        parallel: duplex && !standalone && parallel,
    })
}
