//! Network layer: topology model, five-axis classifier, relays, MAC
//! superframe scheduling, address assignment and the packet simulator.

use std::fmt;

use crate::phy::PhyError;

pub mod address;
pub mod classify;
pub mod config;
pub mod relay;
pub mod sim;
pub mod superframe;
pub mod topology;

pub use address::assign_addresses;
pub use classify::{classify_topology, NetworkClass, ReturnTechnology};
pub use config::{load_network_config, parse_network_config, NetworkConfig};
pub use relay::{af_relay, df_relay, AfRelay};
pub use sim::{run_simulation, FlowSpec, SimConfig, SimMetrics, TrafficKind};
pub use superframe::{build_superframe, Gts, Superframe};
pub use topology::{Beam, Direction, Link, LinkCapacity, Node, NodeKind, Scenario, Technology, Topology};

#[derive(Debug, Clone, PartialEq)]
pub enum NetError {
    /// Topology or traffic breaks a structural invariant.
    Malformed(String),
    /// A flow's endpoints are not connected.
    Routing(String),
    /// Configuration file could not be read or parsed.
    Config(String),
    /// A decode-and-forward relay could not decode its input.
    DecodeFailure(PhyError),
    Phy(PhyError),
}

impl fmt::Display for NetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetError::Malformed(msg) => write!(f, "malformed topology: {msg}"),
            NetError::Routing(msg) => write!(f, "routing error: {msg}"),
            NetError::Config(msg) => write!(f, "configuration error: {msg}"),
            NetError::DecodeFailure(e) => write!(f, "relay decode failure: {e}"),
            NetError::Phy(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for NetError {}
