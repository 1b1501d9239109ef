//! Analysis and simulation toolkit for VLC-based optical wireless personal
//! area networks (OWPANs).
//!
//! The crate is organised by concern:
//!
//! - [`channel`]: deterministic gains of the indoor LED link and the outdoor
//!   laser link.
//! - [`capacity`]: electrical SNR, Shannon capacity, worst-link cascading and
//!   parameter sweeps.
//! - [`params`]: the flat link-budget parameter set and its unit-aware
//!   key/value file format.
//! - [`phy`]: IEEE 802.15.7 PHY I/II line codes, FEC, OOK/VPPM and the
//!   operating-mode catalog for PHY I-VI.
//! - [`net`]: topologies, the five-axis classifier, relays, the MAC
//!   superframe scheduler and the discrete-event simulator.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod channel;
pub mod net;
pub mod params;
pub mod phy;
