//! Seeded assignment of unique 64-bit node addresses.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::topology::Topology;

/// Gives every node a fresh address drawn from ChaCha8 seeded with `seed`,
/// redrawing on the (astronomically rare) collision, and rewrites link
/// endpoints to match. Addresses depend only on the seed and node order.
pub fn assign_addresses(t: &Topology, seed: u64) -> Topology {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used = HashSet::with_capacity(t.nodes.len());
    let mut remap = HashMap::with_capacity(t.nodes.len());
    let mut out = t.clone();
    for node in &mut out.nodes {
        let address = loop {
            let a: u64 = rng.random();
            if used.insert(a) {
                break a;
            }
        };
        remap.insert(node.address, address);
        node.address = address;
    }
    for link in &mut out.links {
        link.src = remap.get(&link.src).copied().unwrap_or(link.src);
        link.dst = remap.get(&link.dst).copied().unwrap_or(link.dst);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::topology::{Link, Node, NodeKind, Technology};

    fn many(n: usize) -> Topology {
        Topology {
            nodes: (0..n as u64)
                .map(|i| Node::new(format!("n{i}"), i, NodeKind::UserDevice))
                .collect(),
            links: vec![Link::new("l", 0, 1, Technology::Rf, 1.0)],
        }
    }

    #[test]
    fn unique_over_ten_thousand() {
        let t = assign_addresses(&many(10_000), 1);
        let set: HashSet<u64> = t.nodes.iter().map(|n| n.address).collect();
        assert_eq!(set.len(), 10_000);
    }

    #[test]
    fn deterministic_per_seed_and_links_follow() {
        let base = many(100);
        let a = assign_addresses(&base, 42);
        assert_eq!(a, assign_addresses(&base, 42));
        assert_ne!(a, assign_addresses(&base, 43));
        assert_eq!(a.links[0].src, a.nodes[0].address);
        assert_eq!(a.links[0].dst, a.nodes[1].address);
        a.validate().unwrap();
    }
}
