#![allow(dead_code)]

use proptest::prelude::*;
use tah_core::Cfg;

/// Directed graph on `0..n` from a row-major adjacency bitmap.
pub fn from_bitmap(n: usize, bits: &[bool], self_loops: bool) -> Cfg {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if bits[u * n + v] && (self_loops || u != v) {
                edges.push((u as u64, v as u64));
            }
        }
    }
    Cfg::new("g", 0..n as u64, edges).unwrap()
}

/// Nonempty graphs with at most `max_nodes` nodes, edges present with
/// probability `p`.
pub fn arb_cfg(max_nodes: usize, p: f64, self_loops: bool) -> impl Strategy<Value = Cfg> {
    (1..=max_nodes).prop_flat_map(move |n| {
        proptest::collection::vec(proptest::bool::weighted(p), n * n)
            .prop_map(move |bits| from_bitmap(n, &bits, self_loops))
    })
}

/// A permutation of `0..n` together with an id offset.
pub fn arb_relabel(max_nodes: usize) -> impl Strategy<Value = (Vec<u64>, u64)> {
    (
        Just((0..max_nodes as u64).collect::<Vec<_>>()).prop_shuffle(),
        0u64..1_000_000,
    )
}
