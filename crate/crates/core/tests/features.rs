mod common;

use std::collections::{BTreeMap, HashSet};

use common::{arb_cfg, arb_relabel};
use proptest::prelude::*;
use tah_core::baseline::enumerate_walks_oracle;
use tah_core::{
    extract_features, feature_space_size, is_valid_feature, parse_cfg, serialize_cfg, Cfg, Format,
    NGramFeature, NodeType,
};

fn brute_force_space(n: usize) -> u128 {
    fn rec(prefix: &mut Vec<NodeType>, n: usize, count: &mut u128) {
        if !prefix.is_empty() && is_valid_feature(prefix) {
            *count += 1;
        }
        if prefix.len() == n {
            return;
        }
        for t in NodeType::all() {
            prefix.push(t);
            rec(prefix, n, count);
            prefix.pop();
        }
    }
    let mut count = 0;
    rec(&mut Vec::new(), n, &mut count);
    count
}

#[test]
fn feature_space_matches_enumeration() {
    assert_eq!(brute_force_space(1), 16);
    assert_eq!(brute_force_space(2), 160);
    assert_eq!(brute_force_space(3), 1456);
    for n in 1..=4 {
        assert_eq!(feature_space_size(n), brute_force_space(n), "n={n}");
    }
    assert_eq!(feature_space_size(5), 118_096);
}

/// Walk count by adjacency powers: sum over lengths of `1' A^(k-1) 1`.
fn walk_total(g: &Cfg, n: usize) -> u64 {
    let succ = g.successor_lists();
    let mut ending = vec![1u64; g.node_count()];
    let mut total: u64 = ending.iter().sum();
    for _ in 1..n {
        let mut next = vec![0u64; ending.len()];
        for (u, s) in succ.iter().enumerate() {
            for &v in s {
                next[v] += ending[u];
            }
        }
        ending = next;
        total += ending.iter().sum::<u64>();
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn extraction_matches_oracle(g in arb_cfg(8, 0.25, true), n in 1usize..=5) {
        let fast = extract_features(&g, n).unwrap();
        let slow = enumerate_walks_oracle(&g, n).unwrap();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn total_counts_every_walk(g in arb_cfg(10, 0.3, true), n in 1usize..=6) {
        let sig = extract_features(&g, n).unwrap();
        prop_assert_eq!(sig.total() as u64, walk_total(&g, n));
        let sum: u64 = sig.entries().iter().map(|&(_, c)| c as u64).sum();
        prop_assert_eq!(sum, sig.total() as u64);
    }

    #[test]
    fn features_are_valid_and_bounded(g in arb_cfg(10, 0.3, true), n in 1usize..=7) {
        let sig = extract_features(&g, n).unwrap();
        for &(f, c) in sig.entries() {
            prop_assert!(f.is_valid());
            prop_assert!(!f.is_empty() && f.len() <= n);
            prop_assert!(c > 0);
        }
    }

    #[test]
    fn relabeling_preserves_signature(g in arb_cfg(9, 0.3, true), (perm, offset) in arb_relabel(9)) {
        let h = g.relabel(|id| perm[id as usize] * 7 + offset).unwrap();
        prop_assert_eq!(extract_features(&g, 5).unwrap(), extract_features(&h, 5).unwrap());
    }

    #[test]
    fn edge_order_does_not_matter(g in arb_cfg(9, 0.3, false), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut edges = g.edges().to_vec();
        let mut nodes = g.nodes().to_vec();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        edges.shuffle(&mut rng);
        nodes.shuffle(&mut rng);
        let h = Cfg::new("h", nodes, edges).unwrap();
        prop_assert_eq!(extract_features(&g, 5).unwrap(), extract_features(&h, 5).unwrap());
    }

    #[test]
    fn cfg_text_round_trip(g in arb_cfg(12, 0.2, true), name in "[a-z \"\\\\]{0,12}") {
        let g = g.with_name(name);
        for format in [Format::Json, Format::EdgeList] {
            let text = serialize_cfg(&g, format);
            prop_assert_eq!(&parse_cfg(&text, format).unwrap(), &g);
        }
    }

    #[test]
    fn packed_order_is_key_order(a in proptest::collection::vec(0u8..16, 1..=15),
                                 b in proptest::collection::vec(0u8..16, 1..=15)) {
        let types = |v: &[u8]| v.iter().map(|&c| NodeType::from_code(c).unwrap()).collect::<Vec<_>>();
        let fa = NGramFeature::new(&types(&a));
        let fb = NGramFeature::new(&types(&b));
        if let (Ok(fa), Ok(fb)) = (fa, fb) {
            prop_assert_eq!(fa.cmp(&fb), fa.key().cmp(&fb.key()));
            prop_assert_eq!(NGramFeature::from_key(&fa.key()).unwrap(), fa);
        }
    }
}

#[test]
fn distinct_walk_sequences_become_distinct_features() {
    // 0 -> 1 -> 2 -> 0 plus a chord 0 -> 2: node types differ, so every
    // walk prefix is counted under its own key.
    let g = Cfg::from_edges("tri", [(0, 1), (1, 2), (2, 0), (0, 2)]).unwrap();
    let sig = extract_features(&g, 3).unwrap();
    let mut by_len: BTreeMap<usize, u32> = BTreeMap::new();
    for &(f, c) in sig.entries() {
        *by_len.entry(f.len()).or_default() += c;
    }
    assert_eq!(by_len, BTreeMap::from([(1, 3), (2, 4), (3, 5)]));
    let keys: HashSet<String> = sig.entries().iter().map(|(f, _)| f.key()).collect();
    assert_eq!(keys.len(), sig.len());
}
