mod common;

use common::{arb_cfg, from_bitmap};
use proptest::prelude::*;
use tah_core::baseline::{mcs_size, DEFAULT_NODE_BUDGET};
use tah_core::Cfg;

type Compatible<'a> = &'a dyn Fn(&[Option<usize>], usize, usize) -> bool;

/// Tries every injective partial map from `a` into `b`.
fn exhaustive_mcs(a: &Cfg, b: &Cfg) -> usize {
    let (na, nb) = (a.node_count(), b.node_count());
    let edge = |g: &Cfg, u: usize, v: usize| g.contains_edge(g.nodes()[u], g.nodes()[v]);
    fn rec(
        u: usize,
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        ok: Compatible,
        nb: usize,
        best: &mut usize,
    ) {
        if u == map.len() {
            *best = (*best).max(map.iter().flatten().count());
            return;
        }
        rec(u + 1, map, used, ok, nb, best);
        for w in 0..nb {
            if !used[w] && ok(map, u, w) {
                used[w] = true;
                map[u] = Some(w);
                rec(u + 1, map, used, ok, nb, best);
                map[u] = None;
                used[w] = false;
            }
        }
    }
    let ok = |map: &[Option<usize>], u: usize, w: usize| {
        if edge(a, u, u) != edge(b, w, w) {
            return false;
        }
        map.iter().enumerate().all(|(x, m)| match m {
            None => true,
            Some(y) => edge(a, u, x) == edge(b, w, *y) && edge(a, x, u) == edge(b, *y, w),
        })
    };
    let mut best = 0;
    rec(
        0,
        &mut vec![None; na],
        &mut vec![false; nb],
        &ok,
        nb,
        &mut best,
    );
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_exhaustive_search(a in arb_cfg(5, 0.35, true), b in arb_cfg(5, 0.35, true)) {
        let r = mcs_size(&a, &b, DEFAULT_NODE_BUDGET).unwrap();
        prop_assert_eq!(r.size, exhaustive_mcs(&a, &b));
    }

    #[test]
    fn symmetric_and_bounded(a in arb_cfg(9, 0.3, true), b in arb_cfg(9, 0.3, true)) {
        let ab = mcs_size(&a, &b, DEFAULT_NODE_BUDGET).unwrap();
        let ba = mcs_size(&b, &a, DEFAULT_NODE_BUDGET).unwrap();
        prop_assert_eq!(ab.size, ba.size);
        prop_assert!(ab.size <= a.node_count().min(b.node_count()));
    }

    #[test]
    fn mapping_is_an_induced_isomorphism(a in arb_cfg(9, 0.3, true), b in arb_cfg(9, 0.3, true)) {
        let r = mcs_size(&a, &b, DEFAULT_NODE_BUDGET).unwrap();
        prop_assert_eq!(r.mapping.len(), r.size);
        let mut seen = std::collections::HashSet::new();
        for &(_, v) in &r.mapping {
            prop_assert!(seen.insert(v));
        }
        for &(u1, v1) in &r.mapping {
            for &(u2, v2) in &r.mapping {
                prop_assert_eq!(a.contains_edge(u1, u2), b.contains_edge(v1, v2));
            }
        }
    }

    #[test]
    fn induced_subgraph_is_fully_matched(
        n in 2usize..=10,
        bits in proptest::collection::vec(proptest::bool::weighted(0.3), 100),
        keep in proptest::collection::vec(any::<bool>(), 10),
    ) {
        let g = from_bitmap(n, &bits[..n * n], true);
        let kept: Vec<u64> = (0..n as u64).filter(|&i| keep[i as usize]).collect();
        prop_assume!(!kept.is_empty());
        let edges = g.edges().iter().copied().filter(|(s, d)| kept.contains(s) && kept.contains(d));
        let h = Cfg::new("h", kept.clone(), edges).unwrap();
        prop_assert_eq!(mcs_size(&g, &h, DEFAULT_NODE_BUDGET).unwrap().size, kept.len());
    }
}
