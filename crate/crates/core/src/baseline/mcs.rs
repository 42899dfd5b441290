//! Maximum common induced subgraph by backtracking search.
//!
//! McGregor-style branch and bound: vertices of the first graph are matched
//! one at a time to compatible vertices of the second graph, or left
//! unmatched. Unmatched candidates are kept in label classes (McSplit): two
//! vertices stay in the same class only if they relate identically (no edge,
//! out-edge, in-edge, both) to every vertex matched so far. Any pair drawn
//! from one class extends the mapping while preserving adjacency and
//! non-adjacency in both directions, and `sum(min(|L|, |R|))` over the
//! classes bounds how much the mapping can still grow.
//!
//! The common subgraph is induced and need not be connected.

use crate::cfg::{Cfg, NodeId};
use crate::error::{Error, Result};
use crate::similarity::SimilarityScore;

pub const DEFAULT_NODE_BUDGET: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McsResult {
    /// Number of matched node pairs.
    pub size: usize,
    /// Matched `(node of a, node of b)` pairs, ascending by the first node.
    pub mapping: Vec<(NodeId, NodeId)>,
}

/// Largest accepted node budget; vertex sets are single-word bitmasks.
pub const MAX_NODE_BUDGET: usize = 64;

type Mask = u64;

fn bits(m: Mask) -> impl Iterator<Item = usize> {
    let mut m = m;
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

/// Per vertex `u` and relation label, the set of vertices `x` related to
/// `u` by that label: bit 0 of the label for `u -> x`, bit 1 for `x -> u`.
struct Relations {
    by_label: Vec<[Mask; 4]>,
    self_loops: Mask,
    degree: Vec<u32>,
}

impl Relations {
    fn new(g: &Cfg) -> Self {
        let n = g.node_count();
        let mut rel = vec![0u8; n * n];
        let mut self_loops = 0;
        for (u, succ) in g.successor_lists().into_iter().enumerate() {
            for v in succ {
                if u == v {
                    self_loops |= 1 << u;
                } else {
                    rel[u * n + v] |= 1;
                    rel[v * n + u] |= 2;
                }
            }
        }
        let mut by_label: Vec<[Mask; 4]> = vec![[0; 4]; n];
        let mut degree = vec![0; n];
        for u in 0..n {
            for x in (0..n).filter(|&x| x != u) {
                by_label[u][rel[u * n + x] as usize] |= 1 << x;
            }
            degree[u] = (by_label[u][1] | by_label[u][2] | by_label[u][3]).count_ones();
        }
        Self {
            by_label,
            self_loops,
            degree,
        }
    }

    fn all(&self) -> Mask {
        match self.by_label.len() {
            64 => Mask::MAX,
            n => (1 << n) - 1,
        }
    }
}

/// Unmatched vertices of both graphs that relate identically to every
/// matched pair so far.
#[derive(Clone, Copy)]
struct LabelClass {
    left: Mask,
    right: Mask,
}

impl LabelClass {
    fn bound(&self) -> usize {
        self.left.count_ones().min(self.right.count_ones()) as usize
    }
}

struct Search<'a> {
    a: &'a Relations,
    b: &'a Relations,
    current: Vec<(usize, usize)>,
    best: Vec<(usize, usize)>,
    ceiling: usize,
}

impl Search<'_> {
    fn run(&mut self, classes: Vec<LabelClass>) {
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
        }
        if self.best.len() == self.ceiling {
            return;
        }
        let bound: usize =
            self.current.len() + classes.iter().map(LabelClass::bound).sum::<usize>();
        if bound <= self.best.len() {
            return;
        }

        // Smallest class first, then its highest-degree vertex; candidates
        // are tried in descending degree. Ties go to the lowest index.
        let pick = classes
            .iter()
            .enumerate()
            .min_by_key(|(_, c)| c.left.count_ones().max(c.right.count_ones()))
            .map(|(i, _)| i)
            .expect("bound > best implies a class exists");
        let v = bits(classes[pick].left)
            .max_by_key(|&x| (self.a.degree[x], std::cmp::Reverse(x)))
            .expect("classes are nonempty");
        let mut candidates: Vec<usize> = bits(classes[pick].right).collect();
        candidates.sort_by_key(|&y| (std::cmp::Reverse(self.b.degree[y]), y));

        for w in candidates {
            let refined = self.refine(&classes, v, w);
            self.current.push((v, w));
            self.run(refined);
            self.current.pop();
            if self.best.len() == self.ceiling {
                return;
            }
        }

        let mut rest = classes;
        rest[pick].left &= !(1 << v);
        if rest[pick].left == 0 {
            rest.remove(pick);
        }
        self.run(rest);
    }

    fn refine(&self, classes: &[LabelClass], v: usize, w: usize) -> Vec<LabelClass> {
        let (av, bw) = (&self.a.by_label[v], &self.b.by_label[w]);
        let mut out = Vec::with_capacity(classes.len() * 2);
        for class in classes {
            for label in 0..4 {
                let left = class.left & av[label];
                let right = class.right & bw[label];
                if left != 0 && right != 0 {
                    out.push(LabelClass { left, right });
                }
            }
        }
        out
    }
}

fn check_budget(g: &Cfg, budget: usize) -> Result<()> {
    if budget > MAX_NODE_BUDGET {
        return Err(Error::InvalidArgument(format!(
            "node budget {budget} exceeds the maximum of {MAX_NODE_BUDGET}"
        )));
    }
    if g.node_count() > budget {
        Err(Error::BudgetExceeded {
            nodes: g.node_count(),
            budget,
        })
    } else {
        Ok(())
    }
}

/// Largest common induced subgraph of `a` and `b` under a directed,
/// adjacency-preserving injective mapping. Both graphs must have at most
/// `node_budget` nodes. Vertices are tried in ascending id order, so the
/// returned mapping is deterministic.
pub fn mcs_size(a: &Cfg, b: &Cfg, node_budget: usize) -> Result<McsResult> {
    check_budget(a, node_budget)?;
    check_budget(b, node_budget)?;
    let ra = Relations::new(a);
    let rb = Relations::new(b);

    let mut classes = Vec::new();
    for (left, right) in [
        (ra.all() & !ra.self_loops, rb.all() & !rb.self_loops),
        (ra.self_loops, rb.self_loops),
    ] {
        if left != 0 && right != 0 {
            classes.push(LabelClass { left, right });
        }
    }

    let mut search = Search {
        a: &ra,
        b: &rb,
        current: Vec::new(),
        best: Vec::new(),
        ceiling: a.node_count().min(b.node_count()),
    };
    search.run(classes);

    let mut mapping: Vec<(NodeId, NodeId)> = search
        .best
        .iter()
        .map(|&(u, v)| (a.nodes()[u], b.nodes()[v]))
        .collect();
    mapping.sort_unstable();
    Ok(McsResult {
        size: mapping.len(),
        mapping,
    })
}

/// Common subgraph size over the larger node count.
pub fn mcs_similarity(a: &Cfg, b: &Cfg, node_budget: usize) -> Result<SimilarityScore> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let r = mcs_size(a, b, node_budget)?;
    Ok(SimilarityScore::new(
        r.size as f64 / a.node_count().max(b.node_count()) as f64,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::sample_cfg;

    fn path(len: u64) -> Cfg {
        Cfg::new("p", 0..len, (1..len).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn identical_graphs_match_fully() {
        let g = sample_cfg();
        let r = mcs_size(&g, &g, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(r.size, 5);
        assert_eq!(
            mcs_similarity(&g, &g, DEFAULT_NODE_BUDGET).unwrap().value(),
            1.0
        );
    }

    #[test]
    fn paths() {
        let r = mcs_size(&path(2), &path(3), DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(r.size, 2);
        let s = mcs_similarity(&path(2), &path(3), DEFAULT_NODE_BUDGET).unwrap();
        assert!((s.value() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_graph() {
        let r = mcs_size(&sample_cfg(), &Cfg::empty("e"), DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(r.size, 0);
        assert!(r.mapping.is_empty());
        assert!(matches!(
            mcs_similarity(&sample_cfg(), &Cfg::empty("e"), DEFAULT_NODE_BUDGET),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn no_common_edge_structure() {
        // Every node pair of the 3-cycle has exactly one edge; the pairs of
        // `a` have either a 2-cycle or nothing.
        let a = Cfg::new("a", [0, 1, 2], [(0, 1), (1, 0)]).unwrap();
        let b = Cfg::new("b", [0, 1, 2], [(0, 1), (1, 2), (2, 0)]).unwrap();
        let r = mcs_size(&a, &b, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(r.size, 1);
        let s = mcs_similarity(&a, &b, DEFAULT_NODE_BUDGET).unwrap();
        assert!((s.value() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn self_loops_must_agree() {
        let a = Cfg::new("a", [0], [(0, 0)]).unwrap();
        let b = Cfg::new("b", [0], []).unwrap();
        assert_eq!(mcs_size(&a, &b, 4).unwrap().size, 0);
        assert_eq!(mcs_size(&a, &a, 4).unwrap().size, 1);
    }

    #[test]
    fn budget_guard() {
        let big = path(25);
        assert!(matches!(
            mcs_size(&big, &sample_cfg(), DEFAULT_NODE_BUDGET),
            Err(Error::BudgetExceeded {
                nodes: 25,
                budget: 24
            })
        ));
        assert!(mcs_size(&big, &sample_cfg(), 25).is_ok());
        assert!(matches!(
            mcs_size(&sample_cfg(), &sample_cfg(), MAX_NODE_BUDGET + 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn mapping_preserves_adjacency() {
        let a = sample_cfg();
        let b = path(4);
        let r = mcs_size(&a, &b, DEFAULT_NODE_BUDGET).unwrap();
        for &(u1, v1) in &r.mapping {
            for &(u2, v2) in &r.mapping {
                assert_eq!(a.contains_edge(u1, u2), b.contains_edge(v1, v2));
            }
        }
        assert_eq!(r.size, r.mapping.len());
        // 0 -> 2 -> 3 -> 4 is a chordless path in sample_cfg
        assert_eq!(r.size, 4);
    }
}
