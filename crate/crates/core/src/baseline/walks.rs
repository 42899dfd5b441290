//! Literal depth-first walk enumeration, used to cross-check
//! [`extract_features`](crate::features::extract_features) on small graphs.

use std::collections::BTreeMap;

use crate::cfg::{Cfg, NodeId};
use crate::error::{Error, Result};
use crate::features::{abstract_node, decode_key, GraphSignature, MAX_GRAM};

pub const ORACLE_NODE_LIMIT: usize = 12;

pub fn enumerate_walks_oracle(g: &Cfg, n: usize) -> Result<GraphSignature> {
    if g.node_count() > ORACLE_NODE_LIMIT {
        return Err(Error::BudgetExceeded {
            nodes: g.node_count(),
            budget: ORACLE_NODE_LIMIT,
        });
    }
    if !(1..=MAX_GRAM).contains(&n) {
        return Err(Error::InvalidGramLength {
            got: n,
            max: MAX_GRAM,
        });
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut path = Vec::with_capacity(n);
    for &v in g.nodes() {
        path.push(v);
        walk(g, n, &mut path, &mut counts)?;
        path.pop();
    }
    let entries = counts
        .into_iter()
        .map(|(k, c)| decode_key(&k).map(|f| (f, c)))
        .collect::<Result<Vec<_>>>()?;
    GraphSignature::from_counts(n, entries)
}

fn walk(
    g: &Cfg,
    n: usize,
    path: &mut Vec<NodeId>,
    counts: &mut BTreeMap<String, u64>,
) -> Result<()> {
    let key = path
        .iter()
        .map(|&v| g.degrees(v).map(|d| abstract_node(d).to_string()))
        .collect::<Result<Vec<_>>>()?
        .join("|");
    *counts.entry(key).or_default() += 1;
    if path.len() == n {
        return Ok(());
    }
    let last = *path.last().expect("walk is nonempty");
    for &(src, dst) in g.edges() {
        if src == last {
            path.push(dst);
            walk(g, n, path, counts)?;
            path.pop();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::extract_features;
    use crate::testutil::sample_cfg;

    #[test]
    fn agrees_on_fixtures() {
        let g = sample_cfg();
        let sig = enumerate_walks_oracle(&g, 5).unwrap();
        assert_eq!(sig, extract_features(&g, 5).unwrap());
        assert_eq!(sig.total(), 20);

        let one = Cfg::new("one", [0], []).unwrap();
        assert_eq!(
            enumerate_walks_oracle(&one, 4).unwrap().to_text(),
            "00\t1\nTOTAL\t1\n"
        );

        let cycle = Cfg::from_edges("c", [(0, 1), (1, 0)]).unwrap();
        let sig = enumerate_walks_oracle(&cycle, 3).unwrap();
        assert_eq!(sig.total(), 6);
        assert_eq!(sig.len(), 3);
    }

    #[test]
    fn size_guard() {
        let big = Cfg::new("big", 0..13, []).unwrap();
        assert!(matches!(
            enumerate_walks_oracle(&big, 2),
            Err(Error::BudgetExceeded {
                nodes: 13,
                budget: 12
            })
        ));
    }
}
