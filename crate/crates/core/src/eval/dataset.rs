//! Ground-truth datasets: synthetic seed CFGs and all of their single-edit
//! variants, one group per seed.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cfg::{parse_cfg, serialize_cfg, Cfg, Format, NodeId};
use crate::error::{Error, Result};
use crate::features::extract_features;

pub const LABELS_FILE: &str = "labels.csv";

/// Extra edges never raise a node above these degrees, so every node stays
/// inside the 0..=3 bucket range.
const MAX_OUT: u32 = 2;
const MAX_IN: u32 = 3;

/// Random CFG-shaped graph: the spine `0 -> 1 -> ... -> n-1` plus
/// `ceil(n / 2)` random forward or back edges. No self-loops, no duplicate
/// edges. Deterministic per `rng_seed`.
pub fn generate_seed_cfg(rng_seed: u64, node_count: usize) -> Result<Cfg> {
    if node_count < 2 {
        return Err(Error::InvalidArgument(format!(
            "seed CFG needs at least 2 nodes, got {node_count}"
        )));
    }
    let n = node_count;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut edges: HashSet<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    let mut indeg = vec![1u32; n];
    let mut outdeg = vec![1u32; n];
    indeg[0] = 0;
    outdeg[n - 1] = 0;

    let wanted = n.div_ceil(2);
    let mut added = 0;
    let mut attempts = 0;
    let max_attempts = 100 * n * n;
    while added < wanted && attempts < max_attempts {
        attempts += 1;
        let s = rng.gen_range(0..n);
        let d = rng.gen_range(0..n);
        if s == d || edges.contains(&(s, d)) || outdeg[s] >= MAX_OUT || indeg[d] >= MAX_IN {
            continue;
        }
        edges.insert((s, d));
        outdeg[s] += 1;
        indeg[d] += 1;
        added += 1;
    }

    Cfg::new(
        format!("seed-{rng_seed:016x}"),
        0..n as NodeId,
        edges.into_iter().map(|(s, d)| (s as NodeId, d as NodeId)),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EditOp {
    Seed,
    AddNode(NodeId),
    DeleteNode(NodeId),
    AddEdge(NodeId, NodeId),
    DeleteEdge(NodeId, NodeId),
}

impl EditOp {
    /// Short token used in dataset file names.
    pub fn tag(&self) -> &'static str {
        match self {
            EditOp::Seed => "seed",
            EditOp::AddNode(_) => "addnode",
            EditOp::DeleteNode(_) => "delnode",
            EditOp::AddEdge(..) => "addedge",
            EditOp::DeleteEdge(..) => "deledge",
        }
    }
}

impl fmt::Display for EditOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EditOp::Seed => write!(f, "seed"),
            EditOp::AddNode(n) => write!(f, "add node {n}"),
            EditOp::DeleteNode(n) => write!(f, "delete node {n}"),
            EditOp::AddEdge(s, d) => write!(f, "add edge {s} -> {d}"),
            EditOp::DeleteEdge(s, d) => write!(f, "delete edge {s} -> {d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variant {
    pub op: EditOp,
    pub cfg: Cfg,
}

/// The seed followed by every graph one edit away from it, in this order:
/// add a fresh isolated node, delete each isolated node, add each absent
/// non-self-loop edge, delete each edge. Deleting the only node of a
/// one-node graph is skipped since it would leave an empty graph.
pub fn enumerate_variants(seed: &Cfg) -> Vec<Variant> {
    let nodes = seed.nodes();
    let mut out = vec![Variant {
        op: EditOp::Seed,
        cfg: seed.clone(),
    }];

    let fresh = nodes.last().map_or(0, |&m| m + 1);
    out.push(Variant {
        op: EditOp::AddNode(fresh),
        cfg: seed.with_node_added(fresh),
    });

    if seed.node_count() > 1 {
        for v in seed.isolated_nodes() {
            out.push(Variant {
                op: EditOp::DeleteNode(v),
                cfg: seed.with_node_removed(v),
            });
        }
    }

    for &s in nodes {
        for &d in nodes {
            if s != d && !seed.contains_edge(s, d) {
                out.push(Variant {
                    op: EditOp::AddEdge(s, d),
                    cfg: seed.with_edge_added(s, d),
                });
            }
        }
    }

    for &(s, d) in seed.edges() {
        out.push(Variant {
            op: EditOp::DeleteEdge(s, d),
            cfg: seed.with_edge_removed(s, d),
        });
    }
    out
}

/// Drops variants whose feature signature repeats an earlier one.
pub fn dedup_by_signature(variants: Vec<Variant>, n: usize) -> Result<Vec<Variant>> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(variants.len());
    for v in variants {
        if seen.insert(extract_features(&v.cfg, n)?) {
            out.push(v);
        }
    }
    Ok(out)
}

/// One dataset item: the file it lives in, its group and the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledCfg {
    pub file: String,
    pub group: String,
    pub cfg: Cfg,
}

/// Options for [`GroundTruthDataset::generate`].
#[derive(Debug, Clone, Copy)]
pub struct GenerateOptions {
    pub groups: usize,
    pub nodes: usize,
    pub rng_seed: u64,
    /// Gram length for signature deduplication; `None` keeps every variant.
    pub dedup_gram: Option<usize>,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            groups: 5,
            nodes: 20,
            rng_seed: 0,
            dedup_gram: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruthDataset {
    items: Vec<LabeledCfg>,
}

impl GroundTruthDataset {
    pub fn new(items: Vec<LabeledCfg>) -> Result<Self> {
        let mut files = HashSet::new();
        for item in &items {
            if !files.insert(item.file.as_str()) {
                return Err(Error::Dataset(format!("duplicate file {}", item.file)));
            }
        }
        Ok(Self { items })
    }

    pub fn generate(opts: &GenerateOptions) -> Result<Self> {
        if opts.groups == 0 {
            return Err(Error::InvalidArgument("need at least one group".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
        let mut items = Vec::new();
        for g in 0..opts.groups {
            let group = format!("seed{g:02}");
            let seed = generate_seed_cfg(rng.next_u64(), opts.nodes)?;
            let mut variants = enumerate_variants(&seed);
            if let Some(n) = opts.dedup_gram {
                variants = dedup_by_signature(variants, n)?;
            }
            for (i, v) in variants.into_iter().enumerate() {
                let stem = format!("{group}_{}_{i:04}", v.op.tag());
                items.push(LabeledCfg {
                    file: format!("{stem}.json"),
                    group: group.clone(),
                    cfg: v.cfg.with_name(stem),
                });
            }
        }
        Self::new(items)
    }

    pub fn items(&self) -> &[LabeledCfg] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn cfgs(&self) -> Vec<Cfg> {
        self.items.iter().map(|i| i.cfg.clone()).collect()
    }

    /// Group index per item, numbered by first appearance.
    pub fn labels(&self) -> Vec<usize> {
        let mut names: Vec<&str> = Vec::new();
        self.items
            .iter()
            .map(|item| match names.iter().position(|&g| g == item.group) {
                Some(i) => i,
                None => {
                    names.push(&item.group);
                    names.len() - 1
                }
            })
            .collect()
    }

    pub fn group_count(&self) -> usize {
        self.items
            .iter()
            .map(|i| i.group.as_str())
            .collect::<HashSet<_>>()
            .len()
    }

    /// Items at the given positions, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let items = indices
            .iter()
            .map(|&i| {
                self.items
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::InvalidArgument(format!("index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(items)
    }

    /// At most `limit` items spread evenly over the dataset.
    pub fn evenly_spaced(&self, limit: usize) -> Self {
        if limit >= self.items.len() {
            return self.clone();
        }
        let len = self.items.len();
        let items = (0..limit)
            .map(|k| self.items[k * len / limit].clone())
            .collect();
        Self { items }
    }

    /// Writes one JSON file per item plus `labels.csv`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut labels = String::from("file,group\n");
        for item in &self.items {
            fs::write(
                dir.join(&item.file),
                serialize_cfg(&item.cfg, Format::Json) + "\n",
            )?;
            labels.push_str(&format!("{},{}\n", item.file, item.group));
        }
        fs::write(dir.join(LABELS_FILE), labels)?;
        Ok(())
    }

    /// Reads a directory written by [`GroundTruthDataset::write_to`], or any
    /// directory with a `labels.csv` of `file,group` rows.
    pub fn read_from(dir: &Path) -> Result<Self> {
        let labels_path = dir.join(LABELS_FILE);
        let text = fs::read_to_string(&labels_path)
            .map_err(|e| Error::Dataset(format!("cannot read {}: {e}", labels_path.display())))?;
        let mut items = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (idx == 0 && line == "file,group") {
                continue;
            }
            let (file, group) = line.split_once(',').ok_or_else(|| {
                Error::Dataset(format!(
                    "{LABELS_FILE} line {}: expected `file,group`",
                    idx + 1
                ))
            })?;
            let path = dir.join(file);
            let body = fs::read_to_string(&path)
                .map_err(|e| Error::Dataset(format!("cannot read {}: {e}", path.display())))?;
            let cfg = parse_cfg(&body, Format::from_path(&path))
                .map_err(|e| Error::Dataset(format!("{}: {e}", path.display())))?;
            items.push(LabeledCfg {
                file: file.to_string(),
                group: group.to_string(),
                cfg,
            });
        }
        Self::new(items)
    }
}
