//! Control flow graph model, validation and the two text formats.
//!
//! A [`Cfg`] is an unlabeled directed graph. Node identifiers are opaque
//! non-negative integers; everything downstream is invariant to relabeling.
//! Nodes and edges are kept sorted, so two graphs built from the same sets
//! compare equal regardless of input order.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = u64;

/// Incoming and outgoing edge counts of one node. A self-loop adds one to each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DegreePair {
    pub indegree: u32,
    pub outdegree: u32,
}

impl DegreePair {
    pub fn new(indegree: u32, outdegree: u32) -> Self {
        Self {
            indegree,
            outdegree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cfg {
    name: String,
    nodes: Vec<NodeId>,
    edges: Vec<(NodeId, NodeId)>,
}

impl Cfg {
    /// Builds a validated graph. Duplicate nodes, duplicate edges and edges
    /// with an endpoint outside `nodes` are rejected.
    pub fn new(
        name: impl Into<String>,
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self> {
        let mut node_set = BTreeSet::new();
        for (i, n) in nodes.into_iter().enumerate() {
            if !node_set.insert(n) {
                return Err(Error::Semantic {
                    location: format!("nodes[{i}]"),
                    message: format!("duplicate node {n}"),
                });
            }
        }
        let mut edge_set = BTreeSet::new();
        for (i, (s, d)) in edges.into_iter().enumerate() {
            for endpoint in [s, d] {
                if !node_set.contains(&endpoint) {
                    return Err(Error::Semantic {
                        location: format!("edges[{i}]"),
                        message: format!("unknown node {endpoint}"),
                    });
                }
            }
            if !edge_set.insert((s, d)) {
                return Err(Error::Semantic {
                    location: format!("edges[{i}]"),
                    message: format!("duplicate edge {s} -> {d}"),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            nodes: node_set.into_iter().collect(),
            edges: edge_set.into_iter().collect(),
        })
    }

    /// Graph whose node set is exactly the edge endpoints.
    pub fn from_edges(
        name: impl Into<String>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self> {
        let edges: Vec<_> = edges.into_iter().collect();
        let nodes: BTreeSet<NodeId> = edges.iter().flat_map(|&(s, d)| [s, d]).collect();
        Self::new(name, nodes, edges)
    }

    pub fn empty(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            nodes: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Node ids in ascending order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Edges in ascending `(src, dst)` order.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Position of `node` in [`Cfg::nodes`].
    pub fn index_of(&self, node: NodeId) -> Option<usize> {
        self.nodes.binary_search(&node).ok()
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.index_of(node).is_some()
    }

    pub fn contains_edge(&self, src: NodeId, dst: NodeId) -> bool {
        self.edges.binary_search(&(src, dst)).is_ok()
    }

    pub fn degrees(&self, node: NodeId) -> Result<DegreePair> {
        if !self.contains_node(node) {
            return Err(Error::UnknownNode(node));
        }
        let mut d = DegreePair::default();
        for &(s, t) in &self.edges {
            if s == node {
                d.outdegree += 1;
            }
            if t == node {
                d.indegree += 1;
            }
        }
        Ok(d)
    }

    /// Degrees of every node, aligned with [`Cfg::nodes`].
    pub fn degree_table(&self) -> Vec<DegreePair> {
        let mut table = vec![DegreePair::default(); self.nodes.len()];
        for &(s, t) in &self.edges {
            table[self.index_of(s).expect("validated edge")].outdegree += 1;
            table[self.index_of(t).expect("validated edge")].indegree += 1;
        }
        table
    }

    /// Successor lists by node position, each sorted ascending.
    pub fn successor_lists(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.nodes.len()];
        for &(s, t) in &self.edges {
            let si = self.index_of(s).expect("validated edge");
            let ti = self.index_of(t).expect("validated edge");
            succ[si].push(ti);
        }
        succ
    }

    /// Nodes with no incident edge, ascending.
    pub fn isolated_nodes(&self) -> Vec<NodeId> {
        let touched: BTreeSet<NodeId> = self.edges.iter().flat_map(|&(s, d)| [s, d]).collect();
        self.nodes
            .iter()
            .copied()
            .filter(|n| !touched.contains(n))
            .collect()
    }

    /// Renames every node through `map`, which must be injective on the node set.
    pub fn relabel(&self, mut map: impl FnMut(NodeId) -> NodeId) -> Result<Self> {
        let nodes: Vec<_> = self.nodes.iter().map(|&n| map(n)).collect();
        let lookup = |n: NodeId| nodes[self.index_of(n).expect("own node")];
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(s, d)| (lookup(s), lookup(d)))
            .collect();
        Self::new(self.name.clone(), nodes.clone(), edges)
    }

    pub(crate) fn with_node_added(&self, node: NodeId) -> Self {
        let mut g = self.clone();
        if let Err(pos) = g.nodes.binary_search(&node) {
            g.nodes.insert(pos, node);
        }
        g
    }

    pub(crate) fn with_node_removed(&self, node: NodeId) -> Self {
        let mut g = self.clone();
        g.nodes.retain(|&n| n != node);
        g.edges.retain(|&(s, d)| s != node && d != node);
        g
    }

    pub(crate) fn with_edge_added(&self, src: NodeId, dst: NodeId) -> Self {
        debug_assert!(self.contains_node(src) && self.contains_node(dst));
        let mut g = self.clone();
        if let Err(pos) = g.edges.binary_search(&(src, dst)) {
            g.edges.insert(pos, (src, dst));
        }
        g
    }

    pub(crate) fn with_edge_removed(&self, src: NodeId, dst: NodeId) -> Self {
        let mut g = self.clone();
        g.edges.retain(|&e| e != (src, dst));
        g
    }
}

/// On-disk CFG encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Json,
    EdgeList,
}

impl Format {
    /// `.json` selects JSON; anything else is read as an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::EdgeList,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "edgelist" | "edges" => Ok(Format::EdgeList),
            other => Err(Error::InvalidArgument(format!(
                "unknown CFG format `{other}`"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::EdgeList => "edgelist",
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CfgDocument {
    name: String,
    nodes: Vec<NodeId>,
    edges: Vec<[NodeId; 2]>,
}

pub fn parse_cfg(text: &str, format: Format) -> Result<Cfg> {
    match format {
        Format::Json => parse_json(text),
        Format::EdgeList => parse_edge_list(text),
    }
}

pub fn serialize_cfg(g: &Cfg, format: Format) -> String {
    match format {
        Format::Json => {
            let doc = CfgDocument {
                name: g.name.clone(),
                nodes: g.nodes.clone(),
                edges: g.edges.iter().map(|&(s, d)| [s, d]).collect(),
            };
            serde_json::to_string(&doc).expect("CFG document serializes")
        }
        Format::EdgeList => {
            let mut out = String::new();
            out.push_str("name ");
            out.push_str(&serde_json::to_string(&g.name).expect("string serializes"));
            out.push('\n');
            for n in g.isolated_nodes() {
                out.push_str(&format!("node {n}\n"));
            }
            for &(s, d) in &g.edges {
                out.push_str(&format!("{s} {d}\n"));
            }
            out
        }
    }
}

fn parse_json(text: &str) -> Result<Cfg> {
    let doc: CfgDocument = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Cfg::new(
        doc.name,
        doc.nodes,
        doc.edges.into_iter().map(|[s, d]| (s, d)),
    )
}

/// Edge-list grammar, one statement per line, `#` starts a comment:
///
/// ```text
/// name "label"      optional, JSON string literal
/// node <id>         declares a node (needed only for isolated ones)
/// <src> <dst>       directed edge
/// ```
fn parse_edge_list(text: &str) -> Result<Cfg> {
    let mut name: Option<String> = None;
    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content_start = raw.len() - raw.trim_start().len();
        let trimmed = raw.trim_start();

        if let Some(rest) = trimmed.strip_prefix("name") {
            if rest.starts_with(char::is_whitespace) {
                if name.is_some() {
                    return Err(Error::Semantic {
                        location: format!("line {line_no}"),
                        message: "duplicate name statement".into(),
                    });
                }
                let offset = content_start + 4;
                name = Some(parse_name_literal(rest, line_no, offset)?);
                continue;
            }
        }

        let body = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<(usize, &str)> = tokenize(body);
        match tokens.as_slice() {
            [] => {}
            [(_, "node"), (col, id)] => {
                let id = parse_id(id, line_no, *col)?;
                if !nodes.insert(id) {
                    return Err(Error::Semantic {
                        location: format!("line {line_no}"),
                        message: format!("duplicate node {id}"),
                    });
                }
            }
            [(sc, src), (dc, dst)] => {
                let s = parse_id(src, line_no, *sc)?;
                let d = parse_id(dst, line_no, *dc)?;
                if !edges.insert((s, d)) {
                    return Err(Error::Semantic {
                        location: format!("line {line_no}"),
                        message: format!("duplicate edge {s} -> {d}"),
                    });
                }
            }
            [(col, _), ..] => {
                return Err(Error::Syntax {
                    line: line_no,
                    column: *col,
                    message: "expected `<src> <dst>`, `node <id>` or `name \"...\"`".into(),
                });
            }
        }
    }

    let all_nodes: BTreeSet<NodeId> = nodes
        .into_iter()
        .chain(edges.iter().flat_map(|&(s, d)| [s, d]))
        .collect();
    Cfg::new(name.unwrap_or_default(), all_nodes, edges)
}

/// Splits on whitespace, keeping the 1-based column of each token.
fn tokenize(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(b)) => {
                out.push((b + 1, &s[b..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(b) = start {
        out.push((b + 1, &s[b..]));
    }
    out
}

fn parse_id(token: &str, line: usize, column: usize) -> Result<NodeId> {
    token.parse::<NodeId>().map_err(|_| Error::Syntax {
        line,
        column,
        message: format!("`{token}` is not a non-negative integer node id"),
    })
}

fn parse_name_literal(rest: &str, line: usize, offset: usize) -> Result<String> {
    let lead = rest.len() - rest.trim_start().len();
    let literal = rest.trim_start();
    let column = offset + lead + 1;
    let mut stream = serde_json::Deserializer::from_str(literal).into_iter::<String>();
    let name = match stream.next() {
        Some(Ok(name)) => name,
        Some(Err(e)) => {
            return Err(Error::Syntax {
                line,
                column: column + e.column().saturating_sub(1),
                message: format!("bad name literal: {e}"),
            })
        }
        None => {
            return Err(Error::Syntax {
                line,
                column,
                message: "missing name literal".into(),
            })
        }
    };
    let tail = literal[stream.byte_offset()..].trim_start();
    if !(tail.is_empty() || tail.starts_with('#')) {
        return Err(Error::Syntax {
            line,
            column: column + literal.len() - tail.len(),
            message: "trailing characters after name".into(),
        });
    }
    Ok(name)
}
