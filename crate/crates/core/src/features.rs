//! Node type abstraction and blended n-gram feature extraction.
//!
//! Each node is reduced to a [`NodeType`]: its in- and out-degree clamped to
//! `0..=3`, giving 16 types. A feature is the type sequence along a directed
//! walk of 1 to `n` nodes. Walks may revisit nodes; the length bound keeps
//! extraction finite on cyclic graphs. Every walk from every node is counted
//! once, and the counts form a sparse [`GraphSignature`].

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::cfg::{Cfg, DegreePair};
use crate::error::{Error, Result};

/// Degrees at or above this value share one bucket.
pub const BUCKET_CAP: u8 = 3;
pub const DEFAULT_GRAM: usize = 5;
/// Longest feature a packed [`NGramFeature`] can hold.
pub const MAX_GRAM: usize = 15;

/// Basic block type: clamped (indegree, outdegree).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeType {
    in_bucket: u8,
    out_bucket: u8,
}

impl NodeType {
    pub fn new(in_bucket: u8, out_bucket: u8) -> Option<Self> {
        (in_bucket <= BUCKET_CAP && out_bucket <= BUCKET_CAP).then_some(Self {
            in_bucket,
            out_bucket,
        })
    }

    pub fn in_bucket(self) -> u8 {
        self.in_bucket
    }

    pub fn out_bucket(self) -> u8 {
        self.out_bucket
    }

    /// `4 * in + out`, in `0..16`.
    pub fn code(self) -> u8 {
        self.in_bucket * 4 + self.out_bucket
    }

    pub fn from_code(code: u8) -> Option<Self> {
        (code < 16).then_some(Self {
            in_bucket: code / 4,
            out_bucket: code % 4,
        })
    }

    /// All 16 types in code order.
    pub fn all() -> impl Iterator<Item = NodeType> {
        (0..16).map(|c| Self::from_code(c).expect("code in range"))
    }
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.in_bucket, self.out_bucket)
    }
}

pub fn abstract_node(d: DegreePair) -> NodeType {
    let clamp = |v: u32| v.min(BUCKET_CAP as u32) as u8;
    NodeType {
        in_bucket: clamp(d.indegree),
        out_bucket: clamp(d.outdegree),
    }
}

/// Sequence of 1 to [`MAX_GRAM`] node types, packed into a `u64`.
///
/// Type `i` occupies the nibble at bit `60 - 4i` and the length sits in the
/// low nibble, so the integer order equals lexicographic order of the type
/// sequence, which in turn equals the order of the canonical text keys.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NGramFeature(u64);

impl NGramFeature {
    pub fn new(types: &[NodeType]) -> Result<Self> {
        if types.is_empty() || types.len() > MAX_GRAM {
            return Err(Error::InvalidGramLength {
                got: types.len(),
                max: MAX_GRAM,
            });
        }
        let mut f = Self::single(types[0]);
        for &t in &types[1..] {
            f = f.extended(t);
        }
        Ok(f)
    }

    pub fn single(t: NodeType) -> Self {
        Self(((t.code() as u64) << 60) | 1)
    }

    /// Appends one type. Panics when the feature is already [`MAX_GRAM`] long.
    pub fn extended(self, t: NodeType) -> Self {
        let len = self.len();
        assert!(len < MAX_GRAM, "feature already at maximum length");
        let shift = 60 - 4 * len;
        Self(((self.0 & !0xF) | ((t.code() as u64) << shift)) | (len as u64 + 1))
    }

    pub fn len(self) -> usize {
        (self.0 & 0xF) as usize
    }

    /// Never true; a feature holds at least one type.
    pub fn is_empty(self) -> bool {
        false
    }

    pub fn get(self, i: usize) -> Option<NodeType> {
        (i < self.len()).then(|| {
            let code = ((self.0 >> (60 - 4 * i)) & 0xF) as u8;
            NodeType::from_code(code).expect("nibble is a type code")
        })
    }

    pub fn types(self) -> impl Iterator<Item = NodeType> {
        (0..self.len()).map(move |i| self.get(i).expect("index in range"))
    }

    pub fn is_valid(self) -> bool {
        let types: Vec<_> = self.types().collect();
        is_valid_feature(&types)
    }

    /// Canonical text key, e.g. `02|12|21`.
    pub fn key(self) -> String {
        let mut s = String::with_capacity(self.len() * 3);
        for (i, t) in self.types().enumerate() {
            if i > 0 {
                s.push('|');
            }
            s.push((b'0' + t.in_bucket) as char);
            s.push((b'0' + t.out_bucket) as char);
        }
        s
    }

    /// Inverse of [`NGramFeature::key`].
    pub fn from_key(key: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("malformed feature key `{key}`"));
        let types = key
            .split('|')
            .map(|part| match part.as_bytes() {
                [i @ b'0'..=b'3', o @ b'0'..=b'3'] => Ok(NodeType {
                    in_bucket: i - b'0',
                    out_bucket: o - b'0',
                }),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&types).map_err(|_| bad())
    }
}

impl fmt::Debug for NGramFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NGramFeature({})", self.key())
    }
}

impl fmt::Display for NGramFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

impl FromStr for NGramFeature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_key(s)
    }
}

pub fn canonical_key(f: NGramFeature) -> String {
    f.key()
}

pub fn decode_key(key: &str) -> Result<NGramFeature> {
    NGramFeature::from_key(key)
}

/// For sequences of two or more types, a zero-indegree type may only lead
/// and a zero-outdegree type may only trail.
pub fn is_valid_feature(types: &[NodeType]) -> bool {
    match types.len() {
        0 => false,
        1 => true,
        len => types
            .iter()
            .enumerate()
            .all(|(i, t)| (t.in_bucket != 0 || i == 0) && (t.out_bucket != 0 || i == len - 1)),
    }
}

/// Number of valid features of length `1..=n`.
///
/// Any of the 16 types forms a 1-gram. Longer grams start with one of the 12
/// types that have successors, pass through 9 interior types and end in one of
/// the 12 types that have predecessors.
pub fn feature_space_size(n: usize) -> u128 {
    let mut total: u128 = if n >= 1 { 16 } else { 0 };
    let mut interior: u128 = 1;
    for _ in 2..=n {
        total += 12 * interior * 12;
        interior *= 9;
    }
    total
}

/// Sparse count vector over n-gram features plus the total count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphSignature {
    n: usize,
    entries: Vec<(NGramFeature, u32)>,
    total: u32,
}

impl GraphSignature {
    /// Aggregates `(feature, count)` pairs. Features must be valid and no
    /// longer than `n`; zero counts are dropped.
    pub fn from_counts(
        n: usize,
        counts: impl IntoIterator<Item = (NGramFeature, u64)>,
    ) -> Result<Self> {
        check_gram(n)?;
        let mut acc: HashMap<NGramFeature, u64> = HashMap::new();
        for (f, c) in counts {
            if f.len() > n || !f.is_valid() {
                return Err(Error::InvalidArgument(format!(
                    "feature {f} is not a valid feature of length at most {n}"
                )));
            }
            let slot = acc.entry(f).or_default();
            *slot = slot.checked_add(c).ok_or(Error::CountOverflow)?;
        }
        let mut entries = Vec::with_capacity(acc.len());
        let mut total: u32 = 0;
        for (f, c) in acc {
            if c == 0 {
                continue;
            }
            let c = u32::try_from(c).map_err(|_| Error::CountOverflow)?;
            total = total.checked_add(c).ok_or(Error::CountOverflow)?;
            entries.push((f, c));
        }
        entries.sort_unstable_by_key(|&(f, _)| f);
        Ok(Self { n, entries, total })
    }

    /// Signature with no features, e.g. of an empty graph.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
            total: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total feature count (the sum of all entries).
    pub fn total(&self) -> u32 {
        self.total
    }

    /// Number of distinct features.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by feature.
    pub fn entries(&self) -> &[(NGramFeature, u32)] {
        &self.entries
    }

    pub fn get(&self, f: NGramFeature) -> u32 {
        self.entries
            .binary_search_by_key(&f, |&(k, _)| k)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// Every count multiplied by `factor`.
    pub fn scaled(&self, factor: u32) -> Result<Self> {
        let counts = self
            .entries
            .iter()
            .map(|&(f, c)| (f, c as u64 * factor as u64));
        Self::from_counts(self.n, counts)
    }

    /// Restriction to features of length at most `k`.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        check_gram(k)?;
        let counts = self
            .entries
            .iter()
            .filter(|(f, _)| f.len() <= k)
            .map(|&(f, c)| (f, c as u64));
        Self::from_counts(k, counts)
    }

    /// `key<TAB>count` lines in key order followed by `TOTAL<TAB>total`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (f, c) in &self.entries {
            out.push_str(&format!("{}\t{}\n", f.key(), c));
        }
        out.push_str(&format!("TOTAL\t{}\n", self.total));
        out
    }
}

fn check_gram(n: usize) -> Result<()> {
    if (1..=MAX_GRAM).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidGramLength {
            got: n,
            max: MAX_GRAM,
        })
    }
}

/// Counts the type sequence of every walk of 1 to `n` nodes.
///
/// Walks are grown one step at a time. Walks that end at the same node with
/// the same type sequence have identical extensions, so they are merged into
/// one counted state and the work stays polynomial in the graph size.
pub fn extract_features(g: &Cfg, n: usize) -> Result<GraphSignature> {
    check_gram(n)?;
    let types: Vec<NodeType> = g.degree_table().into_iter().map(abstract_node).collect();
    let succ = g.successor_lists();

    let mut counts: HashMap<NGramFeature, u64> = HashMap::new();
    let mut frontier: HashMap<(usize, NGramFeature), u64> = types
        .iter()
        .enumerate()
        .map(|(v, &t)| ((v, NGramFeature::single(t)), 1))
        .collect();

    for len in 1..=n {
        for (&(_, f), &c) in &frontier {
            let slot = counts.entry(f).or_default();
            *slot = slot.checked_add(c).ok_or(Error::CountOverflow)?;
        }
        if len == n {
            break;
        }
        let mut next: HashMap<(usize, NGramFeature), u64> = HashMap::new();
        for (&(v, f), &c) in &frontier {
            for &w in &succ[v] {
                let slot = next.entry((w, f.extended(types[w]))).or_default();
                *slot = slot.checked_add(c).ok_or(Error::CountOverflow)?;
            }
        }
        frontier = next;
    }

    GraphSignature::from_counts(n, counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{sample_cfg, sample_table};

    fn t(code: &str) -> NodeType {
        NGramFeature::from_key(code).unwrap().get(0).unwrap()
    }

    #[test]
    fn abstraction_clamps() {
        assert_eq!(abstract_node(DegreePair::new(0, 2)).to_string(), "02");
        assert_eq!(abstract_node(DegreePair::new(5, 1)).to_string(), "31");
        assert_eq!(abstract_node(DegreePair::new(1, 1)).to_string(), "11");
        assert_eq!(abstract_node(DegreePair::new(9, 9)).to_string(), "33");
        assert_eq!(NodeType::all().count(), 16);
    }

    #[test]
    fn canonical_keys() {
        let f = NGramFeature::new(&[t("02")]).unwrap();
        assert_eq!(f.key(), "02");
        let f = NGramFeature::new(&[t("02"), t("12"), t("21")]).unwrap();
        assert_eq!(canonical_key(f), "02|12|21");
        let d = decode_key("21|11|20").unwrap();
        assert_eq!(
            d.types().collect::<Vec<_>>(),
            vec![t("21"), t("11"), t("20")]
        );
        for bad in ["", "2", "02|", "04", "02||12", "0a", "021"] {
            assert!(decode_key(bad).is_err(), "{bad}");
        }
        let long = vec!["11"; MAX_GRAM + 1].join("|");
        assert!(decode_key(&long).is_err());
    }

    #[test]
    fn packed_order_matches_key_order() {
        let keys = [
            "00", "00|00", "02", "02|00", "02|01", "02|12|21", "03", "10", "33|33",
        ];
        let mut feats: Vec<_> = keys.iter().map(|k| decode_key(k).unwrap()).collect();
        feats.reverse();
        feats.sort();
        let back: Vec<_> = feats.iter().map(|f| f.key()).collect();
        assert_eq!(back, keys);
    }

    #[test]
    fn validity_rule() {
        let v = |k: &str| decode_key(k).unwrap().is_valid();
        assert!(!v("12|02"));
        assert!(!v("10|11"));
        assert!(v("02|11|20"));
        assert!(v("00"));
        assert!(!v("00|11"));
        assert!(v("01|10"));
        assert!(!is_valid_feature(&[]));
    }

    #[test]
    fn feature_space_closed_form() {
        assert_eq!(feature_space_size(1), 16);
        assert_eq!(feature_space_size(2), 160);
        assert_eq!(feature_space_size(3), 1456);
        assert_eq!(feature_space_size(5), 118_096);
    }

    #[test]
    fn sample_extraction() {
        let sig = extract_features(&sample_cfg(), 5).unwrap();
        // The hand list misses the walk 1->2->3->4.
        let mut expected: Vec<String> = sample_table().iter().map(|s| s.to_string()).collect();
        expected.push("12|21|11|20".into());
        expected.sort();
        let got: Vec<String> = sig.entries().iter().map(|(f, _)| f.key()).collect();
        assert_eq!(got, expected);
        assert!(sig.entries().iter().all(|&(_, c)| c == 1));
        assert_eq!(sig.total(), 20);
    }

    #[test]
    fn isolated_node_and_cycle() {
        let g = Cfg::new("one", [7], []).unwrap();
        for n in [1, 3, 5] {
            let sig = extract_features(&g, n).unwrap();
            assert_eq!(sig.to_text(), "00\t1\nTOTAL\t1\n");
        }

        let cycle = Cfg::from_edges("c", [(0, 1), (1, 0)]).unwrap();
        let sig = extract_features(&cycle, 3).unwrap();
        assert_eq!(sig.total(), 6);
        for k in ["11", "11|11", "11|11|11"] {
            assert_eq!(sig.get(decode_key(k).unwrap()), 2, "{k}");
        }
    }

    #[test]
    fn gram_bounds() {
        let g = sample_cfg();
        assert!(extract_features(&g, 0).is_err());
        assert!(extract_features(&g, MAX_GRAM + 1).is_err());
        assert!(extract_features(&g, MAX_GRAM).is_ok());
        assert_eq!(extract_features(&Cfg::empty("e"), 5).unwrap().total(), 0);
    }

    #[test]
    fn overflow_is_an_error() {
        let f = decode_key("11").unwrap();
        let err = GraphSignature::from_counts(5, [(f, u32::MAX as u64 + 1)]).unwrap_err();
        assert!(matches!(err, Error::CountOverflow));
        let g = decode_key("22").unwrap();
        let err = GraphSignature::from_counts(5, [(f, u32::MAX as u64), (g, 1)]).unwrap_err();
        assert!(matches!(err, Error::CountOverflow));
    }

    #[test]
    fn export_format() {
        let sig = extract_features(&Cfg::from_edges("p", [(0, 1)]).unwrap(), 2).unwrap();
        assert_eq!(sig.to_text(), "01\t1\n01|10\t1\n10\t1\nTOTAL\t3\n");
    }

    #[test]
    fn signature_rejects_invalid_features() {
        let bad = decode_key("12|02").unwrap();
        assert!(GraphSignature::from_counts(5, [(bad, 1)]).is_err());
        let long = decode_key("02|11|20").unwrap();
        assert!(GraphSignature::from_counts(2, [(long, 1)]).is_err());
    }
}
