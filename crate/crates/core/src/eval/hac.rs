//! Hierarchical agglomerative clustering with a distance threshold.
//!
//! Every item starts as a singleton. The closest pair of clusters is merged
//! while its linkage distance is below the threshold. Among equally close
//! pairs the one with the lowest `(i, j)` wins, where a cluster is identified
//! by its smallest member. The merge order does not depend on the threshold,
//! so a [`Dendrogram`] built once can be cut at any number of thresholds.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::eval::matrix::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Linkage {
    /// Minimum distance between members.
    Single,
    /// Mean distance between members.
    Average,
    /// Maximum distance between members.
    Complete,
}

impl Linkage {
    pub const ALL: [Linkage; 3] = [Linkage::Single, Linkage::Average, Linkage::Complete];

    /// Lance-Williams update for the distance from the union of clusters of
    /// sizes `ni` and `nj` to a third cluster.
    fn combine(self, d_ik: f64, d_jk: f64, ni: usize, nj: usize) -> f64 {
        match self {
            Linkage::Single => d_ik.min(d_jk),
            Linkage::Complete => d_ik.max(d_jk),
            Linkage::Average => (ni as f64 * d_ik + nj as f64 * d_jk) / (ni + nj) as f64,
        }
    }
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(Linkage::Single),
            "average" => Ok(Linkage::Average),
            "complete" => Ok(Linkage::Complete),
            other => Err(Error::InvalidArgument(format!("unknown linkage `{other}`"))),
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Single => "single",
            Linkage::Average => "average",
            Linkage::Complete => "complete",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    /// Surviving cluster id (smallest member of the union).
    pub left: usize,
    /// Absorbed cluster id, always greater than `left`.
    pub right: usize,
    pub distance: f64,
    /// Size of the merged cluster.
    pub size: usize,
}

/// Complete merge sequence of the greedy agglomeration.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    items: usize,
    merges: Vec<Merge>,
}

/// Cluster assignment; clusters are numbered by their first member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    clusters: usize,
}

impl Partition {
    /// Normalizes arbitrary labels to first-appearance numbering.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        Self {
            labels,
            clusters: map.len(),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters
    }

    /// Members of each cluster, ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.clusters];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }
}

impl Dendrogram {
    /// Runs the agglomeration to a single cluster.
    ///
    /// Each live cluster caches its nearest higher-numbered neighbour, so a
    /// merge only rescans the rows whose cached neighbour was touched.
    pub fn build(m: &DistanceMatrix, linkage: Linkage) -> Self {
        let n = m.size();
        let mut dist = m.to_square();
        let mut active = vec![true; n];
        let mut size = vec![1usize; n];
        let mut nn = vec![usize::MAX; n];
        let mut nd = vec![f64::INFINITY; n];

        let rescan = |i: usize, dist: &[Vec<f64>], active: &[bool]| -> (usize, f64) {
            let mut best = (usize::MAX, f64::INFINITY);
            for (j, &d) in dist[i].iter().enumerate().skip(i + 1) {
                if active[j] && d < best.1 {
                    best = (j, d);
                }
            }
            best
        };
        for i in 0..n {
            (nn[i], nd[i]) = rescan(i, &dist, &active);
        }

        let mut merges = Vec::with_capacity(n.saturating_sub(1));
        for _ in 1..n {
            let mut i = usize::MAX;
            let mut best = f64::INFINITY;
            for k in 0..n {
                if active[k] && nn[k] != usize::MAX && (i == usize::MAX || nd[k] < best) {
                    i = k;
                    best = nd[k];
                }
            }
            if i == usize::MAX {
                break;
            }
            let j = nn[i];

            for k in 0..n {
                if active[k] && k != i && k != j {
                    let d = linkage.combine(dist[i][k], dist[j][k], size[i], size[j]);
                    dist[i][k] = d;
                    dist[k][i] = d;
                }
            }
            active[j] = false;
            size[i] += size[j];
            merges.push(Merge {
                left: i,
                right: j,
                distance: best,
                size: size[i],
            });

            (nn[i], nd[i]) = rescan(i, &dist, &active);
            for k in 0..n {
                if !active[k] || k == i {
                    continue;
                }
                if nn[k] == j || nn[k] == i {
                    (nn[k], nd[k]) = rescan(k, &dist, &active);
                } else if k < i {
                    let d = dist[k][i];
                    if d < nd[k] || (d == nd[k] && i < nn[k]) {
                        nn[k] = i;
                        nd[k] = d;
                    }
                }
            }
        }
        Self { items: n, merges }
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Clusters left when agglomeration stops at the first merge whose
    /// distance is not below `threshold`.
    pub fn cut(&self, threshold: f64) -> Partition {
        let mut parent: Vec<usize> = (0..self.items).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for m in self.merges.iter().take_while(|m| m.distance < threshold) {
            let a = find(&mut parent, m.left);
            let b = find(&mut parent, m.right);
            parent[b] = a;
        }
        let roots: Vec<usize> = (0..self.items).map(|x| find(&mut parent, x)).collect();
        Partition::from_labels(&roots)
    }

    /// Number of clusters after cutting at `threshold`.
    pub fn cluster_count(&self, threshold: f64) -> usize {
        self.items
            - self
                .merges
                .iter()
                .take_while(|m| m.distance < threshold)
                .count()
    }
}

pub fn hac_cluster(m: &DistanceMatrix, linkage: Linkage, threshold: f64) -> Partition {
    Dendrogram::build(m, linkage).cut(threshold)
}
