//! Cluster quality against ground truth and threshold sweeps.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::eval::hac::{Dendrogram, Linkage, Partition};
use crate::eval::matrix::DistanceMatrix;

pub const DEFAULT_STEP: f64 = 0.005;

/// Malheur-style precision and recall of `partition` against the true group
/// label of every item.
///
/// Precision sums, over clusters, the largest share of one true group in that
/// cluster. Recall sums, over true groups, the largest share of that group in
/// one cluster. Both are divided by the item count.
pub fn precision_recall(partition: &Partition, truth: &[usize]) -> Result<(f64, f64)> {
    if partition.len() != truth.len() {
        return Err(Error::ItemMismatch {
            partition: partition.len(),
            truth: truth.len(),
        });
    }
    if truth.is_empty() {
        return Ok((1.0, 1.0));
    }
    let mut overlap: HashMap<(usize, usize), usize> = HashMap::new();
    for (&c, &g) in partition.labels().iter().zip(truth) {
        *overlap.entry((c, g)).or_default() += 1;
    }
    let mut best_per_cluster: HashMap<usize, usize> = HashMap::new();
    let mut best_per_group: HashMap<usize, usize> = HashMap::new();
    for (&(c, g), &count) in &overlap {
        let e = best_per_cluster.entry(c).or_default();
        *e = (*e).max(count);
        let e = best_per_group.entry(g).or_default();
        *e = (*e).max(count);
    }
    let n = truth.len() as f64;
    let precision = best_per_cluster.values().sum::<usize>() as f64 / n;
    let recall = best_per_group.values().sum::<usize>() as f64 / n;
    Ok((precision, recall))
}

/// Harmonic mean; zero when both inputs are zero.
pub fn f_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// `0, step, 2*step, ...` up to and always including 1.
pub fn thresholds(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "step must lie in (0, 1], got {step}"
        )));
    }
    let ratio = 1.0 / step;
    let whole = ratio.round();
    let steps = if (ratio - whole).abs() < 1e-9 {
        whole as usize
    } else {
        ratio.floor() as usize + 1
    };
    let mut out: Vec<f64> = (0..steps).map(|i| i as f64 * step).collect();
    out.push(1.0);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub threshold: f64,
    pub clusters: usize,
    pub precision: f64,
    pub recall: f64,
    pub fscore: f64,
}

/// Minimum and maximum distance of one pair category.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceRange {
    pub min: f64,
    pub max: f64,
    pub pairs: usize,
}

impl DistanceRange {
    fn of(sorted: &[f64]) -> Option<Self> {
        Some(Self {
            min: *sorted.first()?,
            max: *sorted.last()?,
            pairs: sorted.len(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairCategory {
    Same,
    Diff,
}

impl PairCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            PairCategory::Same => "same",
            PairCategory::Diff => "diff",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfPoint {
    pub category: PairCategory,
    pub distance: f64,
    pub cum_fraction: f64,
}

/// Off-diagonal distances split by whether both items share a group.
/// Each list is sorted ascending.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairDistances {
    pub same: Vec<f64>,
    pub diff: Vec<f64>,
}

impl PairDistances {
    pub fn new(m: &DistanceMatrix, truth: &[usize]) -> Result<Self> {
        if m.size() != truth.len() {
            return Err(Error::ItemMismatch {
                partition: m.size(),
                truth: truth.len(),
            });
        }
        let mut out = Self::default();
        for (i, j, d) in m.pairs() {
            if truth[i] == truth[j] {
                out.same.push(d);
            } else {
                out.diff.push(d);
            }
        }
        out.same.sort_by(f64::total_cmp);
        out.diff.sort_by(f64::total_cmp);
        Ok(out)
    }

    pub fn category(&self, c: PairCategory) -> &[f64] {
        match c {
            PairCategory::Same => &self.same,
            PairCategory::Diff => &self.diff,
        }
    }

    /// Fraction of pairs in `c` with distance at most `d`.
    pub fn cum_fraction(&self, c: PairCategory, d: f64) -> f64 {
        let v = self.category(c);
        if v.is_empty() {
            return 0.0;
        }
        v.partition_point(|&x| x <= d) as f64 / v.len() as f64
    }

    /// Nearest-rank percentile, `p` in [0, 100].
    pub fn percentile(&self, c: PairCategory, p: f64) -> Option<f64> {
        let v = self.category(c);
        if v.is_empty() {
            return None;
        }
        let rank = ((p / 100.0) * v.len() as f64).ceil() as usize;
        Some(v[rank.clamp(1, v.len()) - 1])
    }

    pub fn mean(&self, c: PairCategory) -> Option<f64> {
        let v = self.category(c);
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringReport {
    pub linkage: Linkage,
    pub rows: Vec<ReportRow>,
    pub optimal: ReportRow,
    pub same_range: Option<DistanceRange>,
    pub diff_range: Option<DistanceRange>,
    pub cdf: Vec<CdfPoint>,
}

impl ClusteringReport {
    pub fn write_rows_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "threshold,clusters,precision,recall,fscore")?;
        for r in &self.rows {
            writeln!(
                w,
                "{:.6},{},{:.6},{:.6},{:.6}",
                r.threshold, r.clusters, r.precision, r.recall, r.fscore
            )?;
        }
        Ok(())
    }

    pub fn write_cdf_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "category,distance,cum_fraction")?;
        for p in &self.cdf {
            writeln!(
                w,
                "{},{:.6},{:.6}",
                p.category.as_str(),
                p.distance,
                p.cum_fraction
            )?;
        }
        Ok(())
    }
}

/// Picks the row where precision and recall are closest, preferring the
/// higher F-score and then the lower threshold.
fn optimal_row(rows: &[ReportRow]) -> ReportRow {
    let mut best = rows[0];
    for &r in &rows[1..] {
        let gap = (r.precision - r.recall).abs();
        let best_gap = (best.precision - best.recall).abs();
        if gap < best_gap || (gap == best_gap && r.fscore > best.fscore) {
            best = r;
        }
    }
    best
}

/// Clusters at every threshold of [`thresholds`]`(step)` and scores each cut.
pub fn threshold_sweep(
    m: &DistanceMatrix,
    truth: &[usize],
    linkage: Linkage,
    step: f64,
) -> Result<ClusteringReport> {
    let grid = thresholds(step)?;
    let pairs = PairDistances::new(m, truth)?;
    let dendrogram = Dendrogram::build(m, linkage);

    let mut rows = Vec::with_capacity(grid.len());
    for &t in &grid {
        let p = dendrogram.cut(t);
        let (precision, recall) = precision_recall(&p, truth)?;
        rows.push(ReportRow {
            threshold: t,
            clusters: p.cluster_count(),
            precision,
            recall,
            fscore: f_score(precision, recall),
        });
    }

    let mut cdf = Vec::with_capacity(grid.len() * 2);
    for c in [PairCategory::Same, PairCategory::Diff] {
        if pairs.category(c).is_empty() {
            continue;
        }
        cdf.extend(grid.iter().map(|&t| CdfPoint {
            category: c,
            distance: t,
            cum_fraction: pairs.cum_fraction(c, t),
        }));
    }

    Ok(ClusteringReport {
        linkage,
        optimal: optimal_row(&rows),
        rows,
        same_range: DistanceRange::of(&pairs.same),
        diff_range: DistanceRange::of(&pairs.diff),
        cdf,
    })
}
