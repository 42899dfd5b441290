//! Pairwise distance matrices under the available comparators.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::baseline::mcs::{mcs_similarity, DEFAULT_NODE_BUDGET};
use crate::cfg::Cfg;
use crate::error::{Error, Result};
use crate::features::{extract_features, GraphSignature};
use crate::fuzzy::{hash_similarity, project, FuzzyHash, ProjectionParams};
use crate::similarity::exact_similarity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparator {
    /// Fuzzy hash similarity.
    Tah,
    /// Exact signature similarity.
    TahExact,
    /// Maximum common subgraph baseline.
    Mcs,
}

impl Comparator {
    pub const ALL: [Comparator; 3] = [Comparator::Tah, Comparator::TahExact, Comparator::Mcs];
}

impl FromStr for Comparator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tah" | "hash" => Ok(Comparator::Tah),
            "exact" | "tah_exact" | "tah-exact" => Ok(Comparator::TahExact),
            "mcs" => Ok(Comparator::Mcs),
            other => Err(Error::InvalidArgument(format!(
                "unknown comparator `{other}`"
            ))),
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Tah => "tah",
            Comparator::TahExact => "exact",
            Comparator::Mcs => "mcs",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComparatorConfig {
    /// Projection parameters; `params.n()` is also the gram length for exact
    /// signatures.
    pub params: ProjectionParams,
    pub node_budget: usize,
}

impl Default for ComparatorConfig {
    fn default() -> Self {
        Self {
            params: ProjectionParams::default(),
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// Per-item representation computed once before the pairwise pass.
pub enum Prepared<'a> {
    Signatures(Vec<GraphSignature>),
    Hashes(Vec<FuzzyHash>),
    Graphs(&'a [Cfg]),
}

impl<'a> Prepared<'a> {
    pub fn new(items: &'a [Cfg], comparator: Comparator, cfg: &ComparatorConfig) -> Result<Self> {
        let annotate = |i: usize| {
            move |e: Error| Error::Comparator {
                i,
                j: i,
                source: Box::new(e),
            }
        };
        let sig = |i: usize, g: &Cfg| -> Result<GraphSignature> {
            let s = extract_features(g, cfg.params.n()).map_err(annotate(i))?;
            if s.total() == 0 {
                return Err(annotate(i)(Error::EmptySignature));
            }
            Ok(s)
        };
        Ok(match comparator {
            Comparator::TahExact => Prepared::Signatures(
                items
                    .par_iter()
                    .enumerate()
                    .map(|(i, g)| sig(i, g))
                    .collect::<Result<_>>()?,
            ),
            Comparator::Tah => Prepared::Hashes(
                items
                    .par_iter()
                    .enumerate()
                    .map(|(i, g)| project(&sig(i, g)?, &cfg.params).map_err(annotate(i)))
                    .collect::<Result<_>>()?,
            ),
            Comparator::Mcs => {
                for (i, g) in items.iter().enumerate() {
                    if g.is_empty() {
                        return Err(annotate(i)(Error::EmptyGraph));
                    }
                    if g.node_count() > cfg.node_budget {
                        return Err(annotate(i)(Error::BudgetExceeded {
                            nodes: g.node_count(),
                            budget: cfg.node_budget,
                        }));
                    }
                }
                Prepared::Graphs(items)
            }
        })
    }

    pub fn len(&self) -> usize {
        match self {
            Prepared::Signatures(v) => v.len(),
            Prepared::Hashes(v) => v.len(),
            Prepared::Graphs(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn similarity(&self, i: usize, j: usize, cfg: &ComparatorConfig) -> Result<f64> {
        let score = match self {
            Prepared::Signatures(v) => exact_similarity(&v[i], &v[j]),
            Prepared::Hashes(v) => hash_similarity(&v[i], &v[j]),
            Prepared::Graphs(v) => mcs_similarity(&v[i], &v[j], cfg.node_budget),
        };
        score.map(|s| s.value()).map_err(|e| Error::Comparator {
            i,
            j,
            source: Box::new(e),
        })
    }
}

/// Symmetric matrix with zero diagonal, stored as its strict upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    upper: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds from a full square matrix, checking shape, symmetry, zero
    /// diagonal and the `[0, 1]` range.
    pub fn from_square(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        let mut upper = Vec::with_capacity(size * size.saturating_sub(1) / 2);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has {} entries",
                    row.len()
                )));
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidArgument(format!("nonzero diagonal at {i}")));
            }
            for j in i + 1..size {
                let d = row[j];
                if d != rows[j][i] {
                    return Err(Error::InvalidArgument(format!("asymmetric at ({i}, {j})")));
                }
                if !(0.0..=1.0).contains(&d) {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({i}, {j}) = {d} outside [0, 1]"
                    )));
                }
                upper.push(d);
            }
        }
        Ok(Self { size, upper })
    }

    /// Fills entries `(i, j)`, `i < j`, from `dist`, rows in parallel.
    pub fn try_from_fn<F>(size: usize, dist: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<f64> + Sync,
    {
        let rows: Vec<Result<Vec<f64>>> = (0..size)
            .into_par_iter()
            .map(|i| (i + 1..size).map(|j| dist(i, j)).collect())
            .collect();
        let mut upper = Vec::with_capacity(size * size.saturating_sub(1) / 2);
        for row in rows {
            upper.extend(row?);
        }
        Ok(Self { size, upper })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.size);
        i * self.size - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.upper[self.index(i, j)],
            std::cmp::Ordering::Greater => self.upper[self.index(j, i)],
        }
    }

    /// `(i, j, distance)` for every `i < j`, row by row.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.size)
            .flat_map(move |i| (i + 1..self.size).map(move |j| (i, j)))
            .zip(self.upper.iter())
            .map(|((i, j), &d)| (i, j, d))
    }

    pub fn max_entry(&self) -> f64 {
        self.upper.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_square(&self) -> Vec<Vec<f64>> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// `1 - similarity` for every pair. Signatures or hashes are computed once
/// per item.
pub fn distance_matrix(
    items: &[Cfg],
    comparator: Comparator,
    cfg: &ComparatorConfig,
) -> Result<DistanceMatrix> {
    let prepared = Prepared::new(items, comparator, cfg)?;
    DistanceMatrix::try_from_fn(items.len(), |i, j| {
        prepared.similarity(i, j, cfg).map(|s| 1.0 - s)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::sample_cfg;

    #[test]
    fn single_item() {
        let m =
            distance_matrix(&[sample_cfg()], Comparator::TahExact, &Default::default()).unwrap();
        assert_eq!(m.size(), 1);
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.pairs().count(), 0);
    }

    #[test]
    fn duplicates_have_zero_distance() {
        let items = vec![sample_cfg(), sample_cfg(), sample_cfg()];
        for c in Comparator::ALL {
            let m = distance_matrix(&items, c, &Default::default()).unwrap();
            assert!(m.pairs().all(|(_, _, d)| d == 0.0), "{c}");
        }
    }

    #[test]
    fn deleted_edge_distance() {
        use crate::baseline::walks::enumerate_walks_oracle;
        use std::collections::HashMap;

        let g = sample_cfg();
        let h = g.with_edge_removed(0, 1);
        let counts = |c: &Cfg| -> HashMap<String, f64> {
            let s = enumerate_walks_oracle(c, 5).unwrap();
            s.entries()
                .iter()
                .map(|(f, n)| (f.key(), *n as f64))
                .collect()
        };
        let (a, b) = (counts(&g), counts(&h));
        let dot: f64 = a.iter().map(|(k, x)| x * b.get(k).unwrap_or(&0.0)).sum();
        let na: f64 = a.values().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = b.values().map(|x| x * x).sum::<f64>().sqrt();
        let (ta, tb): (f64, f64) = (a.values().sum(), b.values().sum());
        let expected = 1.0 - ta.min(tb) / ta.max(tb) * dot / (na * nb);

        let m = distance_matrix(&[g, h], Comparator::TahExact, &Default::default()).unwrap();
        let d = m.get(0, 1);
        assert!((d - expected).abs() < 1e-12, "{d} vs {expected}");
        assert!((d - 0.566_987_298_107_780_7).abs() < 1e-12, "{d}");
        assert_eq!(d, m.get(1, 0));
    }

    #[test]
    fn empty_items_are_reported() {
        let items = vec![sample_cfg(), Cfg::empty("e")];
        for c in Comparator::ALL {
            let err = distance_matrix(&items, c, &Default::default()).unwrap_err();
            assert!(
                matches!(err, Error::Comparator { i: 1, j: 1, .. }),
                "{c}: {err}"
            );
        }
    }

    #[test]
    fn square_round_trip_and_validation() {
        let sq = vec![
            vec![0.0, 0.2, 0.9],
            vec![0.2, 0.0, 0.4],
            vec![0.9, 0.4, 0.0],
        ];
        let m = DistanceMatrix::from_square(&sq).unwrap();
        assert_eq!(m.to_square(), sq);
        assert_eq!(m.max_entry(), 0.9);
        let pairs: Vec<_> = m.pairs().collect();
        assert_eq!(pairs, vec![(0, 1, 0.2), (0, 2, 0.9), (1, 2, 0.4)]);

        let mut bad = sq.clone();
        bad[0][1] = 0.3;
        assert!(DistanceMatrix::from_square(&bad).is_err());
        let mut bad = sq.clone();
        bad[1][1] = 0.1;
        assert!(DistanceMatrix::from_square(&bad).is_err());
        let mut bad = sq;
        bad[0][2] = 1.5;
        bad[2][0] = 1.5;
        assert!(DistanceMatrix::from_square(&bad).is_err());
    }

    #[test]
    fn comparator_names() {
        assert_eq!("exact".parse::<Comparator>().unwrap(), Comparator::TahExact);
        assert_eq!(
            "tah_exact".parse::<Comparator>().unwrap(),
            Comparator::TahExact
        );
        assert_eq!("TAH".parse::<Comparator>().unwrap(), Comparator::Tah);
        assert!("bindiff".parse::<Comparator>().is_err());
    }
}
