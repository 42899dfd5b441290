//! Wall-clock timing of the comparators.

use std::time::{Duration, Instant};

use crate::cfg::Cfg;
use crate::error::Result;
use crate::eval::matrix::{Comparator, ComparatorConfig, Prepared};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub comparator: Comparator,
    pub items: usize,
    pub pairs: usize,
    /// Building signatures, hashes or adjacency for every item once.
    pub generation: Duration,
    /// All pairs compared from the prepared representations.
    pub cached_pairs: Duration,
    /// All pairs with both representations rebuilt for every pair.
    pub uncached_pairs: Option<Duration>,
}

impl BenchRow {
    pub fn cache_speedup(&self) -> Option<f64> {
        let u = self.uncached_pairs?;
        Some(u.as_secs_f64() / self.cached_pairs.as_secs_f64().max(1e-9))
    }
}

/// Times one comparator on a single thread so rows are comparable.
pub fn bench(
    items: &[Cfg],
    comparator: Comparator,
    cfg: &ComparatorConfig,
    uncached: bool,
) -> Result<BenchRow> {
    let n = items.len();
    let pairs = n * n.saturating_sub(1) / 2;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("single-thread pool");

    pool.install(|| {
        let start = Instant::now();
        let prepared = Prepared::new(items, comparator, cfg)?;
        let generation = start.elapsed();

        let start = Instant::now();
        let mut sink = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                sink += prepared.similarity(i, j, cfg)?;
            }
        }
        let cached_pairs = start.elapsed();

        let uncached_pairs = if uncached {
            let start = Instant::now();
            for i in 0..n {
                for j in i + 1..n {
                    let pair = [items[i].clone(), items[j].clone()];
                    let p = Prepared::new(&pair, comparator, cfg)?;
                    sink += p.similarity(0, 1, cfg)?;
                }
            }
            Some(start.elapsed())
        } else {
            None
        };
        std::hint::black_box(sink);

        Ok(BenchRow {
            comparator,
            items: n,
            pairs,
            generation,
            cached_pairs,
            uncached_pairs,
        })
    })
}
