//! Exact maximum free set search.
//!
//! The solver is a branch and bound over the elements in increasing order,
//! trying "include" before "exclude". Each included element contributes the
//! images of the new tuples it completes to a `blocked` set; blocked elements
//! can never join the current set again. Because includes come first, the
//! first maximum set reached is the lexicographically least one.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapping::SetMapping;
use crate::predicates::is_free;
use crate::set::ElementSet;

/// Largest ground set the exhaustive oracle accepts.
pub const ORACLE_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_nodes: u64,
    pub max_time: Duration,
    /// Worker threads; 1 runs the plain sequential search.
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_nodes: 100_000_000,
            max_time: Duration::from_secs(60),
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub optimum: usize,
    pub witness: ElementSet,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

impl SearchReport {
    /// Equality ignoring the node count and timing.
    pub fn same_result(&self, other: &SearchReport) -> bool {
        self.optimum == other.optimum && self.witness == other.witness
    }

    pub fn to_doc(&self) -> SearchReportDoc {
        SearchReportDoc {
            millis: self.elapsed.as_millis() as u64,
            nodes: self.nodes_explored,
            optimum: self.optimum,
            witness: self.witness.to_vec(),
        }
    }
}

/// Wire form of a [`SearchReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReportDoc {
    pub millis: u64,
    pub nodes: u64,
    pub optimum: usize,
    pub witness: Vec<usize>,
}

/// Node and wall-clock budget shared by every worker of one search.
#[derive(Debug)]
pub struct Budget {
    nodes: AtomicU64,
    start: Instant,
    max_nodes: u64,
    max_time: Duration,
}

impl Budget {
    pub fn new(max_nodes: u64, max_time: Duration) -> Self {
        Budget {
            nodes: AtomicU64::new(0),
            start: Instant::now(),
            max_nodes,
            max_time,
        }
    }

    pub fn from_config(cfg: &SearchConfig) -> Self {
        Budget::new(cfg.max_nodes, cfg.max_time)
    }

    /// Counts one node; errors once either limit is exceeded.
    #[inline]
    pub fn tick(&self) -> Result<()> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.max_nodes || (n & 0x3ff == 0 && self.start.elapsed() > self.max_time) {
            return Err(self.exhausted());
        }
        Ok(())
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    pub fn exhausted(&self) -> Error {
        Error::ResourceLimit {
            nodes: self.nodes(),
            millis: self.start.elapsed().as_millis(),
        }
    }
}

/// Images of the tuples that adding `v` to `current` completes, or `None`
/// when one of them meets `current`.
#[inline]
fn completed_images(f: &SetMapping, current: ElementSet, v: usize) -> Option<ElementSet> {
    let mut acc = ElementSet::EMPTY;
    for base in current.subsets_of_size(f.arity() - 1) {
        let img = f.image(base.with(v));
        if img.intersects(current) {
            return None;
        }
        acc = acc.union(img);
    }
    Some(acc)
}

struct BranchAndBound<'a> {
    f: &'a SetMapping,
    budget: &'a Budget,
    n: usize,
    best: Option<ElementSet>,
}

impl BranchAndBound<'_> {
    fn best_len(&self) -> Option<usize> {
        self.best.map(|b| b.len())
    }

    fn dfs(&mut self, v: usize, current: ElementSet, blocked: ElementSet) -> Result<()> {
        self.budget.tick()?;
        if self.best_len().is_none_or(|b| current.len() > b) {
            self.best = Some(current);
        }
        let remaining = ElementSet::below(self.n)
            .difference(ElementSet::below(v))
            .difference(blocked)
            .len();
        if v >= self.n || self.best_len().is_some_and(|b| current.len() + remaining <= b) {
            return Ok(());
        }
        if !blocked.contains(v) {
            if let Some(img) = completed_images(self.f, current, v) {
                self.dfs(v + 1, current.with(v), blocked.union(img))?;
            }
        }
        self.dfs(v + 1, current, blocked)
    }
}

/// Best free set among those whose least element is `first`.
fn solve_from(f: &SetMapping, budget: &Budget, first: usize) -> Result<Option<ElementSet>> {
    let start = ElementSet::singleton(first);
    let blocked = completed_images(f, ElementSet::EMPTY, first).expect("empty set never conflicts");
    let mut bb = BranchAndBound {
        f,
        budget,
        n: f.n(),
        best: None,
    };
    bb.dfs(first + 1, start, blocked)?;
    Ok(bb.best)
}

/// Size and lexicographically least witness of a maximum free set of `f`.
pub fn max_free_set(f: &SetMapping, cfg: &SearchConfig) -> Result<SearchReport> {
    let budget = Budget::from_config(cfg);
    let best = if cfg.workers <= 1 {
        let mut bb = BranchAndBound {
            f,
            budget: &budget,
            n: f.n(),
            best: None,
        };
        bb.dfs(0, ElementSet::EMPTY, ElementSet::EMPTY)?;
        bb.best.unwrap_or_default()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Parse(format!("thread pool: {e}")))?;
        let per_first: Vec<Option<ElementSet>> = pool.install(|| {
            (0..f.n())
                .into_par_iter()
                .map(|first| solve_from(f, &budget, first))
                .collect::<Result<Vec<_>>>()
        })?;
        // Sets starting at a smaller element are lexicographically smaller,
        // so the first maximum in index order is the canonical witness.
        let mut best = ElementSet::EMPTY;
        for set in per_first.into_iter().flatten() {
            if set.len() > best.len() {
                best = set;
            }
        }
        best
    };
    Ok(SearchReport {
        optimum: best.len(),
        witness: best,
        nodes_explored: budget.nodes(),
        elapsed: budget.elapsed(),
    })
}

/// All free `m`-subsets of the ground set, in lexicographic order.
pub fn enumerate_free_sets(f: &SetMapping, m: usize, cfg: &SearchConfig) -> Result<Vec<ElementSet>> {
    if m > f.n() {
        return Err(Error::TooSmall {
            what: "ground set size",
            min: m,
            got: f.n(),
        });
    }
    let budget = Budget::from_config(cfg);
    let mut out = Vec::new();
    enumerate_dfs(f, &budget, m, 0, ElementSet::EMPTY, ElementSet::EMPTY, &mut out)?;
    Ok(out)
}

fn enumerate_dfs(
    f: &SetMapping,
    budget: &Budget,
    m: usize,
    v: usize,
    current: ElementSet,
    blocked: ElementSet,
    out: &mut Vec<ElementSet>,
) -> Result<()> {
    budget.tick()?;
    if current.len() == m {
        out.push(current);
        return Ok(());
    }
    let n = f.n();
    let remaining = ElementSet::below(n)
        .difference(ElementSet::below(v))
        .difference(blocked)
        .len();
    if v >= n || current.len() + remaining < m {
        return Ok(());
    }
    if !blocked.contains(v) {
        if let Some(img) = completed_images(f, current, v) {
            enumerate_dfs(f, budget, m, v + 1, current.with(v), blocked.union(img), out)?;
        }
    }
    enumerate_dfs(f, budget, m, v + 1, current, blocked, out)
}

/// Unpruned reference: every subset by decreasing size, lexicographic within
/// a size, tested with [`is_free`] directly.
pub fn oracle_max_free_set(f: &SetMapping) -> Result<SearchReport> {
    let n = f.n();
    if n > ORACLE_CAP {
        return Err(Error::OracleCap { n, cap: ORACLE_CAP });
    }
    let start = Instant::now();
    let mut examined = 0u64;
    for size in (0..=n).rev() {
        for h in ElementSet::below(n).subsets_of_size(size) {
            examined += 1;
            if is_free(f, h)? {
                return Ok(SearchReport {
                    optimum: size,
                    witness: h,
                    nodes_explored: examined,
                    elapsed: start.elapsed(),
                });
            }
        }
    }
    unreachable!("the empty set is always free")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::Flags;

    fn interval(n: usize) -> SetMapping {
        SetMapping::from_fn(n, 4, None, Flags::INTERVAL, |t| Flags::INTERVAL.allowed(t)).unwrap()
    }

    fn prefix(n: usize) -> SetMapping {
        SetMapping::from_fn(n, 2, None, Flags::INITIAL_SEGMENT, |t| {
            Flags::INITIAL_SEGMENT.allowed(t)
        })
        .unwrap()
    }

    fn cfg() -> SearchConfig {
        SearchConfig::default()
    }

    #[test]
    fn interval_mapping_optimum_is_four() {
        let r = max_free_set(&interval(10), &cfg()).unwrap();
        assert_eq!(r.optimum, 4);
        assert_eq!(r.witness, ElementSet::of(&[0, 1, 2, 3]));
    }

    #[test]
    fn prefix_mapping_optimum_is_two() {
        let r = max_free_set(&prefix(6), &cfg()).unwrap();
        assert_eq!(r.optimum, 2);
        assert_eq!(r.witness, ElementSet::of(&[0, 1]));
    }

    #[test]
    fn empty_images_make_everything_free() {
        let f = SetMapping::empty(7, 2, None, Flags::NONE).unwrap();
        let r = max_free_set(&f, &cfg()).unwrap();
        assert_eq!(r.optimum, 7);
        assert_eq!(r.witness, ElementSet::below(7));
    }

    #[test]
    fn enumeration_examples() {
        assert!(enumerate_free_sets(&interval(6), 5, &cfg()).unwrap().is_empty());
        let fours = enumerate_free_sets(&interval(6), 4, &cfg()).unwrap();
        let expect: Vec<_> = ElementSet::below(6).subsets_of_size(4).collect();
        assert_eq!(fours, expect);
        assert!(enumerate_free_sets(&prefix(4), 3, &cfg()).unwrap().is_empty());
        assert!(enumerate_free_sets(&prefix(4), 5, &cfg()).is_err());
    }

    #[test]
    fn oracle_examples() {
        let single = SetMapping::empty(1, 3, None, Flags::NONE).unwrap();
        assert_eq!(oracle_max_free_set(&single).unwrap().optimum, 1);
        assert_eq!(oracle_max_free_set(&interval(5)).unwrap().optimum, 4);
        let big = SetMapping::empty(21, 1, None, Flags::NONE).unwrap();
        assert!(matches!(oracle_max_free_set(&big), Err(Error::OracleCap { n: 21, .. })));
    }

    #[test]
    fn node_budget_is_reported_distinctly() {
        let f = SetMapping::empty(30, 2, None, Flags::NONE).unwrap();
        let tight = SearchConfig {
            max_nodes: 10,
            ..cfg()
        };
        // with empty images the optimum is found on the first descent
        assert!(max_free_set(&f, &tight).is_err_and(|e| matches!(e, Error::ResourceLimit { .. })));
    }

    #[test]
    fn parallel_split_matches_sequential() {
        let f = interval(12);
        let seq = max_free_set(&f, &cfg()).unwrap();
        let par = max_free_set(&f, &SearchConfig { workers: 3, ..cfg() }).unwrap();
        assert!(seq.same_result(&par));
    }

    #[test]
    fn report_document_shape() {
        let r = max_free_set(&prefix(4), &cfg()).unwrap();
        let json = serde_json::to_value(r.to_doc()).unwrap();
        assert_eq!(json["optimum"], 2);
        assert_eq!(json["witness"], serde_json::json!([0, 1]));
        assert!(json["nodes"].as_u64().unwrap() > 0);
        assert!(json.get("millis").is_some());
    }
}
