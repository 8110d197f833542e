//! Choosing singleton images inside `F` so that no `m`-set stays free.
//!
//! Pairs are assigned in lexicographic order, values in increasing order, so
//! the first complete assignment found is the lexicographically least one.
//! Every `m`-set keeps a count of the pairs that have already killed it and
//! of the unassigned pairs that still could; a set with neither is a
//! conflict.

use crate::error::{Error, Result};
use crate::mapping::{colex_rank, SetMapping, MAX_TUPLES};
use crate::search::{Budget, SearchConfig};
use crate::set::{binomial, ElementSet};

use super::generic::Goal;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagonalization {
    Sat {
        g: SetMapping,
        /// Pairs whose `F`-image is empty and so keep an empty image.
        empty_pairs: Vec<ElementSet>,
        nodes: u64,
    },
    /// The search space was exhausted without a solution.
    Unsat { nodes: u64 },
}

struct Slot {
    pair: ElementSet,
    values: Vec<usize>,
    /// `(m-set index, F(pair) meets the m-set)` for every m-set containing the pair.
    sets: Vec<(usize, bool)>,
}

struct Solver<'a> {
    slots: Vec<Slot>,
    killed: Vec<u32>,
    potential: Vec<u32>,
    chosen: Vec<Option<usize>>,
    budget: &'a Budget,
    set_of: Vec<ElementSet>,
}

impl Solver<'_> {
    /// Applies an assignment; returns whether it leaves every m-set alive.
    fn apply(&mut self, slot: usize, value: Option<usize>) -> bool {
        let mut ok = true;
        for &(x, useful) in &self.slots[slot].sets {
            if useful {
                self.potential[x] -= 1;
            }
            if value.is_some_and(|v| self.set_of[x].contains(v)) {
                self.killed[x] += 1;
            }
            if self.killed[x] == 0 && self.potential[x] == 0 {
                ok = false;
            }
        }
        ok
    }

    fn undo(&mut self, slot: usize, value: Option<usize>) {
        for &(x, useful) in &self.slots[slot].sets {
            if useful {
                self.potential[x] += 1;
            }
            if value.is_some_and(|v| self.set_of[x].contains(v)) {
                self.killed[x] -= 1;
            }
        }
    }

    fn dfs(&mut self, slot: usize) -> Result<bool> {
        self.budget.tick()?;
        if slot == self.slots.len() {
            return Ok(true);
        }
        let values: Vec<Option<usize>> = if self.slots[slot].values.is_empty() {
            vec![None]
        } else {
            self.slots[slot].values.iter().map(|&v| Some(v)).collect()
        };
        for value in values {
            let ok = self.apply(slot, value);
            if ok {
                self.chosen[slot] = value;
                if self.dfs(slot + 1)? {
                    return Ok(true);
                }
            }
            self.undo(slot, value);
        }
        Ok(false)
    }
}

/// Finds the lexicographically least `g ⊆ F` with at-most-singleton images
/// on every pair of the ground set such that every `m`-set `X` contains a
/// pair `{y,z}` with `g({y,z}) ∈ X`, or certifies that none exists.
pub fn diagonalize_cor3(big_f: &SetMapping, m: usize, cfg: &SearchConfig) -> Result<Diagonalization> {
    if m < 3 {
        return Err(Error::TooSmall {
            what: "target free-set size",
            min: 3,
            got: m,
        });
    }
    if big_f.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: big_f.arity(),
        });
    }
    let n = big_f.n();
    let count = binomial(n, m);
    if count > MAX_TUPLES {
        return Err(Error::TooLarge { n, k: m });
    }
    let ground = ElementSet::below(n);
    let mut set_of = vec![ElementSet::EMPTY; count as usize];
    for x in ground.subsets_of_size(m) {
        set_of[colex_rank(x)] = x;
    }

    let mut potential = vec![0u32; set_of.len()];
    let mut slots = Vec::new();
    for pair in ground.subsets_of_size(2) {
        let image = big_f.image(pair);
        let sets: Vec<(usize, bool)> = ground
            .difference(pair)
            .subsets_of_size(m - 2)
            .map(|rest| {
                let x = rest.union(pair);
                (colex_rank(x), image.intersects(x))
            })
            .collect();
        for &(x, useful) in &sets {
            if useful {
                potential[x] += 1;
            }
        }
        slots.push(Slot {
            pair,
            values: image.to_vec(),
            sets,
        });
    }

    let budget = Budget::from_config(cfg);
    if potential.contains(&0) {
        return Ok(Diagonalization::Unsat { nodes: 0 });
    }
    let mut solver = Solver {
        killed: vec![0; set_of.len()],
        potential,
        chosen: vec![None; slots.len()],
        slots,
        budget: &budget,
        set_of,
    };
    if !solver.dfs(0)? {
        return Ok(Diagonalization::Unsat { nodes: budget.nodes() });
    }
    let mut g = SetMapping::empty(n, 2, Some(2), big_f.flags())?;
    let mut empty_pairs = Vec::new();
    for (slot, value) in solver.slots.iter().zip(&solver.chosen) {
        match value {
            Some(v) => g.set_image(slot.pair, ElementSet::singleton(*v))?,
            None => empty_pairs.push(slot.pair),
        }
    }
    Ok(Diagonalization::Sat {
        g,
        empty_pairs,
        nodes: budget.nodes(),
    })
}

/// Killing goals reproducing every nonempty image of `g`.
pub fn kill_goals(g: &SetMapping) -> Vec<Goal> {
    g.nonempty()
        .map(|(pair, image)| Goal::Kill {
            target: image.min().expect("nonempty"),
            pair,
        })
        .collect()
}
