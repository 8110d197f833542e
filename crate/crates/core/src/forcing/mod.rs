//! Finite forcing conditions for the three constructions: quadruple
//! conditions, ranked pair conditions and singleton pair conditions, with
//! their checkers, amalgamation, generic builder and the diagonalization
//! solver.

mod diagonalize;
mod doc;
mod generic;
mod pair;
mod quad;
mod ranked;

pub use diagonalize::{diagonalize_cor3, kill_goals, Diagonalization};
pub use doc::AnyCondition;
pub use generic::{generic_build, Flavor, GenericBuild, Goal};
pub use pair::{check_pair_condition, PairCondition};
pub use quad::{amalgamate_theorem1, check_condition4, position_lemma_core, Condition4, Validity};
pub use ranked::{
    amalgamate_theorem2, canonical_rank, check_ranked_condition, mixed_secured_sets, rank_completion,
    secured_sets, Completion, RankDefect, RankFunction, RankValidity, RankedCondition,
};

use crate::error::{Error, Result};
use crate::mapping::SetMapping;
use crate::predicates::extends_closed_free;
use crate::set::ElementSet;

/// Lexicographically least subset of `s` of exactly `size` elements that is
/// `F`-closed and `g`-free.
pub(crate) fn first_closed_free_set(big_f: &SetMapping, g: &SetMapping, s: ElementSet, size: usize) -> Option<ElementSet> {
    fn dfs(
        big_f: &SetMapping,
        g: &SetMapping,
        candidates: &[usize],
        from: usize,
        current: ElementSet,
        size: usize,
    ) -> Option<ElementSet> {
        if current.len() == size {
            return Some(current);
        }
        let need = size - current.len();
        for i in from..candidates.len() {
            if candidates.len() - i < need {
                break;
            }
            let v = candidates[i];
            if extends_closed_free(big_f, g, current, v) {
                if let Some(found) = dfs(big_f, g, candidates, i + 1, current.with(v), size) {
                    return Some(found);
                }
            }
        }
        None
    }
    dfs(big_f, g, &s.to_vec(), 0, ElementSet::EMPTY, size)
}

/// Every `F`-closed, `g`-free subset of `s` with at least `min_size`
/// elements, in lexicographic order.
pub(crate) fn closed_free_sets(big_f: &SetMapping, g: &SetMapping, s: ElementSet, min_size: usize) -> Vec<ElementSet> {
    fn dfs(
        big_f: &SetMapping,
        g: &SetMapping,
        candidates: &[usize],
        from: usize,
        current: ElementSet,
        min_size: usize,
        out: &mut Vec<ElementSet>,
    ) {
        for i in from..candidates.len() {
            let v = candidates[i];
            if extends_closed_free(big_f, g, current, v) {
                let next = current.with(v);
                if next.len() >= min_size {
                    out.push(next);
                }
                dfs(big_f, g, candidates, i + 1, next, min_size, out);
            }
        }
    }
    let mut out = Vec::new();
    dfs(big_f, g, &s.to_vec(), 0, ElementSet::EMPTY, min_size, &mut out);
    out
}

/// `g` lives on `[s]^k` and sits inside `F(u) ∩ s` there.
pub(crate) fn check_containment(big_f: &SetMapping, s: ElementSet, g: &SetMapping) -> Result<()> {
    if g.arity() != big_f.arity() {
        return Err(Error::ArityMismatch {
            expected: big_f.arity(),
            got: g.arity(),
        });
    }
    big_f.ground().check(s)?;
    for (tuple, image) in g.nonempty() {
        if !tuple.is_subset(s) || !image.is_subset(big_f.image(tuple).intersection(s)) {
            return Err(Error::Containment { tuple, image });
        }
    }
    Ok(())
}
