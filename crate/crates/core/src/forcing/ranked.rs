use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::constructions::{delta_precondition_failure, maximal_extension, DeltaCondition, DeltaSystemPair};
use crate::error::{Error, Result};
use crate::mapping::SetMapping;
use crate::set::ElementSet;

use super::{check_containment, closed_free_sets};

/// Ranks of secured sets, keyed by the set itself.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RankFunction {
    ranks: HashMap<ElementSet, u32>,
}

impl RankFunction {
    pub fn new() -> Self {
        RankFunction::default()
    }

    pub fn get(&self, u: ElementSet) -> Option<u32> {
        self.ranks.get(&u).copied()
    }

    pub fn insert(&mut self, u: ElementSet, rank: u32) {
        self.ranks.insert(u, rank);
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn contains(&self, u: ElementSet) -> bool {
        self.ranks.contains_key(&u)
    }

    /// Entries in lexicographic order of their sets.
    pub fn sorted(&self) -> Vec<(ElementSet, u32)> {
        let mut v: Vec<_> = self.ranks.iter().map(|(&u, &r)| (u, r)).collect();
        v.sort_by(|a, b| a.0.lex_cmp(b.0));
        v
    }

    /// Entries whose set lies inside `support`.
    pub fn restricted_to(&self, support: ElementSet) -> RankFunction {
        RankFunction {
            ranks: self
                .ranks
                .iter()
                .filter(|(u, _)| u.is_subset(support))
                .map(|(&u, &r)| (u, r))
                .collect(),
        }
    }
}

impl FromIterator<(ElementSet, u32)> for RankFunction {
    fn from_iter<I: IntoIterator<Item = (ElementSet, u32)>>(iter: I) -> Self {
        RankFunction {
            ranks: iter.into_iter().collect(),
        }
    }
}

/// All secured subsets of `s` (at least three elements, `g`-free,
/// `F`-closed) in lexicographic order.
pub fn secured_sets(big_f: &SetMapping, g: &SetMapping, s: ElementSet) -> Vec<ElementSet> {
    closed_free_sets(big_f, g, s, 3)
}

/// Number of support elements above `max(u)`; strictly decreases along
/// proper end-extensions.
pub fn canonical_rank(s: ElementSet, u: ElementSet) -> u32 {
    u.max().map_or(s.len(), |m| s.above(m).len()) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankDefect {
    /// A secured set without a rank.
    Missing(ElementSet),
    /// A ranked set that is not secured.
    Extraneous(ElementSet),
    /// `upper` properly end-extends `lower` but does not have smaller rank.
    NotDecreasing { lower: ElementSet, upper: ElementSet },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankValidity {
    Valid,
    Invalid(RankDefect),
}

impl RankValidity {
    pub fn is_valid(&self) -> bool {
        matches!(self, RankValidity::Valid)
    }
}

fn arity_two(big_f: &SetMapping) -> Result<()> {
    if big_f.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: big_f.arity(),
        });
    }
    Ok(())
}

/// First decrease violation among immediate end-extensions. Longer
/// end-extensions pass through secured intermediate sets, since being
/// closed and free is inherited by subsets.
fn first_decrease_violation<R>(s: ElementSet, secured: &[ElementSet], is_secured: &HashSet<ElementSet>, rank: R) -> Option<RankDefect>
where
    R: Fn(ElementSet) -> u32,
{
    for &u in secured {
        let top = u.max().expect("secured sets are nonempty");
        for z in s.above(top) {
            let v = u.with(z);
            if is_secured.contains(&v) && rank(u) <= rank(v) {
                return Some(RankDefect::NotDecreasing { lower: u, upper: v });
            }
        }
    }
    None
}

/// Valid iff `r` is defined exactly on the secured subsets of `s` and
/// strictly decreases under proper end-extension.
pub fn check_ranked_condition(big_f: &SetMapping, s: ElementSet, g: &SetMapping, r: &RankFunction) -> Result<RankValidity> {
    arity_two(big_f)?;
    check_containment(big_f, s, g)?;
    let secured = secured_sets(big_f, g, s);
    let lookup: HashSet<ElementSet> = secured.iter().copied().collect();
    if let Some(&u) = secured.iter().find(|&&u| !r.contains(u)) {
        return Ok(RankValidity::Invalid(RankDefect::Missing(u)));
    }
    if let Some((u, _)) = r.sorted().into_iter().find(|(u, _)| !lookup.contains(u)) {
        return Ok(RankValidity::Invalid(RankDefect::Extraneous(u)));
    }
    let violation = first_decrease_violation(s, &secured, &lookup, |u| r.get(u).expect("domain checked"));
    Ok(match violation {
        None => RankValidity::Valid,
        Some(defect) => RankValidity::Invalid(defect),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Completion {
    Completed(RankFunction),
    /// No natural-number ranks work; the named set's lower bound collides
    /// with a fixed rank above it.
    Infeasible(ElementSet),
}

/// Extends `partial` to every secured subset of `s`. New sets first get
/// [`canonical_rank`]; when that clashes with the fixed ranks, the least
/// ranks compatible with every end-extension below them are used instead,
/// and if even those clash no completion exists.
pub fn rank_completion(big_f: &SetMapping, s: ElementSet, g: &SetMapping, partial: &RankFunction) -> Result<Completion> {
    arity_two(big_f)?;
    check_containment(big_f, s, g)?;
    let secured = secured_sets(big_f, g, s);
    let lookup: HashSet<ElementSet> = secured.iter().copied().collect();

    let fixed = partial.sorted();
    if let Some((u, _)) = fixed.iter().find(|(u, _)| !lookup.contains(u)) {
        return Err(Error::InconsistentRanks(format!("{u} is not secured")));
    }
    for &(u, ru) in &fixed {
        for &(v, rv) in &fixed {
            if u.is_properly_end_extended_by(v) && ru <= rv {
                return Err(Error::InconsistentRanks(format!(
                    "r({u}) = {ru} but its end-extension {v} has rank {rv}"
                )));
            }
        }
    }

    let canonical: RankFunction = secured
        .iter()
        .map(|&u| (u, partial.get(u).unwrap_or_else(|| canonical_rank(s, u))))
        .collect();
    if first_decrease_violation(s, &secured, &lookup, |u| canonical.get(u).unwrap()).is_none() {
        return Ok(Completion::Completed(canonical));
    }

    // least labels: larger sets first, since immediate extensions are one bigger
    let mut by_size = secured.clone();
    by_size.sort_by(|a, b| b.len().cmp(&a.len()).then(a.lex_cmp(*b)));
    let mut least = RankFunction::new();
    for &w in &by_size {
        if let Some(r) = partial.get(w) {
            least.insert(w, r);
            continue;
        }
        let top = w.max().expect("nonempty");
        let bound = s
            .above(top)
            .iter()
            .map(|z| w.with(z))
            .filter(|v| lookup.contains(v))
            .map(|v| least.get(v).expect("bigger sets already labelled") + 1)
            .max()
            .unwrap_or(0);
        least.insert(w, bound);
    }
    Ok(
        match first_decrease_violation(s, &secured, &lookup, |u| least.get(u).unwrap()) {
            None => Completion::Completed(least),
            Some(RankDefect::NotDecreasing { upper, .. }) => Completion::Infeasible(upper),
            Some(_) => unreachable!("only decrease defects arise here"),
        },
    )
}

/// A ranked pair condition `(s, g, r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedCondition {
    ambient: Arc<SetMapping>,
    support: ElementSet,
    g: SetMapping,
    r: RankFunction,
}

impl RankedCondition {
    pub fn new(ambient: Arc<SetMapping>, support: ElementSet, g: SetMapping, r: RankFunction) -> Result<Self> {
        match check_ranked_condition(&ambient, support, &g, &r)? {
            RankValidity::Valid => Ok(RankedCondition { ambient, support, g, r }),
            RankValidity::Invalid(defect) => Err(Error::InvalidCondition(format!("{defect:?}"))),
        }
    }

    /// Completes `g` with the canonical ranks.
    pub fn with_canonical_ranks(ambient: Arc<SetMapping>, support: ElementSet, g: SetMapping) -> Result<Self> {
        let r = secured_sets(&ambient, &g, support)
            .into_iter()
            .map(|u| (u, canonical_rank(support, u)))
            .collect();
        RankedCondition::new(ambient, support, g, r)
    }

    pub fn ambient(&self) -> &Arc<SetMapping> {
        &self.ambient
    }

    pub fn g(&self) -> &SetMapping {
        &self.g
    }

    pub fn ranks(&self) -> &RankFunction {
        &self.r
    }

    /// Support, mapping and ranks all extend those of `other`.
    pub fn extends(&self, other: &RankedCondition) -> bool {
        other.support.is_subset(self.support)
            && self.g.agrees_on(&other.g, other.support)
            && other.r.sorted().into_iter().all(|(u, r)| self.r.get(u) == Some(r))
    }
}

impl DeltaCondition for RankedCondition {
    fn support(&self) -> ElementSet {
        self.support
    }

    fn mapping(&self) -> &SetMapping {
        &self.g
    }

    fn agrees_on_root(&self, other: &Self, root: ElementSet) -> bool {
        self.r.restricted_to(root) == other.r.restricted_to(root)
    }
}

/// Common extension of two ranked conditions forming a Δ-system: maximal
/// images on mixed pairs, old ranks kept, new secured sets ranked by
/// [`rank_completion`].
pub fn amalgamate_theorem2(p: &RankedCondition, q: &RankedCondition) -> Result<RankedCondition> {
    if !Arc::ptr_eq(&p.ambient, &q.ambient) && p.ambient != q.ambient {
        return Err(Error::DeltaPrecondition("conditions over different ambient mappings".into()));
    }
    let big_f = p.ambient.clone();
    let pair = DeltaSystemPair::from_conditions(p.clone(), q.clone());
    if let Some(reason) = delta_precondition_failure(&pair, &big_f) {
        return Err(Error::DeltaPrecondition(reason));
    }
    let support = pair.union_support();
    let g = maximal_extension(
        &big_f,
        support,
        &[(p.support, &p.g), (q.support, &q.g)],
        |t| pair.is_mixed(t),
    )?;
    let mut partial = p.r.clone();
    for (u, r) in q.r.sorted() {
        partial.insert(u, r);
    }
    let r = match rank_completion(&big_f, support, &g, &partial)? {
        Completion::Completed(r) => r,
        Completion::Infeasible(u) => return Err(Error::AmalgamationDefect(u)),
    };
    match check_ranked_condition(&big_f, support, &g, &r)? {
        RankValidity::Valid => Ok(RankedCondition {
            ambient: big_f,
            support,
            g,
            r,
        }),
        RankValidity::Invalid(RankDefect::Missing(u) | RankDefect::Extraneous(u))
        | RankValidity::Invalid(RankDefect::NotDecreasing { upper: u, .. }) => Err(Error::AmalgamationDefect(u)),
    }
}

/// Secured sets of `cond` meeting both branches.
pub fn mixed_secured_sets(cond: &RankedCondition, left_branch: ElementSet, right_branch: ElementSet) -> Vec<ElementSet> {
    secured_sets(&cond.ambient, &cond.g, cond.support)
        .into_iter()
        .filter(|u| u.intersects(left_branch) && u.intersects(right_branch))
        .collect()
}
