//! Building a mapping by meeting a list of dense requirements one at a time.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mapping::SetMapping;
use crate::set::ElementSet;

use super::pair::check_pair_condition;
use super::quad::{check_condition4, Validity};
use super::ranked::{check_ranked_condition, rank_completion, Completion, RankFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// Quadruple conditions with no closed-and-free 7-set.
    Quad,
    /// Pair conditions carrying a rank function.
    Ranked,
    /// Pair conditions with at-most-singleton images.
    Pair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    /// `D_α`: `α` belongs to the support.
    Include(usize),
    /// `g(pair) = {target}` (pair flavor only).
    Kill { target: usize, pair: ElementSet },
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Include(a) => write!(f, "D_{a}"),
            Goal::Kill { target, pair } => write!(f, "g({pair}) = {{{target}}}"),
        }
    }
}

/// Result of [`generic_build`]: the union mapping and every intermediate
/// condition along the extension chain.
#[derive(Debug, Clone)]
pub struct GenericBuild {
    pub flavor: Flavor,
    pub mapping: SetMapping,
    pub support: ElementSet,
    /// `(support, g)` after each extension step, starting from the empty condition.
    pub stages: Vec<(ElementSet, SetMapping)>,
    /// Final ranks (ranked flavor only).
    pub ranks: Option<RankFunction>,
    /// Pairs left with empty images (pair flavor only).
    pub empty_pairs: Vec<ElementSet>,
}

struct Builder<'a> {
    flavor: Flavor,
    big_f: &'a SetMapping,
    universe: ElementSet,
    support: ElementSet,
    g: SetMapping,
    ranks: RankFunction,
    kills: HashMap<ElementSet, usize>,
    stages: Vec<(ElementSet, SetMapping)>,
}

impl Builder<'_> {
    fn stuck(&self, goal: Goal) -> Error {
        Error::GoalUnreachable {
            goal: goal.to_string(),
            support: self.support,
        }
    }

    /// Adds `alpha` to the support, giving every new tuple its largest image
    /// the flavor allows. For the pair flavor the step also pulls in the
    /// targets of killing goals whose pair becomes part of the support.
    fn include(&mut self, alpha: usize, goal: Goal) -> Result<()> {
        if self.support.contains(alpha) {
            return Ok(());
        }
        let mut support = self.support.with(alpha);
        if self.flavor == Flavor::Pair {
            loop {
                let missing = self
                    .kills
                    .iter()
                    .filter(|(pair, t)| pair.is_subset(support) && !support.contains(**t))
                    .map(|(_, &t)| t)
                    .collect::<ElementSet>();
                if missing.is_empty() {
                    break;
                }
                support = support.union(missing);
            }
        }
        if !support.is_subset(self.universe) {
            return Err(self.stuck(goal));
        }
        let mut g = self.g.clone();
        let old = self.support;
        for tuple in support.subsets_of_size(self.big_f.arity()).filter(|t| !t.is_subset(old)) {
            let available = self.big_f.image(tuple).intersection(support);
            let image = match self.flavor {
                Flavor::Quad | Flavor::Ranked => available,
                Flavor::Pair => match self.kills.get(&tuple) {
                    Some(&t) if available.contains(t) => ElementSet::singleton(t),
                    Some(_) => return Err(self.stuck(goal)),
                    None => available.min().map(ElementSet::singleton).unwrap_or_default(),
                },
            };
            g.set_image(tuple, image)?;
        }
        match self.flavor {
            Flavor::Quad => {
                if let Validity::Invalid(_) = check_condition4(self.big_f, support, &g)? {
                    return Err(self.stuck(goal));
                }
            }
            Flavor::Ranked => {
                let ranks = match rank_completion(self.big_f, support, &g, &self.ranks)? {
                    Completion::Completed(r) => r,
                    Completion::Infeasible(_) => return Err(self.stuck(goal)),
                };
                if !check_ranked_condition(self.big_f, support, &g, &ranks)?.is_valid() {
                    return Err(self.stuck(goal));
                }
                self.ranks = ranks;
            }
            Flavor::Pair => {
                check_pair_condition(self.big_f, support, &g)?;
            }
        }
        self.support = support;
        self.g = g;
        self.stages.push((self.support, self.g.clone()));
        Ok(())
    }

    fn kill(&mut self, target: usize, pair: ElementSet) -> Result<()> {
        let goal = Goal::Kill { target, pair };
        for x in pair.union(ElementSet::singleton(target)) {
            self.include(x, goal)?;
        }
        if self.g.image(pair) == ElementSet::singleton(target) {
            Ok(())
        } else {
            Err(self.stuck(goal))
        }
    }
}

/// Extends the empty condition of the given flavor to meet every goal:
/// inclusion goals in ascending order of `α`, then killing goals in the
/// given order. Each step adds one new support element with maximal images
/// on the new tuples; for the pair flavor, a killing goal fixes the value of
/// its pair when that pair is created.
pub fn generic_build(flavor: Flavor, big_f: &Arc<SetMapping>, universe: ElementSet, goals: &[Goal]) -> Result<GenericBuild> {
    let required = match flavor {
        Flavor::Quad => 4,
        Flavor::Ranked | Flavor::Pair => 2,
    };
    if big_f.arity() != required {
        return Err(Error::ArityMismatch {
            expected: required,
            got: big_f.arity(),
        });
    }
    big_f.ground().check(universe)?;

    let mut includes: Vec<usize> = Vec::new();
    let mut kills = Vec::new();
    let mut kill_index = HashMap::new();
    for &goal in goals {
        match goal {
            Goal::Include(a) => includes.push(a),
            Goal::Kill { target, pair } => {
                if flavor != Flavor::Pair || pair.len() != 2 {
                    return Err(Error::GoalUnreachable {
                        goal: goal.to_string(),
                        support: ElementSet::EMPTY,
                    });
                }
                if kill_index.insert(pair, target).is_some_and(|prev| prev != target) {
                    return Err(Error::GoalUnreachable {
                        goal: goal.to_string(),
                        support: ElementSet::EMPTY,
                    });
                }
                kills.push((target, pair));
            }
        }
    }
    includes.sort_unstable();
    includes.dedup();

    let g = match flavor {
        Flavor::Pair => SetMapping::empty(big_f.n(), 2, Some(2), big_f.flags())?,
        _ => big_f.empty_like(),
    };
    let mut builder = Builder {
        flavor,
        big_f,
        universe,
        support: ElementSet::EMPTY,
        stages: vec![(ElementSet::EMPTY, g.clone())],
        g,
        ranks: RankFunction::new(),
        kills: kill_index,
    };
    for a in includes {
        builder.include(a, Goal::Include(a))?;
    }
    for (target, pair) in kills {
        builder.kill(target, pair)?;
    }
    let empty_pairs = if flavor == Flavor::Pair {
        check_pair_condition(big_f, builder.support, &builder.g)?
    } else {
        Vec::new()
    };
    Ok(GenericBuild {
        flavor,
        support: builder.support,
        ranks: (flavor == Flavor::Ranked).then_some(builder.ranks),
        mapping: builder.g,
        stages: builder.stages,
        empty_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{interval_mapping, prefix_mapping};
    use crate::mapping::Flags;
    use crate::predicates::{is_f_closed, is_g_free};

    fn complete(n: usize) -> Arc<SetMapping> {
        Arc::new(SetMapping::from_fn(n, 2, None, Flags::NONE, |t| ElementSet::below(n).difference(t)).unwrap())
    }

    fn includes(universe: ElementSet) -> Vec<Goal> {
        universe.iter().map(Goal::Include).collect()
    }

    #[test]
    fn pair_flavor_builds_a_total_singleton_mapping() {
        let f = Arc::new(prefix_mapping(6).unwrap());
        let u = ElementSet::below(6);
        let built = generic_build(Flavor::Pair, &f, u, &includes(u)).unwrap();
        assert_eq!(built.support, u);
        assert!(built.mapping.is_contained_in(&f));
        for (s, g) in &built.stages {
            assert!(built.mapping.agrees_on(g, *s));
        }
        for pair in u.subsets_of_size(2) {
            let img = built.mapping.image(pair);
            assert!(img.len() <= 1);
            assert_eq!(img.is_empty(), pair.min() == Some(0));
        }
        assert_eq!(built.empty_pairs.len(), 5);
    }

    #[test]
    fn quad_flavor_on_small_universe() {
        let f = Arc::new(interval_mapping(6).unwrap());
        let u = ElementSet::below(6);
        let built = generic_build(Flavor::Quad, &f, u, &includes(u)).unwrap();
        assert_eq!(built.support, u);
        assert_eq!(built.stages.len(), 7);
        for (s, g) in &built.stages {
            assert!(built.mapping.agrees_on(g, *s));
        }
    }

    #[test]
    fn quad_flavor_stays_valid_on_larger_universes() {
        let f = Arc::new(interval_mapping(12).unwrap());
        let u = ElementSet::below(12);
        let built = generic_build(Flavor::Quad, &f, u, &includes(u)).unwrap();
        assert!(check_condition4(&f, u, &built.mapping).unwrap().is_valid());
    }

    #[test]
    fn ranked_flavor_keeps_a_valid_rank() {
        let f = Arc::new(prefix_mapping(8).unwrap());
        let u = ElementSet::of(&[0, 2, 3, 5, 7]);
        let built = generic_build(Flavor::Ranked, &f, u, &includes(u)).unwrap();
        let ranks = built.ranks.as_ref().unwrap();
        assert!(check_ranked_condition(&f, u, &built.mapping, ranks).unwrap().is_valid());
        // maximal images leave no closed free triple
        for t in u.subsets_of_size(3) {
            assert!(!(is_f_closed(&f, t).unwrap() && is_g_free(&built.mapping, t).unwrap()));
        }
    }

    #[test]
    fn kill_goals_fix_pair_values() {
        let f = complete(4);
        let u = ElementSet::below(4);
        let mut goals = includes(u);
        goals.push(Goal::Kill {
            target: 0,
            pair: ElementSet::of(&[2, 3]),
        });
        let built = generic_build(Flavor::Pair, &f, u, &goals).unwrap();
        assert_eq!(built.mapping.image(ElementSet::of(&[2, 3])), ElementSet::of(&[0]));
    }

    #[test]
    fn kill_targets_above_the_pair_join_in_the_same_step() {
        let f = complete(5);
        let u = ElementSet::below(5);
        let mut goals = includes(u);
        goals.push(Goal::Kill {
            target: 4,
            pair: ElementSet::of(&[0, 1]),
        });
        let built = generic_build(Flavor::Pair, &f, u, &goals).unwrap();
        assert_eq!(built.mapping.image(ElementSet::of(&[0, 1])), ElementSet::of(&[4]));
        assert_eq!(built.stages[2].0, ElementSet::of(&[0, 1, 4]));
    }

    #[test]
    fn unreachable_goals_are_reported() {
        let f = complete(4);
        let u = ElementSet::of(&[0, 1, 2]);
        let err = generic_build(Flavor::Pair, &f, u, &[Goal::Include(3)]).unwrap_err();
        assert!(matches!(err, Error::GoalUnreachable { .. }));
        let clash = [
            Goal::Kill {
                target: 0,
                pair: ElementSet::of(&[1, 2]),
            },
            Goal::Kill {
                target: 3,
                pair: ElementSet::of(&[1, 2]),
            },
        ];
        assert!(generic_build(Flavor::Pair, &f, ElementSet::below(4), &clash).is_err());
        let q = Arc::new(interval_mapping(6).unwrap());
        assert!(generic_build(Flavor::Pair, &q, ElementSet::below(6), &[]).is_err());
    }
}
