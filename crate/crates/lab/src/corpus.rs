//! Seeded random corpora.
//!
//! Every case draws from its own `ChaCha8Rng`, seeded with
//! [`case_seed`]`(seed, case)`, so a corpus is reproduced exactly by the
//! pair (seed, case index) and cases can be regenerated independently.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use setmap_core::constructions::{DeltaSystemPair, EnumerationScheme};
use setmap_core::forcing::{check_condition4, secured_sets, Condition4, RankFunction, RankedCondition, Validity};
use setmap_core::{ElementSet, Flags, SetMapping};

/// Name of the generator recorded in reports.
pub const GENERATOR: &str = "chacha8/splitmix";

/// Mixes a corpus seed with a case index (splitmix64 finalizer).
pub fn case_seed(seed: u64, case: u64) -> u64 {
    let mut z = seed.wrapping_add(case.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(case_seed(seed, case))
}

fn sample(rng: &mut ChaCha8Rng, s: ElementSet, p: f64) -> ElementSet {
    s.iter().filter(|_| rng.gen_bool(p)).collect()
}

/// Each legal element joins each image independently with probability
/// `density`; images are then cut to the budget by dropping their largest
/// elements.
pub fn random_mapping(rng: &mut ChaCha8Rng, n: usize, k: usize, mu: Option<usize>, flags: Flags, density: f64) -> SetMapping {
    let ground = ElementSet::below(n);
    SetMapping::from_fn(n, k, mu, flags, |t| {
        let mut image = sample(rng, flags.allowed(t).intersection(ground).difference(t), density);
        if let Some(mu) = mu {
            while image.len() >= mu.max(1) {
                image.remove(image.max().expect("nonempty"));
            }
        }
        image
    })
    .expect("generated images are legal")
}

/// Random arity-4 mapping with images inside the open interval `(x1, x2)`.
pub fn random_interval_bounded(rng: &mut ChaCha8Rng, n: usize, density: f64) -> SetMapping {
    random_mapping(rng, n, 4, None, Flags::INTERVAL, density)
}

/// Uniformly random enumeration of each `x` by its predecessors.
pub fn random_scheme(rng: &mut ChaCha8Rng, n: usize) -> EnumerationScheme {
    let enumerations = (0..n)
        .map(|x| {
            let mut v: Vec<usize> = (0..x).collect();
            v.shuffle(rng);
            v
        })
        .collect();
    EnumerationScheme::new(enumerations).expect("permutations form a scheme")
}

/// Root and two branches, disjoint, drawn from `[0, n)`.
#[derive(Debug, Clone, Copy)]
pub struct Split {
    pub root: ElementSet,
    pub left: ElementSet,
    pub right: ElementSet,
}

impl Split {
    pub fn random(rng: &mut ChaCha8Rng, n: usize, root: usize, branch: usize) -> Self {
        assert!(root + 2 * branch <= n);
        let mut points: Vec<usize> = (0..n).collect();
        points.shuffle(rng);
        Split {
            root: points[..root].iter().copied().collect(),
            left: points[root..root + branch].iter().copied().collect(),
            right: points[root + branch..root + 2 * branch].iter().copied().collect(),
        }
    }

    pub fn left_support(&self) -> ElementSet {
        self.root.union(self.left)
    }

    pub fn right_support(&self) -> ElementSet {
        self.root.union(self.right)
    }
}

/// Random images inside `F ∩ s` on the tuples of `s` not inside `skip`.
fn fill(rng: &mut ChaCha8Rng, big_f: &SetMapping, g: &mut SetMapping, s: ElementSet, skip: ElementSet, p: f64) {
    for t in s.subsets_of_size(big_f.arity()).filter(|t| !t.is_subset(skip)) {
        let image = sample(rng, big_f.image(t).intersection(s), p);
        g.set_image(t, image).expect("subset of F");
    }
}

#[derive(Debug, Clone)]
pub struct QuadInstance {
    pub split: Split,
    pub left: Condition4,
    pub right: Condition4,
    /// Blocking images added to make both sides valid.
    pub repairs: usize,
}

impl QuadInstance {
    pub fn pair(&self) -> DeltaSystemPair<Condition4> {
        DeltaSystemPair::from_conditions(self.left.clone(), self.right.clone())
    }
}

/// Two valid quadruple conditions forming a Δ-system over a random
/// interval-bounded `F` on at most `n_max` points.
///
/// Starting from sparse random images, each closed free 7-set found on
/// either side is blocked by putting the middle of its first admissible
/// 5-subchain into the image of the outer tuple. Root tuples only receive
/// root points, so the two sides keep agreeing on the root.
pub fn quad_delta_pair(rng: &mut ChaCha8Rng, n_max: usize) -> QuadInstance {
    let n = rng.gen_range(9..=n_max.max(9));
    let density = rng.gen_range(0.4..1.0);
    let big_f = random_interval_bounded(rng, n, density);
    let root = rng.gen_range(0..=5.min(n - 2));
    let branch = rng.gen_range(1..=((n - root) / 2).min(6));
    let split = Split::random(rng, n, root, branch);
    let (s1, s2) = (split.left_support(), split.right_support());

    let p = rng.gen_range(0.0..0.25);
    let mut g = big_f.empty_like();
    fill(rng, &big_f, &mut g, split.root, ElementSet::EMPTY, p);
    fill(rng, &big_f, &mut g, s1, split.root, p);
    fill(rng, &big_f, &mut g, s2, split.root, p);

    let mut repairs = 0;
    loop {
        let mut clean = true;
        for s in [s1, s2] {
            let verdict = check_condition4(&big_f, s, &g.restrict(s)).expect("images inside F and the support");
            if let Validity::Invalid(b) = verdict {
                clean = false;
                repairs += 1;
                let (d, outer) = b
                    .subsets_of_size(5)
                    .map(|chain| {
                        let d = chain.nth(2).expect("five points");
                        (d, chain.without(d))
                    })
                    .find(|&(d, outer)| !outer.is_subset(split.root) || split.root.contains(d))
                    .expect("a 7-set meeting a branch has a chain with an outer branch point");
                g.set_image(outer, g.image(outer).with(d)).expect("d lies in F(outer)");
            }
        }
        if clean {
            break;
        }
    }
    let f = Arc::new(big_f);
    QuadInstance {
        left: Condition4::new(f.clone(), s1, g.restrict(s1)).expect("repaired"),
        right: Condition4::new(f, s2, g.restrict(s2)).expect("repaired"),
        split,
        repairs,
    }
}

#[derive(Debug, Clone)]
pub struct RankedInstance {
    pub split: Split,
    pub left: RankedCondition,
    pub right: RankedCondition,
}

impl RankedInstance {
    pub fn pair(&self) -> DeltaSystemPair<RankedCondition> {
        DeltaSystemPair::from_conditions(self.left.clone(), self.right.clone())
    }
}

/// Two ranked pair conditions forming a Δ-system over a random
/// initial-segment `F` on at most `n_max` points whose root pairs have
/// images avoiding both branches. Secured sets are ranked by
/// `n - 1 - max(u)`, which depends on `u` alone, so the two sides agree on
/// the root.
pub fn ranked_delta_pair(rng: &mut ChaCha8Rng, n_max: usize) -> RankedInstance {
    let n = rng.gen_range(6..=n_max.max(6));
    let root = rng.gen_range(0..=4.min(n - 2));
    let branch = rng.gen_range(1..=((n - root) / 2).min(5));
    let split = Split::random(rng, n, root, branch);
    let branches = split.left.union(split.right);
    let density = rng.gen_range(0.4..1.0);
    let big_f = SetMapping::from_fn(n, 2, None, Flags::INITIAL_SEGMENT, |t| {
        let mut allowed = Flags::INITIAL_SEGMENT.allowed(t);
        if t.is_subset(split.root) {
            allowed = allowed.difference(branches);
        }
        sample(rng, allowed, density)
    })
    .expect("initial-segment images");

    let (s1, s2) = (split.left_support(), split.right_support());
    let p = rng.gen_range(0.0..0.4);
    let mut g = big_f.empty_like();
    fill(rng, &big_f, &mut g, split.root, ElementSet::EMPTY, p);
    fill(rng, &big_f, &mut g, s1, split.root, p);
    fill(rng, &big_f, &mut g, s2, split.root, p);

    let ranks = |s: ElementSet, g: &SetMapping| -> RankFunction {
        secured_sets(&big_f, g, s)
            .into_iter()
            .map(|u| (u, (n - 1 - u.max().expect("secured sets are nonempty")) as u32))
            .collect()
    };
    let (g1, g2) = (g.restrict(s1), g.restrict(s2));
    let (r1, r2) = (ranks(s1, &g1), ranks(s2, &g2));
    let f = Arc::new(big_f);
    RankedInstance {
        left: RankedCondition::new(f.clone(), s1, g1, r1).expect("decreasing ranks"),
        right: RankedCondition::new(f, s2, g2, r2).expect("decreasing ranks"),
        split,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use setmap_core::constructions::verify_delta_preconditions;

    #[test]
    fn cases_are_reproducible() {
        let a = random_mapping(&mut case_rng(5, 3), 8, 2, Some(3), Flags::NONE, 0.5);
        let b = random_mapping(&mut case_rng(5, 3), 8, 2, Some(3), Flags::NONE, 0.5);
        assert_eq!(a, b);
        assert!(a.tuples().all(|t| a.image(t).len() < 3));
        assert_ne!(case_seed(5, 3), case_seed(5, 4));
    }

    #[test]
    fn generated_pairs_meet_the_preconditions() {
        for case in 0..20 {
            let q = quad_delta_pair(&mut case_rng(1, case), 14);
            assert!(verify_delta_preconditions(&q.pair(), q.left.ambient()));
            let r = ranked_delta_pair(&mut case_rng(1, case), 12);
            assert!(verify_delta_preconditions(&r.pair(), r.left.ambient()));
        }
    }
}
