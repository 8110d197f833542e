//! Explicit set mappings and the Δ-system amalgamation helpers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapping::{Flags, SetMapping};
use crate::set::ElementSet;

/// `f({x0,x1,x2,x3}) = (x1,x2)`: every 4-set is free, no 5-set is.
pub fn interval_mapping(n: usize) -> Result<SetMapping> {
    if n < 4 {
        return Err(Error::TooSmall {
            what: "ground set size",
            min: 4,
            got: n,
        });
    }
    SetMapping::from_fn(n, 4, None, Flags::INTERVAL, |t| Flags::INTERVAL.allowed(t))
}

/// `f({x,y}) = [0,x)` for `x < y`: pairs are free, triples never are.
pub fn prefix_mapping(n: usize) -> Result<SetMapping> {
    if n < 2 {
        return Err(Error::TooSmall {
            what: "ground set size",
            min: 2,
            got: n,
        });
    }
    SetMapping::from_fn(n, 2, None, Flags::INITIAL_SEGMENT, |t| {
        Flags::INITIAL_SEGMENT.allowed(t)
    })
}

/// For each `x`, an enumeration `γ_x` of the predecessors `{0, .., x-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SchemeDoc", into = "SchemeDoc")]
pub struct EnumerationScheme {
    enumerations: Vec<Vec<usize>>,
    /// `positions[y][x]` is the index of `x` in `γ_y`.
    positions: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SchemeDoc {
    enumerations: Vec<Vec<usize>>,
    n: usize,
}

impl TryFrom<SchemeDoc> for EnumerationScheme {
    type Error = Error;

    fn try_from(doc: SchemeDoc) -> Result<Self> {
        if doc.enumerations.len() != doc.n {
            return Err(Error::MalformedScheme(format!(
                "expected {} enumerations, got {}",
                doc.n,
                doc.enumerations.len()
            )));
        }
        EnumerationScheme::new(doc.enumerations)
    }
}

impl From<EnumerationScheme> for SchemeDoc {
    fn from(s: EnumerationScheme) -> Self {
        SchemeDoc {
            n: s.enumerations.len(),
            enumerations: s.enumerations,
        }
    }
}

impl EnumerationScheme {
    /// `enumerations[x]` must be a permutation of `0..x`.
    pub fn new(enumerations: Vec<Vec<usize>>) -> Result<Self> {
        let n = enumerations.len();
        if n == 0 || n > crate::set::MAX_GROUND {
            return Err(Error::MalformedScheme(format!("ground size {n} out of range")));
        }
        let mut positions = Vec::with_capacity(n);
        for (x, gamma) in enumerations.iter().enumerate() {
            if gamma.len() != x {
                return Err(Error::MalformedScheme(format!(
                    "enumeration of {x} has length {}",
                    gamma.len()
                )));
            }
            let mut pos = vec![usize::MAX; x];
            for (i, &y) in gamma.iter().enumerate() {
                if y >= x || pos[y] != usize::MAX {
                    return Err(Error::MalformedScheme(format!(
                        "enumeration of {x} is not a bijection onto its predecessors"
                    )));
                }
                pos[y] = i;
            }
            positions.push(pos);
        }
        Ok(EnumerationScheme {
            enumerations,
            positions,
        })
    }

    /// Every `γ_x` in increasing order.
    pub fn identity(n: usize) -> Result<Self> {
        EnumerationScheme::new((0..n).map(|x| (0..x).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.enumerations.len()
    }

    pub fn enumeration(&self, x: usize) -> &[usize] {
        &self.enumerations[x]
    }

    /// `i(x,y)`: the index of `x` in `γ_y`, for `x < y`.
    pub fn index(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < y);
        self.positions[y][x]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scheme serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `f({x,y}) = {γ_x(i) : i ≤ i(x,y)}`; indices past the end of `γ_x` are
/// ignored.
pub fn enumeration_mapping(scheme: &EnumerationScheme) -> Result<SetMapping> {
    let n = scheme.n();
    if n < 2 {
        return Err(Error::MalformedScheme("need at least two elements".into()));
    }
    SetMapping::from_fn(n, 2, None, Flags::INITIAL_SEGMENT, |t| {
        let x = t.min().expect("pair");
        let y = t.max().expect("pair");
        let upto = scheme.index(x, y);
        scheme.enumeration(x).iter().take(upto + 1).copied().collect()
    })
}

/// The indices `i(x_j, x_{j+1})` along consecutive elements of `h`.
pub fn descent_chain(scheme: &EnumerationScheme, h: ElementSet) -> Vec<usize> {
    let elems = h.to_vec();
    elems.windows(2).map(|w| scheme.index(w[0], w[1])).collect()
}

/// Whether a sequence is strictly decreasing.
pub fn strictly_decreasing(seq: &[usize]) -> bool {
    seq.windows(2).all(|w| w[0] > w[1])
}

/// A condition that can take part in a Δ-system amalgamation.
pub trait DeltaCondition {
    fn support(&self) -> ElementSet;
    fn mapping(&self) -> &SetMapping;
    /// Extra agreement on the root beyond the mapping (ranks, for instance).
    fn agrees_on_root(&self, _other: &Self, _root: ElementSet) -> bool {
        true
    }
}

/// Two conditions with supports `root ∪ left_branch` and `root ∪ right_branch`.
#[derive(Debug, Clone)]
pub struct DeltaSystemPair<C> {
    pub root: ElementSet,
    pub left_branch: ElementSet,
    pub right_branch: ElementSet,
    pub left: C,
    pub right: C,
}

impl<C: DeltaCondition> DeltaSystemPair<C> {
    /// Reads the root and branches off the two supports.
    pub fn from_conditions(left: C, right: C) -> Self {
        let root = left.support().intersection(right.support());
        DeltaSystemPair {
            root,
            left_branch: left.support().difference(root),
            right_branch: right.support().difference(root),
            left,
            right,
        }
    }

    pub fn union_support(&self) -> ElementSet {
        self.root.union(self.left_branch).union(self.right_branch)
    }

    /// A tuple is mixed when it meets both branches.
    pub fn is_mixed(&self, tuple: ElementSet) -> bool {
        tuple.intersects(self.left_branch) && tuple.intersects(self.right_branch)
    }
}

/// Reason a Δ-system pair fails [`verify_delta_preconditions`], if any.
pub fn delta_precondition_failure<C: DeltaCondition>(pair: &DeltaSystemPair<C>, big_f: &SetMapping) -> Option<String> {
    let (a, b, b2) = (pair.root, pair.left_branch, pair.right_branch);
    if a.intersects(b) || a.intersects(b2) || b.intersects(b2) {
        return Some("root and branches are not pairwise disjoint".into());
    }
    if pair.left.support() != a.union(b) || pair.right.support() != a.union(b2) {
        return Some("supports do not split as root plus branch".into());
    }
    if let Some(t) = pair.left.mapping().first_disagreement_on(pair.right.mapping(), a) {
        return Some(format!("mappings differ on root tuple {t}"));
    }
    if big_f.arity() == 2 {
        let branches = b.union(b2);
        if let Some(t) = a.subsets_of_size(2).find(|&t| big_f.image(t).intersects(branches)) {
            return Some(format!("F-image of root pair {t} meets a branch"));
        }
    }
    if !pair.left.agrees_on_root(&pair.right, a) {
        return Some("ranks differ on the root".into());
    }
    None
}

/// The thinning conclusions needed before amalgamating: disjoint root and
/// branches, identical restrictions to the root, and for pair mappings,
/// root images that avoid both branches.
pub fn verify_delta_preconditions<C: DeltaCondition>(pair: &DeltaSystemPair<C>, big_f: &SetMapping) -> bool {
    delta_precondition_failure(pair, big_f).is_none()
}

/// Extends the `old` partial mappings (each given with its support) to
/// `support`: mixed tuples get `F(u) ∩ support`, every other tuple keeps the
/// value of the old mapping whose support contains it.
pub fn maximal_extension<M>(
    big_f: &SetMapping,
    support: ElementSet,
    old: &[(ElementSet, &SetMapping)],
    mixed: M,
) -> Result<SetMapping>
where
    M: Fn(ElementSet) -> bool,
{
    let mut g = big_f.empty_like();
    for tuple in support.subsets_of_size(big_f.arity()) {
        let image = if mixed(tuple) {
            big_f.image(tuple).intersection(support)
        } else {
            let mut found: Option<ElementSet> = None;
            for (s, m) in old {
                if tuple.is_subset(*s) {
                    let img = m.image(tuple);
                    match found {
                        Some(prev) if prev != img => return Err(Error::Disagreement(tuple)),
                        _ => found = Some(img),
                    }
                }
            }
            found.unwrap_or_default()
        };
        g.set_image(tuple, image)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicates::is_free;

    struct Plain(ElementSet, SetMapping);

    impl DeltaCondition for Plain {
        fn support(&self) -> ElementSet {
            self.0
        }
        fn mapping(&self) -> &SetMapping {
            &self.1
        }
    }

    fn small_scheme() -> EnumerationScheme {
        EnumerationScheme::new(vec![vec![], vec![0], vec![1, 0]]).unwrap()
    }

    #[test]
    fn interval_mapping_images() {
        let f = interval_mapping(6).unwrap();
        assert_eq!(f.image(ElementSet::of(&[0, 2, 4, 5])), ElementSet::of(&[3]));
        assert_eq!(f.image(ElementSet::of(&[0, 1, 2, 3])), ElementSet::EMPTY);
        assert!(interval_mapping(3).is_err());
    }

    #[test]
    fn prefix_mapping_images() {
        let f = prefix_mapping(4).unwrap();
        assert_eq!(f.image(ElementSet::of(&[2, 3])), ElementSet::of(&[0, 1]));
        assert_eq!(f.image(ElementSet::of(&[0, 3])), ElementSet::EMPTY);
        assert!(prefix_mapping(1).is_err());
    }

    #[test]
    fn enumeration_mapping_small_scheme() {
        let scheme = small_scheme();
        assert_eq!(scheme.index(1, 2), 0);
        let f = enumeration_mapping(&scheme).unwrap();
        assert_eq!(f.image(ElementSet::of(&[1, 2])), ElementSet::of(&[0]));
        assert_eq!(f.image(ElementSet::of(&[0, 1])), ElementSet::EMPTY);
        assert!(!is_free(&f, ElementSet::of(&[0, 1, 2])).unwrap());
        assert_eq!(descent_chain(&scheme, ElementSet::of(&[1, 2])), vec![0]);
    }

    #[test]
    fn malformed_schemes_are_rejected() {
        assert!(EnumerationScheme::new(vec![vec![], vec![1]]).is_err());
        assert!(EnumerationScheme::new(vec![vec![], vec![0], vec![0, 0]]).is_err());
        assert!(EnumerationScheme::new(vec![vec![], vec![0, 1]]).is_err());
        assert!(EnumerationScheme::from_json(r#"{"n":3,"enumerations":[[],[0]]}"#).is_err());
    }

    #[test]
    fn scheme_json_round_trip() {
        let s = small_scheme();
        let text = s.to_json();
        assert!(text.find("enumerations").unwrap() < text.find("\"n\"").unwrap());
        assert_eq!(EnumerationScheme::from_json(&text).unwrap(), s);
    }

    #[test]
    fn maximal_extension_on_quadruples() {
        let f = interval_mapping(6).unwrap();
        let b = ElementSet::of(&[0, 1, 2]);
        let b2 = ElementSet::of(&[3, 4, 5]);
        let g1 = f.empty_like();
        let g2 = f.empty_like();
        let support = b.union(b2);
        let g = maximal_extension(&f, support, &[(b, &g1), (b2, &g2)], |t| t.intersects(b) && t.intersects(b2)).unwrap();
        assert_eq!(g.image(ElementSet::of(&[0, 1, 4, 5])), ElementSet::of(&[2, 3]));
    }

    #[test]
    fn maximal_extension_keeps_old_values() {
        let f = interval_mapping(8).unwrap();
        let left = ElementSet::of(&[0, 1, 2, 3, 4]);
        let right = ElementSet::of(&[5, 6, 7]);
        let mut g1 = f.empty_like();
        g1.set_image(ElementSet::of(&[0, 1, 3, 4]), ElementSet::of(&[2])).unwrap();
        let g2 = f.empty_like();
        let mixed = |t: ElementSet| t.intersects(left) && t.intersects(right);
        let g = maximal_extension(&f, left.union(right), &[(left, &g1), (right, &g2)], mixed).unwrap();
        assert!(g.agrees_on(&g1, left));
        assert_eq!(g.image(ElementSet::of(&[1, 2, 4, 6])), ElementSet::of(&[3]));
    }

    #[test]
    fn maximal_extension_pairs_and_disagreement() {
        let f = prefix_mapping(6).unwrap();
        let a = ElementSet::of(&[0, 1]);
        let left = a.with(2);
        let right = a.with(4);
        let mut g1 = f.empty_like();
        let g2 = f.empty_like();
        let mixed = |t: ElementSet| t.contains(2) && t.contains(4);
        let support = left.union(right);
        let g = maximal_extension(&f, support, &[(left, &g1), (right, &g2)], mixed).unwrap();
        assert_eq!(g.image(ElementSet::of(&[2, 4])), ElementSet::of(&[0, 1]));
        g1.set_image(ElementSet::of(&[0, 1]), ElementSet::EMPTY).unwrap();
        let mut g3 = f.empty_like();
        let mut conflict = g1.clone();
        conflict.set_image(ElementSet::of(&[1, 2]), ElementSet::of(&[0])).unwrap();
        g3.set_image(ElementSet::of(&[1, 2]), ElementSet::EMPTY).unwrap();
        assert_eq!(
            maximal_extension(&f, support, &[(left, &conflict), (left, &g3)], mixed),
            Err(Error::Disagreement(ElementSet::of(&[1, 2])))
        );
    }

    #[test]
    fn delta_preconditions() {
        let f = prefix_mapping(6).unwrap();
        let g = f.empty_like();
        // empty root: root clauses hold vacuously
        let pair = DeltaSystemPair::from_conditions(
            Plain(ElementSet::of(&[0, 1]), g.clone()),
            Plain(ElementSet::of(&[2, 3]), g.clone()),
        );
        assert!(pair.root.is_empty());
        assert!(verify_delta_preconditions(&pair, &f));
        // root {2,3}, branch containing 1: F({2,3}) = {0,1} meets the branch
        let pair = DeltaSystemPair::from_conditions(
            Plain(ElementSet::of(&[1, 2, 3]), g.clone()),
            Plain(ElementSet::of(&[2, 3, 5]), g.clone()),
        );
        assert_eq!(pair.root, ElementSet::of(&[2, 3]));
        assert!(!verify_delta_preconditions(&pair, &f));
        // identical conditions with relabelled branches
        let pair = DeltaSystemPair::from_conditions(
            Plain(ElementSet::of(&[0, 1, 3]), g.clone()),
            Plain(ElementSet::of(&[0, 1, 4]), g),
        );
        assert!(verify_delta_preconditions(&pair, &f));
    }
}
