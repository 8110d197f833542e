use std::sync::Arc;

use crate::constructions::{delta_precondition_failure, maximal_extension, DeltaCondition, DeltaSystemPair};
use crate::error::{Error, Result};
use crate::mapping::SetMapping;
use crate::set::ElementSet;

use super::{check_containment, first_closed_free_set};

/// Size of the forbidden closed-and-free subsets.
pub const FORBIDDEN_SIZE: usize = 7;

/// Outcome of a validity check that can name a violating set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid(ElementSet),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Valid iff no 7-subset of `s` is `F`-closed and `g`-free; an invalid
/// verdict carries the lexicographically least violating 7-set.
pub fn check_condition4(big_f: &SetMapping, s: ElementSet, g: &SetMapping) -> Result<Validity> {
    if big_f.arity() != 4 {
        return Err(Error::ArityMismatch {
            expected: 4,
            got: big_f.arity(),
        });
    }
    check_containment(big_f, s, g)?;
    Ok(match first_closed_free_set(big_f, g, s, FORBIDDEN_SIZE) {
        None => Validity::Valid,
        Some(b) => Validity::Invalid(b),
    })
}

/// A quadruple condition `(s, g)` over an ambient arity-4 mapping `F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition4 {
    ambient: Arc<SetMapping>,
    support: ElementSet,
    g: SetMapping,
}

impl Condition4 {
    pub fn new(ambient: Arc<SetMapping>, support: ElementSet, g: SetMapping) -> Result<Self> {
        match check_condition4(&ambient, support, &g)? {
            Validity::Valid => Ok(Condition4 { ambient, support, g }),
            Validity::Invalid(b) => Err(Error::InvalidCondition(format!("{b} is F-closed and g-free"))),
        }
    }

    /// The condition with empty support.
    pub fn trivial(ambient: Arc<SetMapping>) -> Self {
        let g = ambient.empty_like();
        Condition4 {
            ambient,
            support: ElementSet::EMPTY,
            g,
        }
    }

    pub fn ambient(&self) -> &Arc<SetMapping> {
        &self.ambient
    }

    pub fn g(&self) -> &SetMapping {
        &self.g
    }

    /// `self ≤ other`: larger support and `g` agreeing with `other`'s on `[s]^4`.
    pub fn extends(&self, other: &Condition4) -> bool {
        other.support.is_subset(self.support) && self.g.agrees_on(&other.g, other.support)
    }
}

impl DeltaCondition for Condition4 {
    fn support(&self) -> ElementSet {
        self.support
    }

    fn mapping(&self) -> &SetMapping {
        &self.g
    }
}

/// Common extension of two quadruple conditions forming a Δ-system: the
/// union support, with every tuple meeting both branches sent to its full
/// `F`-image inside the union.
pub fn amalgamate_theorem1(p: &Condition4, q: &Condition4) -> Result<Condition4> {
    if p.ambient != q.ambient {
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
    match check_condition4(&big_f, support, &g)? {
        Validity::Valid => Ok(Condition4 {
            ambient: big_f,
            support,
            g,
        }),
        Validity::Invalid(b) => Err(Error::AmalgamationDefect(b)),
    }
}

/// Lexicographically least 5-subchain `y0<..<y4` of `b` placing both marks
/// among `{y0, y1, y3, y4}`.
pub fn position_lemma_core(b: ElementSet, mark0: usize, mark1: usize) -> Option<ElementSet> {
    if mark0 == mark1 || !b.contains(mark0) || !b.contains(mark1) {
        return None;
    }
    b.subsets_of_size(5).find(|chain| {
        let middle = chain.nth(2).expect("five elements");
        chain.contains(mark0) && chain.contains(mark1) && middle != mark0 && middle != mark1
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::interval_mapping;

    #[test]
    fn full_support_without_g_is_invalid() {
        let f = interval_mapping(7).unwrap();
        let g = f.empty_like();
        assert_eq!(
            check_condition4(&f, ElementSet::below(7), &g).unwrap(),
            Validity::Invalid(ElementSet::below(7))
        );
    }

    #[test]
    fn one_blocked_chain_makes_it_valid() {
        let f = interval_mapping(7).unwrap();
        let mut g = f.empty_like();
        g.set_image(ElementSet::of(&[0, 1, 3, 4]), ElementSet::of(&[2])).unwrap();
        assert_eq!(check_condition4(&f, ElementSet::below(7), &g).unwrap(), Validity::Valid);
    }

    #[test]
    fn small_supports_are_always_valid() {
        let f = interval_mapping(10).unwrap();
        let g = f.empty_like();
        for s in ElementSet::below(10).subsets_of_size(6).take(50) {
            assert!(check_condition4(&f, s, &g).unwrap().is_valid());
        }
    }

    #[test]
    fn containment_violation_is_an_error() {
        let f = interval_mapping(8).unwrap();
        let mut g = f.empty_like();
        g.set_image(ElementSet::of(&[0, 1, 3, 4]), ElementSet::of(&[2])).unwrap();
        // 2 is outside the support
        let err = check_condition4(&f, ElementSet::of(&[0, 1, 3, 4, 5]), &g).unwrap_err();
        assert!(matches!(err, Error::Containment { .. }));
    }

    #[test]
    fn position_lemma_examples() {
        let b = ElementSet::below(7);
        assert_eq!(position_lemma_core(b, 0, 6), Some(ElementSet::of(&[0, 1, 2, 3, 6])));
        assert_eq!(position_lemma_core(b, 2, 3), Some(ElementSet::of(&[2, 3, 4, 5, 6])));
        let top = position_lemma_core(b, 5, 6).unwrap();
        assert_eq!(top.nth(3), Some(5));
        assert_eq!(top.nth(4), Some(6));
        assert_eq!(position_lemma_core(ElementSet::below(6), 2, 3), None);
        assert_eq!(position_lemma_core(b, 2, 2), None);
    }

    #[test]
    fn amalgamating_small_conditions() {
        let f = Arc::new(interval_mapping(8).unwrap());
        let p = Condition4::new(f.clone(), ElementSet::of(&[0, 1, 2]), f.empty_like()).unwrap();
        let q = Condition4::new(f.clone(), ElementSet::of(&[0, 4, 5]), f.empty_like()).unwrap();
        let r = amalgamate_theorem1(&p, &q).unwrap();
        assert_eq!(r.support, ElementSet::of(&[0, 1, 2, 4, 5]));
        assert!(r.extends(&p) && r.extends(&q));
    }

    #[test]
    fn amalgamation_blocks_the_full_chain() {
        // left {0,1,2,3} and right {4,5,6}: the union is F-closed, so the
        // mixed images must kill every 7-set
        let f = Arc::new(interval_mapping(7).unwrap());
        let p = Condition4::new(f.clone(), ElementSet::of(&[0, 1, 2, 3]), f.empty_like()).unwrap();
        let q = Condition4::new(f.clone(), ElementSet::of(&[4, 5, 6]), f.empty_like()).unwrap();
        let r = amalgamate_theorem1(&p, &q).unwrap();
        assert_eq!(r.g.image(ElementSet::of(&[0, 1, 4, 5])), ElementSet::of(&[2, 3]));
        assert!(r.extends(&p) && r.extends(&q));
    }
}
