use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mapping::SetMapping;
use crate::set::ElementSet;

use super::check_containment;

/// `g` lives on `[s]^2`, every image has at most one element, and
/// `g(u) ⊆ F(u) ∩ s`. Returns the pairs of `[s]^2` left with empty images.
pub fn check_pair_condition(big_f: &SetMapping, s: ElementSet, g: &SetMapping) -> Result<Vec<ElementSet>> {
    if big_f.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: big_f.arity(),
        });
    }
    check_containment(big_f, s, g)?;
    let mut empty = Vec::new();
    for pair in s.subsets_of_size(2) {
        let image = g.image(pair);
        if image.len() > 1 {
            return Err(Error::InvalidCondition(format!("image {image} of {pair} is not a singleton")));
        }
        if image.is_empty() {
            empty.push(pair);
        }
    }
    Ok(empty)
}

/// A finite condition `(s, g)` with `g : [s]^2 -> [s]^{≤1}` inside `F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCondition {
    ambient: Arc<SetMapping>,
    support: ElementSet,
    g: SetMapping,
}

impl PairCondition {
    pub fn new(ambient: Arc<SetMapping>, support: ElementSet, g: SetMapping) -> Result<Self> {
        check_pair_condition(&ambient, support, &g)?;
        Ok(PairCondition { ambient, support, g })
    }

    pub fn trivial(ambient: Arc<SetMapping>) -> Self {
        let g = ambient.empty_like();
        PairCondition {
            ambient,
            support: ElementSet::EMPTY,
            g,
        }
    }

    pub fn ambient(&self) -> &Arc<SetMapping> {
        &self.ambient
    }

    pub fn support(&self) -> ElementSet {
        self.support
    }

    pub fn g(&self) -> &SetMapping {
        &self.g
    }

    /// Pairs of the support whose image is empty.
    pub fn empty_pairs(&self) -> Vec<ElementSet> {
        self.support
            .subsets_of_size(2)
            .filter(|&p| self.g.image(p).is_empty())
            .collect()
    }

    pub fn extends(&self, other: &PairCondition) -> bool {
        other.support.is_subset(self.support) && self.g.agrees_on(&other.g, other.support)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::prefix_mapping;

    #[test]
    fn singleton_images_inside_f() {
        let f = Arc::new(prefix_mapping(5).unwrap());
        let mut g = f.empty_like();
        g.set_image(ElementSet::of(&[2, 4]), ElementSet::of(&[1])).unwrap();
        let c = PairCondition::new(f.clone(), ElementSet::of(&[1, 2, 4]), g.clone()).unwrap();
        assert_eq!(c.empty_pairs(), vec![ElementSet::of(&[1, 2]), ElementSet::of(&[1, 4])]);

        g.set_image(ElementSet::of(&[2, 4]), ElementSet::of(&[0, 1])).unwrap();
        let err = PairCondition::new(f.clone(), ElementSet::of(&[0, 1, 2, 4]), g).unwrap_err();
        assert!(matches!(err, Error::InvalidCondition(_)));
    }

    #[test]
    fn images_outside_support_are_rejected() {
        let f = Arc::new(prefix_mapping(5).unwrap());
        let mut g = f.empty_like();
        g.set_image(ElementSet::of(&[2, 4]), ElementSet::of(&[0])).unwrap();
        assert!(matches!(
            PairCondition::new(f, ElementSet::of(&[2, 4]), g),
            Err(Error::Containment { .. })
        ));
    }
}
