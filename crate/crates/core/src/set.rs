//! Finite ground sets and bitmask-backed element sets.
//!
//! A ground set of size `n` stands for the ordinal `n = {0, .., n-1}`; every
//! subset the lab quantifies over is an [`ElementSet`], a 64-bit mask whose
//! iteration order is the natural order of the elements.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_GROUND: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    size: usize,
}

impl GroundSet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > MAX_GROUND {
            return Err(Error::GroundSize(size));
        }
        Ok(GroundSet { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// The whole ground set as an element set.
    pub fn full(&self) -> ElementSet {
        ElementSet::below(self.size)
    }

    pub fn contains(&self, set: ElementSet) -> bool {
        set.is_subset(self.full())
    }

    /// Errors with the first element of `set` lying outside the ground set.
    pub fn check(&self, set: ElementSet) -> Result<()> {
        match set.difference(self.full()).min() {
            None => Ok(()),
            Some(element) => Err(Error::OutOfRange {
                element,
                size: self.size,
            }),
        }
    }
}

/// An ordered subset of `{0, .., 63}`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ElementSet(u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        ElementSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(x: usize) -> Self {
        debug_assert!(x < MAX_GROUND);
        ElementSet(1u64 << x)
    }

    /// `{0, .., n-1}`.
    pub fn below(n: usize) -> Self {
        if n >= MAX_GROUND {
            ElementSet(u64::MAX)
        } else {
            ElementSet((1u64 << n) - 1)
        }
    }

    /// The open integer interval `(lo, hi)`.
    pub fn open_interval(lo: usize, hi: usize) -> Self {
        if hi <= lo + 1 {
            return ElementSet::EMPTY;
        }
        ElementSet::below(hi).difference(ElementSet::below(lo + 1))
    }

    /// Builds a set from arbitrary elements; fails on anything `>= 64`.
    pub fn try_from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Result<Self> {
        let mut bits = 0u64;
        for x in elements {
            if x >= MAX_GROUND {
                return Err(Error::OutOfRange {
                    element: x,
                    size: MAX_GROUND,
                });
            }
            bits |= 1u64 << x;
        }
        Ok(ElementSet(bits))
    }

    /// Panicking constructor for literals in tests and constructions.
    pub fn of(elements: &[usize]) -> Self {
        ElementSet::try_from_elements(elements.iter().copied())
            .expect("element outside the supported range")
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, x: usize) -> bool {
        x < MAX_GROUND && self.0 >> x & 1 == 1
    }

    pub fn insert(&mut self, x: usize) {
        self.0 |= 1u64 << x;
    }

    pub fn remove(&mut self, x: usize) {
        self.0 &= !(1u64 << x);
    }

    pub fn with(self, x: usize) -> Self {
        ElementSet(self.0 | 1u64 << x)
    }

    pub fn without(self, x: usize) -> Self {
        ElementSet(self.0 & !(1u64 << x))
    }

    pub fn union(self, other: Self) -> Self {
        ElementSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ElementSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        ElementSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn intersects(self, other: Self) -> bool {
        self.0 & other.0 != 0
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    /// Elements strictly greater than `x`.
    pub fn above(self, x: usize) -> Self {
        if x + 1 >= MAX_GROUND {
            ElementSet::EMPTY
        } else {
            ElementSet(self.0 & !((1u64 << (x + 1)) - 1))
        }
    }

    /// Elements strictly smaller than `x`.
    pub fn under(self, x: usize) -> Self {
        self.intersection(ElementSet::below(x))
    }

    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// The `i`-th smallest element.
    pub fn nth(self, i: usize) -> Option<usize> {
        self.iter().nth(i)
    }

    /// Number of elements strictly below `x`.
    pub fn rank_of(self, x: usize) -> usize {
        self.under(x).len()
    }

    /// Lexicographic comparison of the increasing element sequences.
    pub fn lex_cmp(self, other: Self) -> Ordering {
        self.iter().cmp(other.iter())
    }

    /// `other` is a proper end-extension of `self`: a strict superset whose
    /// new elements all exceed `max(self)`.
    pub fn is_properly_end_extended_by(self, other: Self) -> bool {
        if !self.is_subset(other) || self == other {
            return false;
        }
        match self.max() {
            None => true,
            Some(m) => other.difference(self).min().is_some_and(|x| x > m),
        }
    }

    /// All `size`-element subsets, in lexicographic order.
    pub fn subsets_of_size(self, size: usize) -> Combinations {
        Combinations::new(self, size)
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = ElementSet::EMPTY;
        for x in iter {
            set.insert(x);
        }
        set
    }
}

impl IntoIterator for ElementSet {
    type Item = usize;
    type IntoIter = Elements;

    fn into_iter(self) -> Elements {
        self.iter()
    }
}

impl Serialize for ElementSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ElementSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let elements = Vec::<usize>::deserialize(deserializer)?;
        ElementSet::try_from_elements(elements).map_err(serde::de::Error::custom)
    }
}

/// Increasing iterator over the elements of a set.
#[derive(Debug, Clone)]
pub struct Elements(u64);

impl Iterator for Elements {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let x = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(x)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

/// Fixed-size subsets of a base set in lexicographic order.
#[derive(Debug, Clone)]
pub struct Combinations {
    pool: Vec<usize>,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(base: ElementSet, size: usize) -> Self {
        let pool = base.to_vec();
        let done = size > pool.len();
        Combinations {
            idx: (0..size).collect(),
            pool,
            done,
        }
    }
}

impl Iterator for Combinations {
    type Item = ElementSet;

    fn next(&mut self) -> Option<ElementSet> {
        if self.done {
            return None;
        }
        let current: ElementSet = self.idx.iter().map(|&i| self.pool[i]).collect();
        let k = self.idx.len();
        let n = self.pool.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(current)
    }
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_and_bounds() {
        assert_eq!(ElementSet::open_interval(1, 4), ElementSet::of(&[2, 3]));
        assert!(ElementSet::open_interval(1, 2).is_empty());
        assert!(ElementSet::open_interval(3, 3).is_empty());
        assert_eq!(ElementSet::below(3), ElementSet::of(&[0, 1, 2]));
        assert_eq!(ElementSet::below(64).len(), 64);
        assert_eq!(ElementSet::of(&[1, 5, 9]).above(5), ElementSet::of(&[9]));
        assert_eq!(ElementSet::of(&[1, 5, 63]).above(63), ElementSet::EMPTY);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<_> = ElementSet::of(&[0, 2, 3, 7]).subsets_of_size(2).collect();
        let expect = [[0, 2], [0, 3], [0, 7], [2, 3], [2, 7], [3, 7]];
        assert_eq!(all.len(), expect.len());
        for (got, want) in all.iter().zip(expect.iter()) {
            assert_eq!(*got, ElementSet::of(want));
        }
        assert!(all.windows(2).all(|w| w[0].lex_cmp(w[1]) == Ordering::Less));
        assert_eq!(ElementSet::of(&[1]).subsets_of_size(2).count(), 0);
        assert_eq!(ElementSet::of(&[1]).subsets_of_size(0).count(), 1);
    }

    #[test]
    fn end_extension() {
        let u = ElementSet::of(&[0, 1, 2]);
        assert!(u.is_properly_end_extended_by(ElementSet::of(&[0, 1, 2, 3])));
        assert!(u.is_properly_end_extended_by(ElementSet::of(&[0, 1, 2, 5, 9])));
        assert!(!u.is_properly_end_extended_by(u));
        assert!(!ElementSet::of(&[0, 2, 3]).is_properly_end_extended_by(ElementSet::of(&[0, 1, 2, 3])));
    }

    #[test]
    fn ground_checks() {
        assert!(GroundSet::new(0).is_err());
        assert!(GroundSet::new(65).is_err());
        let g = GroundSet::new(5).unwrap();
        assert!(g.check(ElementSet::of(&[0, 4])).is_ok());
        assert_eq!(
            g.check(ElementSet::of(&[0, 5, 7])),
            Err(Error::OutOfRange { element: 5, size: 5 })
        );
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(7, 5), 21);
        assert_eq!(binomial(20, 4), 4845);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
    }
}
