//! Set mappings `f : [n]^k -> P(n)` with `f(x) ∩ x = ∅`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::{ElementSet, GroundSet, MAX_GROUND};

/// Upper bound on the number of stored tuples.
pub const MAX_TUPLES: u64 = 1 << 24;

/// Structural promises a mapping makes about where its images live.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Flags {
    /// Arity 2 only: `f({x,y}) ⊆ [0,x)` for `x < y`.
    pub initial_segment: bool,
    /// Arity 4 only: `f({x0,x1,x2,x3}) ⊆ (x1,x2)`.
    pub interval_bounded: bool,
}

impl Flags {
    pub const NONE: Flags = Flags {
        initial_segment: false,
        interval_bounded: false,
    };
    pub const INTERVAL: Flags = Flags {
        initial_segment: false,
        interval_bounded: true,
    };
    pub const INITIAL_SEGMENT: Flags = Flags {
        initial_segment: true,
        interval_bounded: false,
    };

    /// Largest image a tuple may have under these flags, ignoring disjointness.
    pub fn allowed(&self, tuple: ElementSet) -> ElementSet {
        if self.interval_bounded {
            let x1 = tuple.nth(1).unwrap_or(0);
            let x2 = tuple.nth(2).unwrap_or(0);
            ElementSet::open_interval(x1, x2)
        } else if self.initial_segment {
            ElementSet::below(tuple.min().unwrap_or(0))
        } else {
            ElementSet::from_bits(u64::MAX)
        }
    }
}

pub(crate) fn binomial_table() -> &'static [[u64; MAX_GROUND + 1]; MAX_GROUND + 1] {
    static TABLE: OnceLock<Box<[[u64; MAX_GROUND + 1]; MAX_GROUND + 1]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Box::new([[0u64; MAX_GROUND + 1]; MAX_GROUND + 1]);
        for n in 0..=MAX_GROUND {
            t[n][0] = 1;
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1].saturating_add(t[n - 1][k]);
            }
        }
        t
    })
}

/// Colex rank of a tuple among the subsets of its size.
pub(crate) fn colex_rank(tuple: ElementSet) -> usize {
    let table = binomial_table();
    tuple
        .iter()
        .enumerate()
        .map(|(i, x)| table[x][i + 1] as usize)
        .sum()
}

/// A total map from the sorted `k`-tuples of a finite ground set to subsets
/// of it. Invariants (disjointness, budget, flags) are enforced on every
/// write.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetMapping {
    ground: GroundSet,
    k: usize,
    mu: Option<usize>,
    flags: Flags,
    images: Vec<ElementSet>,
}

impl SetMapping {
    /// The mapping sending every tuple to the empty set.
    pub fn empty(n: usize, k: usize, mu: Option<usize>, flags: Flags) -> Result<Self> {
        let ground = GroundSet::new(n)?;
        if k == 0 {
            return Err(Error::UnsupportedArity(0));
        }
        if flags.interval_bounded && k != 4 {
            return Err(Error::FlagArity {
                flag: "interval_bounded",
                required: 4,
                k,
            });
        }
        if flags.initial_segment && k != 2 {
            return Err(Error::FlagArity {
                flag: "initial_segment",
                required: 2,
                k,
            });
        }
        let count = binomial_table()[n][k.min(MAX_GROUND)];
        let count = if k > n { 0 } else { count };
        if count > MAX_TUPLES {
            return Err(Error::TooLarge { n, k });
        }
        Ok(SetMapping {
            ground,
            k,
            mu,
            flags,
            images: vec![ElementSet::EMPTY; count as usize],
        })
    }

    /// Builds a mapping from a per-tuple image function, validating each image.
    pub fn from_fn<F>(n: usize, k: usize, mu: Option<usize>, flags: Flags, mut image: F) -> Result<Self>
    where
        F: FnMut(ElementSet) -> ElementSet,
    {
        let mut mapping = SetMapping::empty(n, k, mu, flags)?;
        for tuple in mapping.ground.full().subsets_of_size(k) {
            mapping.set_image(tuple, image(tuple))?;
        }
        Ok(mapping)
    }

    /// An empty mapping with the same shape (ground, arity, flags) as `self`.
    pub fn empty_like(&self) -> Self {
        SetMapping {
            ground: self.ground,
            k: self.k,
            mu: None,
            flags: self.flags,
            images: vec![ElementSet::EMPTY; self.images.len()],
        }
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.size()
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn budget(&self) -> Option<usize> {
        self.mu
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    /// Image of a `k`-tuple. Tuples of the wrong size or outside the ground
    /// set map to the empty set.
    #[inline]
    pub fn image(&self, tuple: ElementSet) -> ElementSet {
        if tuple.len() != self.k || !self.ground.contains(tuple) {
            return ElementSet::EMPTY;
        }
        self.images[colex_rank(tuple)]
    }

    pub fn try_image(&self, tuple: ElementSet) -> Result<ElementSet> {
        self.check_tuple(tuple)?;
        Ok(self.images[colex_rank(tuple)])
    }

    fn check_tuple(&self, tuple: ElementSet) -> Result<()> {
        self.ground.check(tuple)?;
        if tuple.len() != self.k {
            return Err(Error::TupleSize { tuple, k: self.k });
        }
        Ok(())
    }

    /// Checks that `image` is a legal value for `tuple`.
    pub fn validate_image(&self, tuple: ElementSet, image: ElementSet) -> Result<()> {
        self.check_tuple(tuple)?;
        self.ground.check(image)?;
        if image.intersects(tuple) {
            return Err(Error::NotDisjoint { tuple, image });
        }
        if let Some(mu) = self.mu {
            if image.len() >= mu {
                return Err(Error::OverBudget {
                    tuple,
                    size: image.len(),
                    mu,
                });
            }
        }
        if !image.is_subset(self.flags.allowed(tuple)) {
            let flag = if self.flags.interval_bounded {
                "interval_bounded"
            } else {
                "initial_segment"
            };
            return Err(Error::FlagViolation { tuple, image, flag });
        }
        Ok(())
    }

    pub fn set_image(&mut self, tuple: ElementSet, image: ElementSet) -> Result<()> {
        self.validate_image(tuple, image)?;
        self.images[colex_rank(tuple)] = image;
        Ok(())
    }

    /// All tuples of the ground set in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = ElementSet> {
        self.ground.full().subsets_of_size(self.k)
    }

    /// `(tuple, image)` pairs with nonempty image, lexicographic in the tuple.
    pub fn nonempty(&self) -> impl Iterator<Item = (ElementSet, ElementSet)> + '_ {
        self.tuples()
            .map(move |t| (t, self.image(t)))
            .filter(|(_, img)| !img.is_empty())
    }

    /// Pointwise containment `self(x) ⊆ other(x)` on every tuple.
    pub fn is_contained_in(&self, other: &SetMapping) -> bool {
        self.k == other.k
            && self.n() == other.n()
            && self
                .images
                .iter()
                .zip(other.images.iter())
                .all(|(a, b)| a.is_subset(*b))
    }

    /// First tuple inside `support` where the two mappings differ.
    pub fn first_disagreement_on(&self, other: &SetMapping, support: ElementSet) -> Option<ElementSet> {
        support
            .subsets_of_size(self.k)
            .find(|&t| self.image(t) != other.image(t))
    }

    pub fn agrees_on(&self, other: &SetMapping, support: ElementSet) -> bool {
        self.first_disagreement_on(other, support).is_none()
    }

    /// The mapping on `[support]^k` with images cut down to `support`;
    /// every other tuple maps to the empty set.
    pub fn restrict(&self, support: ElementSet) -> SetMapping {
        let mut out = self.empty_like();
        out.mu = self.mu;
        for t in support.subsets_of_size(self.k) {
            out.images[colex_rank(t)] = self.image(t).intersection(support);
        }
        out
    }

    /// Canonical JSON: sorted keys, sorted arrays, every tuple present.
    pub fn to_json(&self) -> String {
        let doc = MappingDoc {
            flags: self.flags,
            images: self
                .tuples()
                .map(|t| (tuple_key(t), self.image(t).to_vec()))
                .collect(),
            k: self.k,
            mu: self.mu,
            n: self.n(),
        };
        serde_json::to_string_pretty(&doc).expect("mapping document serializes")
    }

    /// Parses and validates a mapping document. Tuples missing from the
    /// `images` object map to the empty set.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MappingDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut mapping = SetMapping::empty(doc.n, doc.k, doc.mu, doc.flags)?;
        for (key, image) in &doc.images {
            let tuple = parse_tuple_key(key)?;
            let image = ElementSet::try_from_elements(image.iter().copied())?;
            mapping.set_image(tuple, image)?;
        }
        Ok(mapping)
    }
}

/// Comma-joined sorted elements, the key format of mapping documents.
pub fn tuple_key(tuple: ElementSet) -> String {
    tuple
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_tuple_key(key: &str) -> Result<ElementSet> {
    let mut elements = Vec::new();
    for part in key.split(',') {
        let x: usize = part
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad tuple key {key:?}")))?;
        elements.push(x);
    }
    let set = ElementSet::try_from_elements(elements.iter().copied())?;
    if set.len() != elements.len() {
        return Err(Error::Parse(format!("repeated element in tuple key {key:?}")));
    }
    Ok(set)
}

#[derive(Debug, Serialize, Deserialize)]
struct MappingDoc {
    flags: Flags,
    images: BTreeMap<String, Vec<usize>>,
    k: usize,
    mu: Option<usize>,
    n: usize,
}
