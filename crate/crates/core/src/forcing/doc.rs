use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constructions::DeltaCondition;
use crate::error::{Error, Result};
use crate::mapping::{parse_tuple_key, tuple_key, SetMapping};
use crate::set::ElementSet;

use super::pair::PairCondition;
use super::quad::Condition4;
use super::ranked::{RankFunction, RankedCondition};

/// A condition of any of the three flavors, as read from or written to JSON.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyCondition {
    Quad(Condition4),
    Ranked(RankedCondition),
    Pair(PairCondition),
}

#[derive(Serialize, Deserialize)]
struct RankEntry {
    rank: u32,
    set: ElementSet,
}

#[derive(Serialize, Deserialize)]
struct ConditionDoc {
    flavor: String,
    g: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<Vec<RankEntry>>,
    support: ElementSet,
}

impl AnyCondition {
    pub fn flavor_name(&self) -> &'static str {
        match self {
            AnyCondition::Quad(_) => "quad",
            AnyCondition::Ranked(_) => "ranked",
            AnyCondition::Pair(_) => "pair",
        }
    }

    pub fn support(&self) -> ElementSet {
        match self {
            AnyCondition::Quad(c) => c.support(),
            AnyCondition::Ranked(c) => c.support(),
            AnyCondition::Pair(c) => c.support(),
        }
    }

    pub fn g(&self) -> &SetMapping {
        match self {
            AnyCondition::Quad(c) => c.g(),
            AnyCondition::Ranked(c) => c.g(),
            AnyCondition::Pair(c) => c.g(),
        }
    }

    /// Images are listed for every tuple of the support, empty ones included.
    pub fn to_json(&self) -> String {
        let g = self.g();
        let images = self
            .support()
            .subsets_of_size(g.arity())
            .map(|t| (tuple_key(t), g.image(t).to_vec()))
            .collect();
        let r = match self {
            AnyCondition::Ranked(c) => Some(
                c.ranks()
                    .sorted()
                    .into_iter()
                    .map(|(set, rank)| RankEntry { rank, set })
                    .collect(),
            ),
            _ => None,
        };
        let doc = ConditionDoc {
            flavor: self.flavor_name().to_string(),
            g: images,
            r,
            support: self.support(),
        };
        serde_json::to_string_pretty(&doc).expect("condition serializes")
    }

    /// Parses and validates a condition over `ambient`.
    pub fn from_json(text: &str, ambient: Arc<SetMapping>) -> Result<Self> {
        let doc: ConditionDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        ambient.ground().check(doc.support)?;
        let mut g = match doc.flavor.as_str() {
            "pair" => SetMapping::empty(ambient.n(), 2, Some(2), ambient.flags())?,
            "quad" | "ranked" => ambient.empty_like(),
            other => return Err(Error::Parse(format!("unknown flavor {other:?}"))),
        };
        for (key, image) in &doc.g {
            let tuple = parse_tuple_key(key)?;
            let image = ElementSet::try_from_elements(image.iter().copied())?;
            g.set_image(tuple, image)?;
        }
        match doc.flavor.as_str() {
            "quad" => Ok(AnyCondition::Quad(Condition4::new(ambient, doc.support, g)?)),
            "pair" => Ok(AnyCondition::Pair(PairCondition::new(ambient, doc.support, g)?)),
            _ => {
                let ranks = match doc.r {
                    Some(entries) => entries.into_iter().map(|e| (e.set, e.rank)).collect::<RankFunction>(),
                    None => return Ok(AnyCondition::Ranked(RankedCondition::with_canonical_ranks(ambient, doc.support, g)?)),
                };
                Ok(AnyCondition::Ranked(RankedCondition::new(ambient, doc.support, g, ranks)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{interval_mapping, prefix_mapping};

    #[test]
    fn quad_round_trip() {
        let f = Arc::new(interval_mapping(8).unwrap());
        let mut g = f.empty_like();
        g.set_image(ElementSet::of(&[0, 1, 3, 4]), ElementSet::of(&[2])).unwrap();
        let c = AnyCondition::Quad(Condition4::new(f.clone(), ElementSet::below(7), g).unwrap());
        let back = AnyCondition::from_json(&c.to_json(), f).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn ranked_round_trip() {
        let f = Arc::new(prefix_mapping(6).unwrap());
        let c = RankedCondition::with_canonical_ranks(f.clone(), ElementSet::of(&[1, 2, 4, 5]), f.empty_like()).unwrap();
        let c = AnyCondition::Ranked(c);
        let text = c.to_json();
        assert!(text.contains("\"r\""));
        assert_eq!(AnyCondition::from_json(&text, f).unwrap(), c);
    }

    #[test]
    fn pair_round_trip_and_rejection() {
        let f = Arc::new(prefix_mapping(5).unwrap());
        let mut g = SetMapping::empty(5, 2, Some(2), f.flags()).unwrap();
        g.set_image(ElementSet::of(&[2, 4]), ElementSet::of(&[1])).unwrap();
        let c = AnyCondition::Pair(PairCondition::new(f.clone(), ElementSet::of(&[1, 2, 4]), g).unwrap());
        assert_eq!(AnyCondition::from_json(&c.to_json(), f.clone()).unwrap(), c);

        let bad = r#"{"flavor":"pair","g":{"2,4":[0]},"support":[2,4]}"#;
        assert!(AnyCondition::from_json(bad, f.clone()).is_err());
        let unknown = r#"{"flavor":"other","g":{},"support":[]}"#;
        assert!(matches!(AnyCondition::from_json(unknown, f), Err(Error::Parse(_))));
    }
}
