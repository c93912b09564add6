use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::constructive::placement_box;
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Item, Pallet, Placement, Rotation};
use crate::kpi::KpiReport;
use crate::solution::Solution;

/// One placed item. Dimensions and mass are optional so third-party layouts
/// can be scored against their order file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementRecord {
    pub id: String,
    pub x: u32,
    pub y: u32,
    pub z: u32,
    pub rot: Rotation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_g: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LayoutMeta {
    pub seed: u64,
    #[serde(default)]
    pub config_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    /// Left empty unless the caller opts in, so output bytes stay stable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutDocument {
    pub order_id: String,
    pub pallet: Pallet,
    pub placements: Vec<PlacementRecord>,
    pub unplaced: Vec<String>,
    pub meta: LayoutMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kpi: Option<KpiReport>,
}

impl LayoutDocument {
    pub fn from_solution(order_id: &str, pallet: Pallet, items: &[Item], solution: &Solution, meta: LayoutMeta) -> Self {
        let placements = solution
            .placed
            .iter()
            .map(|&(i, p)| {
                let it = &items[i];
                PlacementRecord {
                    id: it.id.clone(),
                    x: p.x_mm,
                    y: p.y_mm,
                    z: p.z_mm,
                    rot: p.rotation,
                    l: Some(it.length_mm),
                    w: Some(it.width_mm),
                    h: Some(it.height_mm),
                    mass_g: Some(it.mass_g),
                }
            })
            .collect();
        Self {
            order_id: order_id.to_string(),
            pallet,
            placements,
            unplaced: solution.unplaced.iter().map(|&i| items[i].id.clone()).collect(),
            meta,
            kpi: None,
        }
    }

    /// Every id at most once across placements and the unplaced list.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for id in self.placements.iter().map(|p| &p.id).chain(&self.unplaced) {
            if !seen.insert(id) {
                return Err(Error::Validation(format!("layout `{}`: id `{id}` listed twice", self.order_id)));
            }
        }
        Ok(())
    }

    pub fn total_items(&self) -> usize {
        self.placements.len() + self.unplaced.len()
    }

    /// Boxes of the placements. Missing dimensions are looked up in `items`
    /// by id.
    pub fn boxes(&self, items: Option<&[Item]>) -> Result<Vec<Aabb>> {
        let by_id: BTreeMap<&str, &Item> = items
            .unwrap_or_default()
            .iter()
            .map(|i| (i.id.as_str(), i))
            .collect();
        self.placements
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let known = by_id.get(p.id.as_str());
                let pick = |own: Option<u32>, f: fn(&Item) -> u32, name: &str| -> Result<u32> {
                    own.or_else(|| known.map(|i| f(i))).ok_or_else(|| {
                        Error::parse(format!("placements[{k}].{name}"), format!("no dimension for item `{}`", p.id))
                    })
                };
                let item = Item::new(
                    p.id.clone(),
                    pick(p.l, |i| i.length_mm, "l")?,
                    pick(p.w, |i| i.width_mm, "w")?,
                    pick(p.h, |i| i.height_mm, "h")?,
                    p.mass_g.or_else(|| known.map(|i| i.mass_g)).unwrap_or(0),
                )?;
                Ok(placement_box(&item, Placement::new(p.x, p.y, p.z, p.rot)))
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("layout serializes");
        s.push('\n');
        s
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_slice(bytes);
        let doc: Self = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            Error::parse(path, e.into_inner().to_string())
        })?;
        de.end()?;
        doc.validate()?;
        Ok(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_items() -> (Vec<Item>, Solution) {
        let items = vec![Item::new("a#1", 300, 200, 100, 50).unwrap(), Item::new("b#1", 100, 100, 100, 20).unwrap()];
        let s = Solution::from_placed(vec![(0, Placement::new(0, 0, 0, Rotation::Deg90))], 2);
        (items, s)
    }

    #[test]
    fn empty_layout_is_valid() {
        let doc = LayoutDocument::from_solution("e", Pallet::default(), &[], &Solution::default(), LayoutMeta::default());
        let text = doc.to_json();
        assert!(text.contains("\"placements\": []"));
        assert_eq!(LayoutDocument::from_json(text.as_bytes()).unwrap(), doc);
    }

    #[test]
    fn round_trip_is_stable() {
        let (items, s) = two_items();
        let meta = LayoutMeta {
            seed: 7,
            config_hash: "abc".into(),
            stage: Some("hybrid-ga-pp".into()),
            created_at: None,
        };
        let doc = LayoutDocument::from_solution("o", Pallet::default(), &items, &s, meta);
        let a = doc.to_json();
        let back = LayoutDocument::from_json(a.as_bytes()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_json(), a);
        // key order follows the schema
        let keys = ["\"order_id\"", "\"pallet\"", "\"placements\"", "\"unplaced\"", "\"meta\""];
        let pos: Vec<usize> = keys.iter().map(|k| a.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(a.contains("\"rot\": 90"));
    }

    #[test]
    fn dimensions_resolve_from_items() {
        let (items, s) = two_items();
        let mut doc = LayoutDocument::from_solution("o", Pallet::default(), &items, &s, LayoutMeta::default());
        doc.placements[0].l = None;
        assert!(doc.boxes(None).is_err());
        let b = doc.boxes(Some(&items)).unwrap();
        assert_eq!(b[0].size, [200, 300, 100]);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let (items, s) = two_items();
        let mut doc = LayoutDocument::from_solution("o", Pallet::default(), &items, &s, LayoutMeta::default());
        doc.unplaced.push("a#1".into());
        assert!(LayoutDocument::from_json(doc.to_json().as_bytes()).is_err());
    }
}
