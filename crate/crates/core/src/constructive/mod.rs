//! Constructive phase: greedy MaxRects layers forming the base solution,
//! plus the 2D placement rules used to seed the genetic search.

mod layer;
mod maxrects;
mod plane;

pub use layer::{is_stacked, placed_boxes, placement_box, restack, stack_height, Layer, LayerMember};
pub use maxrects::{FreeRect, FreeRectStore, MaxRectsRule};
pub use plane::{bottom_left_place, extreme_point_place, Plane, PlacementRule, Spot};

use serde::{Deserialize, Serialize};

use crate::geometry::{Item, Pallet, Placement};
use crate::superitems::SuperItem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstructiveConfig {
    /// A block joins an open layer only if its height is at most this
    /// multiple of the layer's current height.
    pub layer_height_tolerance: f64,
    pub maxrects_rule: MaxRectsRule,
}

impl Default for ConstructiveConfig {
    fn default() -> Self {
        Self {
            layer_height_tolerance: 1.25,
            maxrects_rule: MaxRectsRule::BestShortSideFit,
        }
    }
}

/// Output of the constructive phase.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseSolution {
    pub layers: Vec<Layer>,
    /// Item-level placements, `(item index, placement)`.
    pub placed: Vec<(usize, Placement)>,
    /// Block indices left for the genetic phase, ascending.
    pub residual: Vec<usize>,
    pub top_z: u32,
    pub mass_g: u64,
}

impl BaseSolution {
    pub fn empty() -> Self {
        Self {
            layers: Vec::new(),
            placed: Vec::new(),
            residual: Vec::new(),
            top_z: 0,
            mass_g: 0,
        }
    }

    /// Item indices belonging to residual blocks.
    pub fn residual_items(&self, units: &[SuperItem]) -> Vec<usize> {
        let mut ids: Vec<usize> = self.residual.iter().flat_map(|&u| units[u].item_ids()).collect();
        ids.sort_unstable();
        ids
    }
}

fn fits_base(pallet: &Pallet, unit: &SuperItem) -> bool {
    crate::geometry::Rotation::BOTH.iter().any(|r| {
        let (l, w) = unit.footprint(*r);
        l <= pallet.length_mm && w <= pallet.width_mm
    })
}

/// Builds the base solution layer by layer.
///
/// Blocks are visited by footprint area (descending). Each layer is opened by
/// the first remaining block and filled with MaxRects in one pass. The phase
/// stops as soon as the opening block of the next layer does not fit under
/// the pallet height; blocks that would break the payload are skipped.
pub fn build_base_solution(
    units: &[SuperItem],
    items: &[Item],
    pallet: &Pallet,
    config: &ConstructiveConfig,
) -> BaseSolution {
    let mut order: Vec<usize> = (0..units.len()).collect();
    order.sort_by(|&a, &b| {
        (units[b].footprint_area(), units[b].height(), a).cmp(&(units[a].footprint_area(), units[a].height(), b))
    });
    let mut remaining: Vec<usize> = order.into_iter().filter(|&u| fits_base(pallet, &units[u])).collect();

    let mut solution = BaseSolution::empty();
    let mut z = 0u32;
    loop {
        let opener = remaining
            .iter()
            .position(|&u| solution.mass_g + units[u].mass_g <= pallet.max_payload_g);
        let Some(opener) = opener else { break };
        let opener_height = units[remaining[opener]].height();
        if opener_height > pallet.height_mm - z {
            break;
        }

        let mut store = FreeRectStore::new(pallet.length_mm, pallet.width_mm);
        let mut layer_height = opener_height;
        let mut members = Vec::new();
        for &u in &remaining[opener..] {
            let unit = &units[u];
            let h = unit.height();
            if h as f64 > config.layer_height_tolerance * layer_height as f64 || h > pallet.height_mm - z {
                continue;
            }
            if solution.mass_g + unit.mass_g > pallet.max_payload_g {
                continue;
            }
            if let Some((x, y, rot)) = store.insert(unit.dims[0], unit.dims[1], config.maxrects_rule) {
                members.push(LayerMember::new(u, x, y, rot));
                solution.mass_g += unit.mass_g;
                layer_height = layer_height.max(h);
            }
        }
        remaining.retain(|u| !members.iter().any(|m| m.unit == *u));
        let layer = Layer {
            base_z: z,
            height: layer_height,
            members,
        };
        solution.placed.extend(layer.placements(units));
        z += layer.height;
        solution.layers.push(layer);
    }

    solution.top_z = z;
    let mut residual: Vec<usize> = (0..units.len())
        .filter(|u| !solution.layers.iter().any(|l| l.members.iter().any(|m| m.unit == *u)))
        .collect();
    residual.sort_unstable();
    solution.residual = residual;
    debug_assert_eq!(
        solution.top_z as i64,
        crate::geometry::boxes_used_height(&placed_boxes(&solution.placed, items))
    );
    solution
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{check_feasibility, Item};
    use crate::superitems::{build_superitems, SuperItemConfig};

    fn singles(items: &[Item]) -> Vec<SuperItem> {
        items.iter().enumerate().map(|(i, it)| SuperItem::single(i, it)).collect()
    }

    #[test]
    fn exact_tiling_uses_one_layer() {
        let items: Vec<Item> = (0..6).map(|k| Item::new(format!("q{k}"), 400, 400, 300, 1000).unwrap()).collect();
        let units = singles(&items);
        let pallet = Pallet::default();
        let s = build_base_solution(&units, &items, &pallet, &ConstructiveConfig::default());
        assert_eq!(s.layers.len(), 1);
        assert!(s.residual.is_empty());
        assert_eq!(s.top_z, 300);
    }

    #[test]
    fn too_tall_item_is_residual() {
        let items = vec![Item::new("t", 100, 100, 2500, 10).unwrap()];
        let units = singles(&items);
        let s = build_base_solution(&units, &items, &Pallet::default(), &ConstructiveConfig::default());
        assert!(s.placed.is_empty());
        assert_eq!(s.residual, vec![0]);
    }

    #[test]
    fn payload_is_never_exceeded() {
        let items: Vec<Item> = (0..10).map(|k| Item::new(format!("h{k}"), 300, 300, 300, 40_000 + k * 1000).unwrap()).collect();
        let units = singles(&items);
        let pallet = Pallet::euro(2000, 200_000);
        let s = build_base_solution(&units, &items, &pallet, &ConstructiveConfig::default());
        // brute-force accumulation over whatever was placed
        let placed_mass: u64 = s.placed.iter().map(|&(i, _)| items[i].mass_g).sum();
        assert!(placed_mass <= pallet.max_payload_g);
        assert_eq!(placed_mass, s.mass_g);
        assert!(!s.residual.is_empty());
        // no residual block would still fit under the limit
        assert!(s.residual.iter().all(|&u| placed_mass + units[u].mass_g > pallet.max_payload_g));
    }

    #[test]
    fn layers_are_stacked_and_feasible() {
        let mut items = Vec::new();
        for (k, (l, w, h)) in [(400, 300, 200), (250, 250, 180), (600, 400, 350), (120, 100, 90), (500, 500, 500)]
            .into_iter()
            .enumerate()
        {
            for q in 0..5 {
                items.push(Item::new(format!("a{k}#{q}"), l, w, h, 2000).unwrap());
            }
        }
        let pallet = Pallet::default();
        let units = build_superitems(&items, &pallet, &SuperItemConfig::default());
        let s = build_base_solution(&units, &items, &pallet, &ConstructiveConfig::default());
        assert!(is_stacked(&s.layers, 0));
        assert!(s.layers.windows(2).all(|w| w[0].base_z < w[1].base_z));
        for l in &s.layers {
            assert!(l.is_valid(&units, &pallet));
        }
        let boxes = placed_boxes(&s.placed, &items);
        let audit = check_feasibility(&boxes, &pallet, 0.0);
        assert!(audit.out_of_bounds.is_empty() && audit.overlapping_pairs.is_empty() && !audit.payload_exceeded);
        // placed and residual partition the order
        let mut ids: Vec<usize> = s.placed.iter().map(|p| p.0).chain(s.residual_items(&units)).collect();
        ids.sort_unstable();
        assert_eq!(ids, (0..items.len()).collect::<Vec<_>>());
    }
}
