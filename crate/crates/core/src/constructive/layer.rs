use crate::geometry::{Aabb, Item, Pallet, Placement, Rect, Rotation};
use crate::superitems::{member_placements, SuperItem};

/// A block placed inside a layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LayerMember {
    /// Index into the block table.
    pub unit: usize,
    pub x_mm: u32,
    pub y_mm: u32,
    pub rotation: Rotation,
}

impl LayerMember {
    pub fn new(unit: usize, x_mm: u32, y_mm: u32, rotation: Rotation) -> Self {
        Self {
            unit,
            x_mm,
            y_mm,
            rotation,
        }
    }

    pub fn rect(&self, units: &[SuperItem]) -> Rect {
        let (l, w) = units[self.unit].footprint(self.rotation);
        Rect::new(
            self.x_mm as i64,
            self.y_mm as i64,
            self.x_mm as i64 + l as i64,
            self.y_mm as i64 + w as i64,
        )
    }
}

/// Horizontal slice: all members share `base_z`; `height` is the tallest member.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Layer {
    pub base_z: u32,
    pub height: u32,
    pub members: Vec<LayerMember>,
}

impl Layer {
    pub fn top(&self) -> u32 {
        self.base_z + self.height
    }

    pub fn max_member_height(&self, units: &[SuperItem]) -> u32 {
        self.members.iter().map(|m| units[m.unit].height()).max().unwrap_or(0)
    }

    pub fn mass_g(&self, units: &[SuperItem]) -> u64 {
        self.members.iter().map(|m| units[m.unit].mass_g).sum()
    }

    /// Bounds, pairwise 2D disjointness and the height rule.
    pub fn is_valid(&self, units: &[SuperItem], pallet: &Pallet) -> bool {
        let rects: Vec<Rect> = self.members.iter().map(|m| m.rect(units)).collect();
        for (i, r) in rects.iter().enumerate() {
            if r.x1 > pallet.length_mm as i64 || r.y1 > pallet.width_mm as i64 {
                return false;
            }
            if rects[i + 1..].iter().any(|o| o.intersect(r).is_some()) {
                return false;
            }
        }
        self.height == self.max_member_height(units)
    }

    pub fn placements<'a>(&'a self, units: &'a [SuperItem]) -> impl Iterator<Item = (usize, Placement)> + 'a {
        self.members.iter().flat_map(move |m| {
            member_placements(
                &units[m.unit],
                Placement::new(m.x_mm, m.y_mm, self.base_z, m.rotation),
            )
        })
    }
}

/// Recomputes every layer height and stacks base levels from `z0`.
pub fn restack(layers: &mut [Layer], units: &[SuperItem], z0: u32) {
    let mut z = z0;
    for layer in layers {
        layer.height = layer.max_member_height(units);
        layer.base_z = z;
        z += layer.height;
    }
}

/// Stacking rule: base levels are the prefix sums of the layer heights from `z0`.
pub fn is_stacked(layers: &[Layer], z0: u32) -> bool {
    let mut z = z0;
    layers.iter().all(|l| {
        let ok = l.base_z == z;
        z += l.height;
        ok
    })
}

pub fn stack_height(layers: &[Layer]) -> u32 {
    layers.iter().map(|l| l.height).sum()
}

/// Flattens placements into item-level boxes.
pub fn placed_boxes(placed: &[(usize, Placement)], items: &[Item]) -> Vec<Aabb> {
    placed
        .iter()
        .map(|&(i, p)| placement_box(&items[i], p))
        .collect()
}

/// Box of `item` at placement `p`.
pub fn placement_box(item: &Item, p: Placement) -> Aabb {
    let (l, w) = p.rotation.apply(item.length_mm, item.width_mm);
    Aabb::new(
        [p.x_mm as i64, p.y_mm as i64, p.z_mm as i64],
        [l as i64, w as i64, item.height_mm as i64],
        item.mass_g,
    )
}
