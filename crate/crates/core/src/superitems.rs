//! Grouping of identical items into placement blocks.
//!
//! Three kinds are produced: `Single` (one item), `Horizontal` (2x1 or 2x2
//! tiles of items with the same footprint and height) and `Vertical`
//! (columns of items sharing a footprint). Blocks are only a search-space
//! reduction for the layer builders; [`decompose`] turns a placed block back
//! into exact per-item placements.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::{Item, PackedItem, Pallet, Placement, Rotation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SuperKind {
    Single,
    Horizontal,
    Vertical,
}

/// One item inside a block, positioned in the block's unrotated frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Member {
    /// Index into the order's item list.
    pub item: usize,
    pub offset: [u32; 3],
    pub rotation: Rotation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperItem {
    pub kind: SuperKind,
    pub members: Vec<Member>,
    /// Bounding extents `(len, wid, hgt)` in the unrotated frame.
    pub dims: [u32; 3],
    pub mass_g: u64,
}

impl SuperItem {
    pub fn single(index: usize, item: &Item) -> Self {
        Self {
            kind: SuperKind::Single,
            members: vec![Member {
                item: index,
                offset: [0, 0, 0],
                rotation: Rotation::Deg0,
            }],
            dims: [item.length_mm, item.width_mm, item.height_mm],
            mass_g: item.mass_g,
        }
    }

    pub fn height(&self) -> u32 {
        self.dims[2]
    }

    pub fn footprint(&self, rotation: Rotation) -> (u32, u32) {
        rotation.apply(self.dims[0], self.dims[1])
    }

    pub fn footprint_area(&self) -> u64 {
        self.dims[0] as u64 * self.dims[1] as u64
    }

    pub fn volume(&self) -> u64 {
        self.footprint_area() * self.dims[2] as u64
    }

    pub fn item_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|m| m.item)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuperItemConfig {
    /// Column height cap; `None` means a third of the pallet height.
    pub max_super_height_mm: Option<u32>,
    pub enable_horizontal: bool,
    pub enable_vertical: bool,
}

impl Default for SuperItemConfig {
    fn default() -> Self {
        Self {
            max_super_height_mm: None,
            enable_horizontal: true,
            enable_vertical: true,
        }
    }
}

impl SuperItemConfig {
    pub fn max_height(&self, pallet: &Pallet) -> u32 {
        self.max_super_height_mm.unwrap_or(pallet.height_mm / 3)
    }
}

fn fits_base(pallet: &Pallet, len: u32, wid: u32) -> bool {
    Rotation::BOTH.iter().any(|r| {
        let (l, w) = r.apply(len, wid);
        l <= pallet.length_mm && w <= pallet.width_mm
    })
}

/// Rotation that maps the item onto its normalized (long side along x) footprint.
fn normalizing_rotation(item: &Item) -> Rotation {
    if item.length_mm >= item.width_mm {
        Rotation::Deg0
    } else {
        Rotation::Deg90
    }
}

/// Groups `items` into blocks. Every item index ends up in exactly one block.
///
/// Order of passes: 2x2 horizontal tiles, vertical columns, 2x1 horizontal
/// pairs, then singles. Within a pass larger groups go first.
pub fn build_superitems(items: &[Item], pallet: &Pallet, config: &SuperItemConfig) -> Vec<SuperItem> {
    let mut used = vec![false; items.len()];
    let mut out = Vec::new();

    // identical (normalized footprint, height) groups, deterministic key order
    let mut identical: BTreeMap<(u32, u32, u32), Vec<usize>> = BTreeMap::new();
    for (i, it) in items.iter().enumerate() {
        let (a, b) = it.normalized_footprint();
        identical.entry((a, b, it.height_mm)).or_default().push(i);
    }

    if config.enable_horizontal {
        for (&(a, b, h), idx) in identical.iter().rev() {
            if !fits_base(pallet, 2 * a, 2 * b) || h > pallet.height_mm {
                continue;
            }
            for quad in idx.chunks_exact(4) {
                let offsets = [[0, 0], [a, 0], [0, b], [a, b]];
                out.push(horizontal_block(items, quad, &offsets, [2 * a, 2 * b, h]));
                quad.iter().for_each(|&i| used[i] = true);
            }
        }
    }

    if config.enable_vertical {
        let cap = config.max_height(pallet);
        let mut by_footprint: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
        for (i, it) in items.iter().enumerate() {
            if !used[i] {
                by_footprint.entry(it.normalized_footprint()).or_default().push(i);
            }
        }
        for (&(a, b), idx) in by_footprint.iter().rev() {
            if !fits_base(pallet, a, b) {
                continue;
            }
            let mut idx = idx.clone();
            // tallest first; heaviest at the bottom among equal heights
            idx.sort_by(|&p, &q| {
                (items[q].height_mm, items[q].mass_g, p).cmp(&(items[p].height_mm, items[p].mass_g, q))
            });
            let mut remaining: Vec<usize> = idx;
            while remaining.len() >= 2 {
                let mut column = Vec::new();
                let mut height = 0u32;
                remaining.retain(|&i| {
                    let h = items[i].height_mm;
                    if height + h <= cap {
                        height += h;
                        column.push(i);
                        false
                    } else {
                        true
                    }
                });
                if column.len() < 2 {
                    // nothing stackable in this footprint group anymore
                    break;
                }
                out.push(vertical_column(items, &column, a, b));
                column.iter().for_each(|&i| used[i] = true);
            }
        }
    }

    if config.enable_horizontal {
        for (&(a, b, h), idx) in identical.iter().rev() {
            if !fits_base(pallet, 2 * a, b) || h > pallet.height_mm {
                continue;
            }
            let free: Vec<usize> = idx.iter().copied().filter(|&i| !used[i]).collect();
            for pair in free.chunks_exact(2) {
                out.push(horizontal_block(items, pair, &[[0, 0], [a, 0]], [2 * a, b, h]));
                pair.iter().for_each(|&i| used[i] = true);
            }
        }
    }

    for (i, it) in items.iter().enumerate() {
        if !used[i] {
            out.push(SuperItem::single(i, it));
        }
    }
    out
}

fn horizontal_block(items: &[Item], idx: &[usize], offsets: &[[u32; 2]], dims: [u32; 3]) -> SuperItem {
    let members = idx
        .iter()
        .zip(offsets)
        .map(|(&i, off)| Member {
            item: i,
            offset: [off[0], off[1], 0],
            rotation: normalizing_rotation(&items[i]),
        })
        .collect();
    SuperItem {
        kind: SuperKind::Horizontal,
        members,
        dims,
        mass_g: idx.iter().map(|&i| items[i].mass_g).sum(),
    }
}

fn vertical_column(items: &[Item], idx: &[usize], a: u32, b: u32) -> SuperItem {
    let mut z = 0;
    let members = idx
        .iter()
        .map(|&i| {
            let m = Member {
                item: i,
                offset: [0, 0, z],
                rotation: normalizing_rotation(&items[i]),
            };
            z += items[i].height_mm;
            m
        })
        .collect();
    SuperItem {
        kind: SuperKind::Vertical,
        members,
        dims: [a, b, z],
        mass_g: idx.iter().map(|&i| items[i].mass_g).sum(),
    }
}

/// Per-item `(item index, placement)` pairs for a block placed at `base`.
///
/// A 90 degree block rotation transposes member offsets; for axis-aligned
/// boxes the transposed tiling is again a tiling of the rotated bounding box.
pub fn member_placements(superitem: &SuperItem, base: Placement) -> impl Iterator<Item = (usize, Placement)> + '_ {
    superitem.members.iter().map(move |m| {
        let (dx, dy) = match base.rotation {
            Rotation::Deg0 => (m.offset[0], m.offset[1]),
            Rotation::Deg90 => (m.offset[1], m.offset[0]),
        };
        (
            m.item,
            Placement::new(
                base.x_mm + dx,
                base.y_mm + dy,
                base.z_mm + m.offset[2],
                m.rotation.compose(base.rotation),
            ),
        )
    })
}

pub fn decompose(superitem: &SuperItem, items: &[Item], base: Placement) -> Vec<PackedItem> {
    member_placements(superitem, base)
        .map(|(i, p)| PackedItem::new(items[i].clone(), p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{box_overlap, box_within, Aabb};

    fn ident(n: usize, l: u32, w: u32, h: u32) -> Vec<Item> {
        (0..n)
            .map(|k| Item::new(format!("a#{}", k + 1), l, w, h, 500).unwrap())
            .collect()
    }

    /// Decomposition oracle: members are pairwise disjoint, inside the
    /// bounding box, and their volumes add up to it when the block is solid.
    fn check_tiling(s: &SuperItem, items: &[Item], rot: Rotation) {
        let base = Placement::new(7, 11, 13, rot);
        let packed = decompose(s, items, base);
        let (bl, bw) = s.footprint(rot);
        let bounds = Pallet::new(7 + bl, 11 + bw, 13 + s.dims[2], 1).unwrap();
        let boxes: Vec<Aabb> = packed.iter().map(PackedItem::aabb).collect();
        for (i, a) in boxes.iter().enumerate() {
            assert!(box_within(&bounds, a), "member outside block: {a:?}");
            assert!(a.min[0] >= 7 && a.min[1] >= 11 && a.min[2] >= 13);
            for b in &boxes[i + 1..] {
                assert_eq!(box_overlap(a, b), 0);
            }
        }
        let member_vol: i64 = boxes.iter().map(Aabb::volume).sum();
        assert!(member_vol as u64 <= s.volume());
    }

    #[test]
    fn one_item_is_single() {
        let items = ident(1, 100, 100, 100);
        let s = build_superitems(&items, &Pallet::default(), &SuperItemConfig::default());
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].kind, SuperKind::Single);
    }

    #[test]
    fn four_identical_form_a_square_tile() {
        let items = ident(4, 200, 200, 100);
        let s = build_superitems(&items, &Pallet::default(), &SuperItemConfig::default());
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].kind, SuperKind::Horizontal);
        assert_eq!(s[0].dims, [400, 400, 100]);
        for rot in Rotation::BOTH {
            check_tiling(&s[0], &items, rot);
        }
        // solid tile: member volumes equal the block volume
        assert_eq!(items.iter().map(Item::volume).sum::<u64>(), s[0].volume());
    }

    #[test]
    fn three_identical_form_a_column() {
        let items = ident(3, 100, 100, 200);
        let cfg = SuperItemConfig {
            max_super_height_mm: Some(700),
            ..Default::default()
        };
        let s = build_superitems(&items, &Pallet::default(), &cfg);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].kind, SuperKind::Vertical);
        assert_eq!(s[0].height(), 600);
        check_tiling(&s[0], &items, Rotation::Deg0);
    }

    #[test]
    fn column_respects_height_cap() {
        let items = ident(5, 100, 100, 300);
        let cfg = SuperItemConfig {
            max_super_height_mm: Some(700),
            ..Default::default()
        };
        let s = build_superitems(&items, &Pallet::default(), &cfg);
        assert!(s.iter().all(|b| b.kind != SuperKind::Vertical || b.height() <= 700));
    }

    #[test]
    fn disabled_grouping_yields_singles() {
        let items = ident(4, 200, 200, 100);
        let cfg = SuperItemConfig {
            enable_horizontal: false,
            enable_vertical: false,
            ..Default::default()
        };
        let s = build_superitems(&items, &Pallet::default(), &cfg);
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|b| b.kind == SuperKind::Single));
    }

    #[test]
    fn rotated_items_are_grouped_with_their_twins() {
        let mut items = ident(1, 300, 200, 100);
        items.push(Item::new("b#1", 200, 300, 100, 500).unwrap());
        let cfg = SuperItemConfig {
            enable_vertical: false,
            ..Default::default()
        };
        let s = build_superitems(&items, &Pallet::default(), &cfg);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].dims, [600, 200, 100]);
        for rot in Rotation::BOTH {
            check_tiling(&s[0], &items, rot);
        }
    }

    #[test]
    fn decompose_examples() {
        let items = ident(2, 200, 200, 100);
        let single = SuperItem::single(0, &items[0]);
        let p = decompose(&single, &items, Placement::new(5, 6, 7, Rotation::Deg0));
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].placement, Placement::new(5, 6, 7, Rotation::Deg0));

        let col = vertical_column(&items, &[0, 1], 200, 200);
        let p = decompose(&col, &items, Placement::default());
        assert_eq!(p[0].placement.z_mm, 0);
        assert_eq!(p[1].placement.z_mm, 100);

        let pair = horizontal_block(&items, &[0, 1], &[[0, 0], [200, 0]], [400, 200, 100]);
        let p = decompose(&pair, &items, Placement::default());
        assert_eq!((p[0].placement.x_mm, p[1].placement.x_mm), (0, 200));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn order() -> impl Strategy<Value = Vec<Item>> {
            proptest::collection::vec((0usize..4, 1u32..4), 1..12).prop_map(|counts| {
                let kinds = [(200, 100, 150), (300, 300, 100), (120, 80, 400), (600, 400, 250)];
                let mut items = Vec::new();
                for (k, q) in counts {
                    for _ in 0..q {
                        let (l, w, h) = kinds[k];
                        let (l, w) = if items.len() % 2 == 0 { (l, w) } else { (w, l) };
                        items.push(Item::new(format!("i{}", items.len()), l, w, h, 100 + items.len() as u64).unwrap());
                    }
                }
                items
            })
        }

        proptest! {
            #[test]
            fn grouping_is_a_partition(items in order()) {
                let pallet = Pallet::default();
                let blocks = build_superitems(&items, &pallet, &SuperItemConfig::default());
                let mut seen = vec![0usize; items.len()];
                for b in &blocks {
                    for i in b.item_ids() { seen[i] += 1; }
                    let mass: u64 = b.item_ids().map(|i| items[i].mass_g).sum();
                    prop_assert_eq!(mass, b.mass_g);
                    let vol: u64 = b.item_ids().map(|i| items[i].volume()).sum();
                    prop_assert!(vol <= b.volume());
                    for rot in Rotation::BOTH { check_tiling(b, &items, rot); }
                    if b.kind == SuperKind::Vertical {
                        prop_assert!(b.height() <= SuperItemConfig::default().max_height(&pallet));
                    }
                }
                prop_assert!(seen.iter().all(|&c| c == 1));
            }
        }
    }
}
