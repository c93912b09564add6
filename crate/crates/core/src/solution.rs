use crate::constructive::{placed_boxes, placement_box};
use crate::geometry::{Aabb, Item, Placement};

/// Item-level layout: placements plus the items left off the pallet.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solution {
    /// `(item index, placement)` pairs.
    pub placed: Vec<(usize, Placement)>,
    /// Item indices not on the pallet, ascending.
    pub unplaced: Vec<usize>,
}

impl Solution {
    /// Placements as given, every other item of the order unplaced.
    pub fn from_placed(placed: Vec<(usize, Placement)>, n_items: usize) -> Self {
        let mut on = vec![false; n_items];
        for &(i, _) in &placed {
            on[i] = true;
        }
        Self {
            placed,
            unplaced: (0..n_items).filter(|&i| !on[i]).collect(),
        }
    }

    pub fn boxes(&self, items: &[Item]) -> Vec<Aabb> {
        placed_boxes(&self.placed, items)
    }

    pub fn box_of(&self, k: usize, items: &[Item]) -> Aabb {
        let (i, p) = self.placed[k];
        placement_box(&items[i], p)
    }
}
