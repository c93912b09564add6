//! MaxRects free-rectangle bookkeeping over the pallet base.

use serde::{Deserialize, Serialize};

use crate::geometry::Rotation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FreeRect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl FreeRect {
    fn right(&self) -> u32 {
        self.x + self.w
    }

    fn top(&self) -> u32 {
        self.y + self.h
    }

    pub fn contains(&self, o: &FreeRect) -> bool {
        self.x <= o.x && self.y <= o.y && o.right() <= self.right() && o.top() <= self.top()
    }

    fn intersects(&self, o: &FreeRect) -> bool {
        self.x < o.right() && o.x < self.right() && self.y < o.top() && o.y < self.top()
    }
}

/// Free-rectangle choice heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaxRectsRule {
    #[default]
    BestShortSideFit,
    BestLongSideFit,
    BestAreaFit,
    BottomLeft,
}

impl std::str::FromStr for MaxRectsRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "best-short-side-fit" | "bssf" => Ok(Self::BestShortSideFit),
            "best-long-side-fit" | "blsf" => Ok(Self::BestLongSideFit),
            "best-area-fit" | "baf" => Ok(Self::BestAreaFit),
            "bottom-left" | "bl" => Ok(Self::BottomLeft),
            other => Err(format!("unknown maxrects rule `{other}`")),
        }
    }
}

/// Set of maximal free rectangles in a `width x height` plane.
#[derive(Debug, Clone)]
pub struct FreeRectStore {
    width: u32,
    height: u32,
    free: Vec<FreeRect>,
}

impl FreeRectStore {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            free: vec![FreeRect {
                x: 0,
                y: 0,
                w: width,
                h: height,
            }],
        }
    }

    pub fn free_rects(&self) -> &[FreeRect] {
        &self.free
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    /// Finds a position for a `len x wid` footprint over both rotations,
    /// commits it and returns the chosen corner. Ties go to smaller y, then
    /// smaller x, then the unrotated footprint.
    pub fn insert(&mut self, len: u32, wid: u32, rule: MaxRectsRule) -> Option<(u32, u32, Rotation)> {
        debug_assert!(len > 0 && wid > 0);
        let mut best: Option<((u64, u64, u32, u32), FreeRect, Rotation)> = None;
        for fr in &self.free {
            for rot in Rotation::BOTH {
                let (l, w) = rot.apply(len, wid);
                if l > fr.w || w > fr.h {
                    continue;
                }
                let dx = (fr.w - l) as u64;
                let dy = (fr.h - w) as u64;
                let (s1, s2) = match rule {
                    MaxRectsRule::BestShortSideFit => (dx.min(dy), dx.max(dy)),
                    MaxRectsRule::BestLongSideFit => (dx.max(dy), dx.min(dy)),
                    MaxRectsRule::BestAreaFit => (
                        fr.w as u64 * fr.h as u64 - l as u64 * w as u64,
                        dx.min(dy),
                    ),
                    MaxRectsRule::BottomLeft => ((fr.y + w) as u64, fr.x as u64),
                };
                let score = (s1, s2, fr.y, fr.x);
                if best.as_ref().is_none_or(|(b, _, _)| score < *b) {
                    best = Some((score, FreeRect { x: fr.x, y: fr.y, w: l, h: w }, rot));
                }
            }
        }
        let (_, placed, rot) = best?;
        self.occupy(placed);
        Some((placed.x, placed.y, rot))
    }

    /// Removes `used` from the free space, splitting and pruning.
    pub fn occupy(&mut self, used: FreeRect) {
        let mut next = Vec::with_capacity(self.free.len() + 4);
        for fr in self.free.drain(..) {
            if !fr.intersects(&used) {
                next.push(fr);
                continue;
            }
            if used.x > fr.x {
                next.push(FreeRect { x: fr.x, y: fr.y, w: used.x - fr.x, h: fr.h });
            }
            if used.right() < fr.right() {
                next.push(FreeRect { x: used.right(), y: fr.y, w: fr.right() - used.right(), h: fr.h });
            }
            if used.y > fr.y {
                next.push(FreeRect { x: fr.x, y: fr.y, w: fr.w, h: used.y - fr.y });
            }
            if used.top() < fr.top() {
                next.push(FreeRect { x: fr.x, y: used.top(), w: fr.w, h: fr.top() - used.top() });
            }
        }
        self.free = prune(next);
    }
}

fn prune(mut rects: Vec<FreeRect>) -> Vec<FreeRect> {
    rects.sort_by_key(|r| (r.y, r.x, r.w, r.h));
    rects.dedup();
    let keep: Vec<bool> = (0..rects.len())
        .map(|i| {
            !rects
                .iter()
                .enumerate()
                .any(|(j, o)| j != i && o.contains(&rects[i]))
        })
        .collect();
    rects
        .into_iter()
        .zip(keep)
        .filter_map(|(r, k)| k.then_some(r))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_fill_empties_store() {
        let mut s = FreeRectStore::new(1200, 800);
        assert_eq!(s.insert(1200, 800, MaxRectsRule::default()), Some((0, 0, Rotation::Deg0)));
        assert!(s.free_rects().is_empty());
        assert_eq!(s.insert(1, 1, MaxRectsRule::default()), None);
    }

    #[test]
    fn rotation_rescues_transposed_footprint() {
        let mut s = FreeRectStore::new(1200, 800);
        assert_eq!(s.insert(800, 1200, MaxRectsRule::default()), Some((0, 0, Rotation::Deg90)));
    }

    #[test]
    fn halves_tile_the_base() {
        let mut s = FreeRectStore::new(1200, 800);
        assert_eq!(s.insert(600, 800, MaxRectsRule::default()), Some((0, 0, Rotation::Deg0)));
        assert_eq!(s.insert(600, 800, MaxRectsRule::default()), Some((600, 0, Rotation::Deg0)));
        assert!(s.free_rects().is_empty());
    }

    proptest! {
        #[test]
        fn store_stays_maximal_and_disjoint_from_placements(
            sizes in proptest::collection::vec((20u32..400, 20u32..400), 1..25),
            rule in prop_oneof![
                Just(MaxRectsRule::BestShortSideFit),
                Just(MaxRectsRule::BestLongSideFit),
                Just(MaxRectsRule::BestAreaFit),
                Just(MaxRectsRule::BottomLeft),
            ],
        ) {
            let mut s = FreeRectStore::new(1200, 800);
            let mut placed: Vec<FreeRect> = Vec::new();
            for (l, w) in sizes {
                if let Some((x, y, rot)) = s.insert(l, w, rule) {
                    let (l, w) = rot.apply(l, w);
                    let r = FreeRect { x, y, w: l, h: w };
                    prop_assert!(r.right() <= 1200 && r.top() <= 800);
                    for p in &placed { prop_assert!(!p.intersects(&r)); }
                    placed.push(r);
                }
                let free = s.free_rects();
                for (i, a) in free.iter().enumerate() {
                    prop_assert!(a.right() <= 1200 && a.top() <= 800);
                    for p in &placed { prop_assert!(!p.intersects(a)); }
                    for (j, b) in free.iter().enumerate() {
                        if i != j { prop_assert!(!b.contains(a)); }
                    }
                }
            }
        }
    }
}
