//! Incremental 2D placement on the pallet base: Bottom-Left and
//! Extreme-Point rules.

use serde::{Deserialize, Serialize};

use crate::geometry::{Rect, Rotation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementRule {
    BottomLeft,
    ExtremePoint,
}

/// 2D position chosen for a footprint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Spot {
    pub x: u32,
    pub y: u32,
    pub rotation: Rotation,
}

/// Occupied rectangles in a `len x wid` plane plus the current extreme points.
#[derive(Debug, Clone)]
pub struct Plane {
    len: i64,
    wid: i64,
    rects: Vec<Rect>,
    extreme: Vec<(i64, i64)>,
}

impl Plane {
    pub fn new(len: u32, wid: u32) -> Self {
        Self {
            len: len as i64,
            wid: wid as i64,
            rects: Vec::new(),
            extreme: vec![(0, 0)],
        }
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn is_free(&self, r: &Rect) -> bool {
        r.x0 >= 0
            && r.y0 >= 0
            && r.x1 <= self.len
            && r.y1 <= self.wid
            && self.rects.iter().all(|o| o.intersect(r).is_none())
    }

    fn try_at(&self, x: i64, y: i64, len: u32, wid: u32) -> Option<Spot> {
        Rotation::BOTH.into_iter().find_map(|rot| {
            let (l, w) = rot.apply(len, wid);
            let r = Rect::new(x, y, x + l as i64, y + w as i64);
            self.is_free(&r).then_some(Spot {
                x: x as u32,
                y: y as u32,
                rotation: rot,
            })
        })
    }

    /// Lowest-y, then lowest-x feasible corner among the contact candidates
    /// (origin and the right/top edges of occupied rectangles).
    pub fn bottom_left(&self, len: u32, wid: u32) -> Option<Spot> {
        let mut xs: Vec<i64> = std::iter::once(0).chain(self.rects.iter().map(|r| r.x1)).collect();
        let mut ys: Vec<i64> = std::iter::once(0).chain(self.rects.iter().map(|r| r.y1)).collect();
        xs.sort_unstable();
        xs.dedup();
        ys.sort_unstable();
        ys.dedup();
        for &y in &ys {
            for &x in &xs {
                if let Some(s) = self.try_at(x, y, len, wid) {
                    return Some(s);
                }
            }
        }
        None
    }

    /// First feasible extreme point ordered by `x + y`, then y, then x.
    pub fn extreme_point(&self, len: u32, wid: u32) -> Option<Spot> {
        let mut eps = self.extreme.clone();
        eps.sort_by_key(|&(x, y)| (x + y, y, x));
        eps.into_iter().find_map(|(x, y)| self.try_at(x, y, len, wid))
    }

    pub fn find(&self, rule: PlacementRule, len: u32, wid: u32) -> Option<Spot> {
        match rule {
            PlacementRule::BottomLeft => self.bottom_left(len, wid),
            PlacementRule::ExtremePoint => self.extreme_point(len, wid),
        }
    }

    /// Marks the rectangle as occupied and refreshes the extreme points.
    pub fn occupy(&mut self, r: Rect) {
        self.rects.push(r);
        let mut fresh = vec![(r.x1, r.y0), (r.x0, r.y1)];
        fresh.push((r.x1, self.project_down(r.x1, r.y0)));
        fresh.push((self.project_left(r.x0, r.y1), r.y1));
        self.extreme.extend(fresh);
        let (len, wid) = (self.len, self.wid);
        let rects = &self.rects;
        self.extreme.retain(|&(x, y)| {
            x < len && y < wid && !rects.iter().any(|o| o.x0 <= x && x < o.x1 && o.y0 <= y && y < o.y1)
        });
        self.extreme.sort_unstable();
        self.extreme.dedup();
    }

    pub fn place(&mut self, rule: PlacementRule, len: u32, wid: u32) -> Option<Spot> {
        let spot = self.find(rule, len, wid)?;
        let (l, w) = spot.rotation.apply(len, wid);
        self.occupy(Rect::new(spot.x as i64, spot.y as i64, spot.x as i64 + l as i64, spot.y as i64 + w as i64));
        Some(spot)
    }

    fn project_down(&self, x: i64, y: i64) -> i64 {
        self.rects
            .iter()
            .filter(|o| o.x0 <= x && x < o.x1 && o.y1 <= y)
            .map(|o| o.y1)
            .max()
            .unwrap_or(0)
    }

    fn project_left(&self, x: i64, y: i64) -> i64 {
        self.rects
            .iter()
            .filter(|o| o.y0 <= y && y < o.y1 && o.x1 <= x)
            .map(|o| o.x1)
            .max()
            .unwrap_or(0)
    }
}

fn place_all(rule: PlacementRule, footprints: &[(u32, u32)], len: u32, wid: u32) -> Vec<Option<Spot>> {
    let mut plane = Plane::new(len, wid);
    footprints.iter().map(|&(l, w)| plane.place(rule, l, w)).collect()
}

/// Places footprints in input order with the Bottom-Left rule; `None`
/// marks footprints that fit nowhere.
pub fn bottom_left_place(footprints: &[(u32, u32)], len: u32, wid: u32) -> Vec<Option<Spot>> {
    place_all(PlacementRule::BottomLeft, footprints, len, wid)
}

pub fn extreme_point_place(footprints: &[(u32, u32)], len: u32, wid: u32) -> Vec<Option<Spot>> {
    place_all(PlacementRule::ExtremePoint, footprints, len, wid)
}
