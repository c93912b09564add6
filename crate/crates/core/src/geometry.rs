//! Cuboid geometry on the integer millimetre grid.
//!
//! Every coordinate and dimension is an integer number of millimetres, so
//! containment, overlap and contact tests are exact. Only the derived ratios
//! (support fractions, KPI values) are floating point.
//!
//! The public predicates take [`PackedItem`]s. Hot paths (fitness evaluation,
//! post-processing) work on the flattened [`Aabb`] representation instead,
//! which carries no strings and is `Copy`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A cuboid article to be packed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Item {
    pub id: String,
    pub length_mm: u32,
    pub width_mm: u32,
    pub height_mm: u32,
    pub mass_g: u64,
}

impl Item {
    pub fn new(
        id: impl Into<String>,
        length_mm: u32,
        width_mm: u32,
        height_mm: u32,
        mass_g: u64,
    ) -> Result<Self> {
        let id = id.into();
        for (name, v) in [
            ("length_mm", length_mm),
            ("width_mm", width_mm),
            ("height_mm", height_mm),
        ] {
            if v == 0 {
                return Err(Error::Validation(format!(
                    "item `{id}`: {name} must be positive"
                )));
            }
        }
        Ok(Self {
            id,
            length_mm,
            width_mm,
            height_mm,
            mass_g,
        })
    }

    pub fn volume(&self) -> u64 {
        self.length_mm as u64 * self.width_mm as u64 * self.height_mm as u64
    }

    pub fn base_area(&self) -> u64 {
        self.length_mm as u64 * self.width_mm as u64
    }

    /// Footprint with the longer side first, so rotated copies compare equal.
    pub fn normalized_footprint(&self) -> (u32, u32) {
        let (a, b) = (self.length_mm, self.width_mm);
        if a >= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// The container: a pallet base `L x W`, a usable stacking height `H` and a
/// payload limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pallet {
    #[serde(rename = "L")]
    pub length_mm: u32,
    #[serde(rename = "W")]
    pub width_mm: u32,
    #[serde(rename = "H")]
    pub height_mm: u32,
    #[serde(rename = "M_max")]
    pub max_payload_g: u64,
}

impl Pallet {
    pub fn new(length_mm: u32, width_mm: u32, height_mm: u32, max_payload_g: u64) -> Result<Self> {
        if length_mm == 0 || width_mm == 0 || height_mm == 0 || max_payload_g == 0 {
            return Err(Error::Config(format!(
                "pallet {length_mm}x{width_mm}x{height_mm} with payload {max_payload_g} g: \
                 all dimensions and the payload must be positive"
            )));
        }
        Ok(Self {
            length_mm,
            width_mm,
            height_mm,
            max_payload_g,
        })
    }

    /// 1200 x 800 mm Euro pallet base.
    pub fn euro(height_mm: u32, max_payload_g: u64) -> Self {
        Self {
            length_mm: 1200,
            width_mm: 800,
            height_mm,
            max_payload_g,
        }
    }

    pub fn base_area(&self) -> u64 {
        self.length_mm as u64 * self.width_mm as u64
    }

    pub fn volume(&self) -> u64 {
        self.base_area() * self.height_mm as u64
    }

    /// Distance from the base centre to a base corner.
    pub fn d_max(&self) -> f64 {
        let hl = self.length_mm as f64 / 2.0;
        let hw = self.width_mm as f64 / 2.0;
        (hl * hl + hw * hw).sqrt()
    }
}

impl Default for Pallet {
    fn default() -> Self {
        Self::euro(2000, 1_500_000)
    }
}

/// Rotation about the vertical axis. Items are never tilted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub enum Rotation {
    #[default]
    Deg0,
    Deg90,
}

impl Rotation {
    pub const BOTH: [Rotation; 2] = [Rotation::Deg0, Rotation::Deg90];

    pub fn toggled(self) -> Self {
        match self {
            Rotation::Deg0 => Rotation::Deg90,
            Rotation::Deg90 => Rotation::Deg0,
        }
    }

    /// Composition of two rotations restricted to {0, 90}.
    pub fn compose(self, other: Rotation) -> Self {
        if self == other {
            Rotation::Deg0
        } else {
            Rotation::Deg90
        }
    }

    pub fn degrees(self) -> u16 {
        match self {
            Rotation::Deg0 => 0,
            Rotation::Deg90 => 90,
        }
    }

    pub fn from_degrees(deg: u16) -> Option<Self> {
        match deg {
            0 => Some(Rotation::Deg0),
            90 => Some(Rotation::Deg90),
            _ => None,
        }
    }

    /// Applies the rotation to an `(x, y)` extent pair.
    pub fn apply(self, len: u32, wid: u32) -> (u32, u32) {
        match self {
            Rotation::Deg0 => (len, wid),
            Rotation::Deg90 => (wid, len),
        }
    }
}

impl Serialize for Rotation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u16(self.degrees())
    }
}

impl<'de> Deserialize<'de> for Rotation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let deg = u16::deserialize(d)?;
        Rotation::from_degrees(deg)
            .ok_or_else(|| serde::de::Error::custom(format!("rot must be 0 or 90, got {deg}")))
    }
}

/// Lower-left-front corner plus z-rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Placement {
    pub x_mm: u32,
    pub y_mm: u32,
    pub z_mm: u32,
    pub rotation: Rotation,
}

impl Placement {
    pub fn new(x_mm: u32, y_mm: u32, z_mm: u32, rotation: Rotation) -> Self {
        Self {
            x_mm,
            y_mm,
            z_mm,
            rotation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedItem {
    pub item: Item,
    pub placement: Placement,
}

impl PackedItem {
    pub fn new(item: Item, placement: Placement) -> Self {
        Self { item, placement }
    }

    pub fn dims(&self) -> (u32, u32, u32) {
        effective_dims(&self.item, self.placement.rotation)
    }

    pub fn aabb(&self) -> Aabb {
        let (l, w, h) = self.dims();
        Aabb {
            min: [
                self.placement.x_mm as i64,
                self.placement.y_mm as i64,
                self.placement.z_mm as i64,
            ],
            size: [l as i64, w as i64, h as i64],
            mass_g: self.item.mass_g,
        }
    }
}

/// Extents of `item` along (x, y, z) after applying `rotation`.
pub fn effective_dims(item: &Item, rotation: Rotation) -> (u32, u32, u32) {
    let (l, w) = rotation.apply(item.length_mm, item.width_mm);
    (l, w, item.height_mm)
}

/// Axis-aligned box with its mass, the working representation for KPIs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Aabb {
    pub min: [i64; 3],
    pub size: [i64; 3],
    pub mass_g: u64,
}

impl Aabb {
    pub fn new(min: [i64; 3], size: [i64; 3], mass_g: u64) -> Self {
        Self { min, size, mass_g }
    }

    #[inline]
    pub fn max(&self, axis: usize) -> i64 {
        self.min[axis] + self.size[axis]
    }

    #[inline]
    pub fn top(&self) -> i64 {
        self.max(2)
    }

    pub fn volume(&self) -> i64 {
        self.size[0] * self.size[1] * self.size[2]
    }

    pub fn base_area(&self) -> i64 {
        self.size[0] * self.size[1]
    }

    pub fn center(&self) -> [f64; 3] {
        [
            self.min[0] as f64 + self.size[0] as f64 / 2.0,
            self.min[1] as f64 + self.size[1] as f64 / 2.0,
            self.min[2] as f64 + self.size[2] as f64 / 2.0,
        ]
    }

    pub fn footprint(&self) -> Rect {
        Rect::new(self.min[0], self.min[1], self.max(0), self.max(1))
    }
}

/// Half-open rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Rect {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn area(&self) -> i64 {
        (self.x1 - self.x0).max(0) * (self.y1 - self.y0).max(0)
    }

    pub fn intersect(&self, o: &Rect) -> Option<Rect> {
        let r = Rect::new(
            self.x0.max(o.x0),
            self.y0.max(o.y0),
            self.x1.min(o.x1),
            self.y1.min(o.y1),
        );
        (r.x0 < r.x1 && r.y0 < r.y1).then_some(r)
    }
}

/// Exact area of the union of `rects` clipped to `clip`.
///
/// Coordinate compression over the clipped edges; quadratic in the number of
/// rectangles, which is small for contact queries.
pub(crate) fn union_area(clip: Rect, rects: impl IntoIterator<Item = Rect>) -> i64 {
    let clipped: Vec<Rect> = rects.into_iter().filter_map(|r| r.intersect(&clip)).collect();
    match clipped.len() {
        0 => return 0,
        1 => return clipped[0].area(),
        _ => {}
    }
    let mut xs: Vec<i64> = clipped.iter().flat_map(|r| [r.x0, r.x1]).collect();
    let mut ys: Vec<i64> = clipped.iter().flat_map(|r| [r.y0, r.y1]).collect();
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();
    let mut area = 0;
    for xw in xs.windows(2) {
        for yw in ys.windows(2) {
            let covered = clipped
                .iter()
                .any(|r| r.x0 <= xw[0] && xw[1] <= r.x1 && r.y0 <= yw[0] && yw[1] <= r.y1);
            if covered {
                area += (xw[1] - xw[0]) * (yw[1] - yw[0]);
            }
        }
    }
    area
}

pub fn contains(pallet: &Pallet, packed: &PackedItem) -> bool {
    box_within(pallet, &packed.aabb())
}

pub fn box_within(pallet: &Pallet, b: &Aabb) -> bool {
    let bounds = [
        pallet.length_mm as i64,
        pallet.width_mm as i64,
        pallet.height_mm as i64,
    ];
    (0..3).all(|a| b.min[a] >= 0 && b.max(a) <= bounds[a])
}

#[inline]
fn interval_overlap(a0: i64, a1: i64, b0: i64, b1: i64) -> i64 {
    (a1.min(b1) - a0.max(b0)).max(0)
}

/// Intersection volume of two boxes in mm^3.
#[inline]
pub fn box_overlap(a: &Aabb, b: &Aabb) -> u64 {
    let mut v: i64 = 1;
    for axis in 0..3 {
        let o = interval_overlap(a.min[axis], a.max(axis), b.min[axis], b.max(axis));
        if o == 0 {
            return 0;
        }
        v *= o;
    }
    v as u64
}

#[inline]
pub fn boxes_intersect(a: &Aabb, b: &Aabb) -> bool {
    (0..3).all(|axis| a.min[axis] < b.max(axis) && b.min[axis] < a.max(axis))
}

pub fn vol_overlap(a: &PackedItem, b: &PackedItem) -> u64 {
    box_overlap(&a.aabb(), &b.aabb())
}

/// Summed pairwise intersection volume (each unordered pair once) divided by
/// the pallet volume.
pub fn overlap_fraction(items: &[PackedItem], pallet: &Pallet) -> f64 {
    let boxes: Vec<Aabb> = items.iter().map(PackedItem::aabb).collect();
    boxes_overlap_fraction(&boxes, pallet)
}

pub fn total_overlap_volume(boxes: &[Aabb]) -> u64 {
    let mut total = 0u64;
    for (i, a) in boxes.iter().enumerate() {
        for b in &boxes[i + 1..] {
            total += box_overlap(a, b);
        }
    }
    total
}

pub fn boxes_overlap_fraction(boxes: &[Aabb], pallet: &Pallet) -> f64 {
    total_overlap_volume(boxes) as f64 / pallet.volume() as f64
}

/// Maximum top face over the placed items; 0 when nothing is placed.
pub fn used_height(items: &[PackedItem]) -> u32 {
    items
        .iter()
        .map(|p| p.placement.z_mm + p.item.height_mm)
        .max()
        .unwrap_or(0)
}

pub fn boxes_used_height(boxes: &[Aabb]) -> i64 {
    boxes.iter().map(Aabb::top).max().unwrap_or(0)
}

/// Fraction of the item's bottom face resting on top faces exactly at its
/// base level. Ground items return 1.
pub fn base_support_ratio(item: &PackedItem, below: &[PackedItem]) -> f64 {
    let boxes: Vec<Aabb> = below.iter().map(PackedItem::aabb).collect();
    box_support_ratio(&item.aabb(), &boxes)
}

pub fn box_support_ratio(item: &Aabb, others: &[Aabb]) -> f64 {
    if item.min[2] == 0 {
        return 1.0;
    }
    let area = item.base_area();
    if area <= 0 {
        return 0.0;
    }
    let z = item.min[2];
    let covered = union_area(
        item.footprint(),
        others.iter().filter(|o| o.top() == z).map(Aabb::footprint),
    );
    (covered as f64 / area as f64).clamp(0.0, 1.0)
}

/// The four vertical faces of a box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Face {
    PosX,
    NegX,
    PosY,
    NegY,
}

impl Face {
    pub const ALL: [Face; 4] = [Face::PosX, Face::NegX, Face::PosY, Face::NegY];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceContact {
    /// Covered share of the face area, in `[0, 1]`.
    pub fraction: f64,
    /// Face lies flush with the pallet boundary.
    pub boundary: bool,
}

pub fn side_contact_fraction(
    item: &PackedItem,
    face: Face,
    neighbors: &[PackedItem],
    pallet: &Pallet,
) -> FaceContact {
    let boxes: Vec<Aabb> = neighbors.iter().map(PackedItem::aabb).collect();
    box_face_contact(&item.aabb(), face, &boxes, pallet)
}

pub fn box_face_contact(item: &Aabb, face: Face, others: &[Aabb], pallet: &Pallet) -> FaceContact {
    // normal axis, tangent axis in the base plane, plane coordinate, boundary coordinate
    let (axis, tangent, plane, boundary_at, faces_positive) = match face {
        Face::PosX => (0, 1, item.max(0), pallet.length_mm as i64, true),
        Face::NegX => (0, 1, item.min[0], 0, false),
        Face::PosY => (1, 0, item.max(1), pallet.width_mm as i64, true),
        Face::NegY => (1, 0, item.min[1], 0, false),
    };
    let boundary = plane == boundary_at;
    let face_rect = Rect::new(item.min[tangent], item.min[2], item.max(tangent), item.top());
    let face_area = face_rect.area();
    if face_area <= 0 {
        return FaceContact {
            fraction: 0.0,
            boundary,
        };
    }
    let touching = others.iter().filter(|o| {
        if faces_positive {
            o.min[axis] == plane
        } else {
            o.max(axis) == plane
        }
    });
    let covered = union_area(
        face_rect,
        touching.map(|o| Rect::new(o.min[tangent], o.min[2], o.max(tangent), o.top())),
    );
    FaceContact {
        fraction: (covered as f64 / face_area as f64).clamp(0.0, 1.0),
        boundary,
    }
}

/// Outcome of a full feasibility audit of a layout.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeasibilityReport {
    /// Indices of boxes sticking out of the pallet.
    pub out_of_bounds: Vec<usize>,
    /// Intersecting pairs `(i, j)` with `i < j`.
    pub overlapping_pairs: Vec<(usize, usize)>,
    /// Non-ground boxes below the support threshold.
    pub unsupported: Vec<usize>,
    pub total_mass_g: u64,
    pub payload_exceeded: bool,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.out_of_bounds.is_empty()
            && self.overlapping_pairs.is_empty()
            && self.unsupported.is_empty()
            && !self.payload_exceeded
    }
}

/// Checks containment, pairwise non-overlap, payload and minimum base
/// support against every other box in the layout.
pub fn check_feasibility(boxes: &[Aabb], pallet: &Pallet, tau_support: f64) -> FeasibilityReport {
    let mut report = FeasibilityReport::default();
    for (i, b) in boxes.iter().enumerate() {
        if !box_within(pallet, b) {
            report.out_of_bounds.push(i);
        }
        for (j, o) in boxes.iter().enumerate().skip(i + 1) {
            if boxes_intersect(b, o) {
                report.overlapping_pairs.push((i, j));
            }
        }
        if box_support_ratio(b, boxes) < tau_support {
            report.unsupported.push(i);
        }
        report.total_mass_g += b.mass_g;
    }
    report.payload_exceeded = report.total_mass_g > pallet.max_payload_g;
    report
}
