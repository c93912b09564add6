//! Packing quality indicators, the scalar fitness and evaluation metrics.
//!
//! Every indicator maps a layout to `[0, 1]` with 1 as the optimum. The
//! functions here operate on [`Aabb`] slices; [`PackedItem`] wrappers are
//! provided for callers holding full item records.
//!
//! Degenerate layouts get fixed values: coverage of an empty residual set is
//! 1, absolute density at zero used height is 0, relative density with no
//! cells under the envelope is 1, surface support with no stacked items is 1,
//! and the tall-item score with no slender items is 1. Centre-of-gravity
//! scores fall back to volume weighting when all masses are zero.

mod report;
mod voxel;

pub use report::{eval_metrics, validity_mask, KpiReport};
pub use voxel::VoxelGrid;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    box_face_contact, box_support_ratio, boxes_overlap_fraction, boxes_used_height, Aabb, Face, PackedItem, Pallet,
};

/// Lower clip applied to the scalar fitness.
pub const FITNESS_FLOOR: f64 = 1e-6;

/// The seven fitness indicators.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct KpiVector {
    pub coverage: f64,
    pub abs_den: f64,
    pub rel_den: f64,
    pub side_sup: f64,
    pub surf_sup: f64,
    pub tall_item: f64,
    pub cog2d: f64,
}

impl KpiVector {
    pub fn as_array(&self) -> [f64; 7] {
        [
            self.coverage,
            self.abs_den,
            self.rel_den,
            self.side_sup,
            self.surf_sup,
            self.tall_item,
            self.cog2d,
        ]
    }

    pub fn from_array(a: [f64; 7]) -> Self {
        Self {
            coverage: a[0],
            abs_den: a[1],
            rel_den: a[2],
            side_sup: a[3],
            surf_sup: a[4],
            tall_item: a[5],
            cog2d: a[6],
        }
    }

    /// Computes every indicator except coverage, which needs the residual set.
    pub fn compute(boxes: &[Aabb], pallet: &Pallet, cfg: &KpiConfig, coverage: f64) -> Self {
        let h_star = boxes_used_height(boxes);
        Self {
            coverage,
            abs_den: abs_density_boxes(boxes, pallet),
            rel_den: rel_density_boxes(boxes, pallet, cfg.voxel_grid),
            side_sup: side_support_boxes(boxes, pallet, cfg.tau_side),
            surf_sup: surf_support_boxes(boxes, cfg.tau_surface),
            tall_item: tall_item_boxes(boxes, pallet, h_star),
            cog2d: cog2d_boxes(boxes, pallet),
        }
    }
}

/// Scalarization weights, in [`KpiVector`] field order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 7]", into = "[f64; 7]")]
pub struct KpiWeights([f64; 7]);

impl KpiWeights {
    pub fn new(alphas: [f64; 7]) -> Result<Self> {
        if alphas.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::Config(format!("kpi weights must be non-negative: {alphas:?}")));
        }
        let sum: f64 = alphas.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("kpi weights must sum to 1, got {sum}")));
        }
        Ok(Self(alphas))
    }

    pub fn equal() -> Self {
        Self([1.0 / 7.0; 7])
    }

    pub fn as_array(&self) -> [f64; 7] {
        self.0
    }
}

impl Default for KpiWeights {
    fn default() -> Self {
        Self::equal()
    }
}

impl TryFrom<[f64; 7]> for KpiWeights {
    type Error = Error;

    fn try_from(a: [f64; 7]) -> Result<Self> {
        Self::new(a)
    }
}

impl From<KpiWeights> for [f64; 7] {
    fn from(w: KpiWeights) -> Self {
        w.0
    }
}

impl std::str::FromStr for KpiWeights {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("weights `{s}`: {e}")))?;
        let arr: [f64; 7] = parts
            .try_into()
            .map_err(|v: Vec<f64>| Error::Config(format!("expected 7 weights, got {}", v.len())))?;
        Self::new(arr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KpiConfig {
    pub weights: KpiWeights,
    pub tau_side: f64,
    pub tau_surface: f64,
    pub voxel_grid: usize,
}

impl Default for KpiConfig {
    fn default() -> Self {
        Self {
            weights: KpiWeights::equal(),
            tau_side: 0.2,
            tau_surface: 0.75,
            voxel_grid: 20,
        }
    }
}

impl KpiConfig {
    pub fn validate(&self) -> Result<()> {
        KpiWeights::new(self.weights.0)?;
        for (name, v) in [("tau_side", self.tau_side), ("tau_surface", self.tau_surface)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if self.voxel_grid == 0 {
            return Err(Error::Config("voxel_grid must be positive".into()));
        }
        Ok(())
    }
}

fn boxes_of(items: &[PackedItem]) -> Vec<Aabb> {
    items.iter().map(PackedItem::aabb).collect()
}

/// Share of residual items that are placed; 1 for an empty residual set.
pub fn coverage(placed_residual: usize, residual_total: usize) -> f64 {
    if residual_total == 0 {
        1.0
    } else {
        (placed_residual as f64 / residual_total as f64).clamp(0.0, 1.0)
    }
}

pub fn abs_density(items: &[PackedItem], pallet: &Pallet) -> f64 {
    abs_density_boxes(&boxes_of(items), pallet)
}

pub fn abs_density_boxes(boxes: &[Aabb], pallet: &Pallet) -> f64 {
    let h_star = boxes_used_height(boxes);
    if h_star <= 0 {
        return 0.0;
    }
    let vol: i64 = boxes.iter().map(Aabb::volume).sum();
    (vol as f64 / (pallet.base_area() as f64 * h_star as f64)).clamp(0.0, 1.0)
}

pub fn rel_density(items: &[PackedItem], pallet: &Pallet) -> f64 {
    rel_density_boxes(&boxes_of(items), pallet, 20)
}

pub fn rel_density_boxes(boxes: &[Aabb], pallet: &Pallet, grid: usize) -> f64 {
    let grid = VoxelGrid::new(boxes, pallet, boxes_used_height(boxes), grid);
    let (occupied, under) = grid.envelope_counts();
    if under == 0 {
        1.0
    } else {
        occupied as f64 / under as f64
    }
}

pub fn side_support(items: &[PackedItem], pallet: &Pallet, tau_side: f64) -> f64 {
    side_support_boxes(&boxes_of(items), pallet, tau_side)
}

/// Per item, the share of non-boundary vertical faces with contact at least
/// `tau_side`, averaged over items. Items whose faces are all flush with the
/// pallet boundary score 1.
pub fn side_support_boxes(boxes: &[Aabb], pallet: &Pallet, tau_side: f64) -> f64 {
    if boxes.is_empty() {
        return 1.0;
    }
    let mut total = 0.0;
    for b in boxes {
        let (mut faces, mut supported) = (0u32, 0u32);
        for face in Face::ALL {
            let c = box_face_contact(b, face, boxes, pallet);
            if c.boundary {
                continue;
            }
            faces += 1;
            supported += (c.fraction >= tau_side) as u32;
        }
        total += if faces == 0 { 1.0 } else { supported as f64 / faces as f64 };
    }
    total / boxes.len() as f64
}

pub fn surf_support(items: &[PackedItem], tau_surface: f64) -> f64 {
    surf_support_boxes(&boxes_of(items), tau_surface)
}

/// Share of stacked (z > 0) items whose base support exceeds `tau_surface`.
pub fn surf_support_boxes(boxes: &[Aabb], tau_surface: f64) -> f64 {
    let (mut stacked, mut ok) = (0usize, 0usize);
    for b in boxes.iter().filter(|b| b.min[2] > 0) {
        stacked += 1;
        ok += (box_support_ratio(b, boxes) > tau_surface) as usize;
    }
    if stacked == 0 {
        1.0
    } else {
        ok as f64 / stacked as f64
    }
}

pub fn tall_item_score(items: &[PackedItem], pallet: &Pallet, h_star: u32) -> f64 {
    tall_item_boxes(&boxes_of(items), pallet, h_star as i64)
}

/// Penalizes slender items (height above the geometric mean of the base
/// sides) that sit off-centre or high in the stack.
pub fn tall_item_boxes(boxes: &[Aabb], pallet: &Pallet, h_star: i64) -> f64 {
    let (cx, cy) = (pallet.length_mm as f64 / 2.0, pallet.width_mm as f64 / 2.0);
    let d_max = pallet.d_max();
    let (mut n, mut sum) = (0usize, 0.0);
    for b in boxes {
        let r = b.size[2] as f64 / ((b.size[0] * b.size[1]) as f64).sqrt();
        if r <= 1.0 {
            continue;
        }
        let c = b.center();
        let d = ((c[0] - cx).powi(2) + (c[1] - cy).powi(2)).sqrt();
        let elevation = if h_star > 0 { b.min[2] as f64 / h_star as f64 } else { 0.0 };
        sum += r * (0.7 * d / d_max + 0.3 * elevation);
        n += 1;
    }
    if n == 0 {
        1.0
    } else {
        (1.0 - sum / n as f64).clamp(0.0, 1.0)
    }
}

/// Mass-weighted centre of the boxes; volume-weighted when all masses are 0.
pub fn centroid(boxes: &[Aabb]) -> Option<[f64; 3]> {
    if boxes.is_empty() {
        return None;
    }
    let total_mass: u64 = boxes.iter().map(|b| b.mass_g).sum();
    let weight = |b: &Aabb| {
        if total_mass > 0 {
            b.mass_g as f64
        } else {
            b.volume() as f64
        }
    };
    let total: f64 = boxes.iter().map(weight).sum();
    if total <= 0.0 {
        return None;
    }
    let mut c = [0.0; 3];
    for b in boxes {
        let w = weight(b);
        let bc = b.center();
        for a in 0..3 {
            c[a] += w * bc[a];
        }
    }
    Some(c.map(|v| v / total))
}

pub fn cog2d(items: &[PackedItem], pallet: &Pallet) -> f64 {
    cog2d_boxes(&boxes_of(items), pallet)
}

pub fn cog2d_boxes(boxes: &[Aabb], pallet: &Pallet) -> f64 {
    let Some(c) = centroid(boxes) else { return 1.0 };
    let dx = c[0] - pallet.length_mm as f64 / 2.0;
    let dy = c[1] - pallet.width_mm as f64 / 2.0;
    (1.0 - (dx * dx + dy * dy).sqrt() / pallet.d_max()).clamp(0.0, 1.0)
}

/// Spatial balance: offset of the centroid from the base centre normalized
/// by the diagonal `sqrt(d_max^2 + H*^2)`.
pub fn cog3d_boxes(boxes: &[Aabb], pallet: &Pallet) -> f64 {
    let Some(c) = centroid(boxes) else { return 1.0 };
    let h_star = boxes_used_height(boxes) as f64;
    let dx = c[0] - pallet.length_mm as f64 / 2.0;
    let dy = c[1] - pallet.width_mm as f64 / 2.0;
    let diag = (pallet.d_max().powi(2) + h_star * h_star).sqrt();
    (1.0 - (dx * dx + dy * dy + c[2] * c[2]).sqrt() / diag).clamp(0.0, 1.0)
}

/// Weighted KPI sum minus the capped overlap penalty, clipped at
/// [`FITNESS_FLOOR`].
pub fn scalar_fitness(kpis: &KpiVector, overlap: f64, weights: &KpiWeights) -> f64 {
    let weighted: f64 = kpis.as_array().iter().zip(weights.0).map(|(k, a)| k * a).sum();
    (weighted - overlap.min(1.0)).max(FITNESS_FLOOR)
}

/// Fitness of a full layout given how many residual items it places.
pub fn fitness(
    boxes: &[Aabb],
    placed_residual: usize,
    residual_total: usize,
    pallet: &Pallet,
    cfg: &KpiConfig,
) -> f64 {
    let kpis = KpiVector::compute(boxes, pallet, cfg, coverage(placed_residual, residual_total));
    scalar_fitness(&kpis, boxes_overlap_fraction(boxes, pallet), &cfg.weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Item, Placement, Rotation};

    fn euro() -> Pallet {
        Pallet::euro(2000, 1_000_000)
    }

    fn packed(l: u32, w: u32, h: u32, x: u32, y: u32, z: u32) -> PackedItem {
        PackedItem::new(Item::new("i", l, w, h, 1000).unwrap(), Placement::new(x, y, z, Rotation::Deg0))
    }

    #[test]
    fn coverage_examples() {
        assert_eq!(coverage(4, 4), 1.0);
        assert_eq!(coverage(2, 4), 0.5);
        assert_eq!(coverage(0, 0), 1.0);
    }

    #[test]
    fn abs_density_examples() {
        assert_eq!(abs_density(&[packed(1200, 800, 500, 0, 0, 0)], &euro()), 1.0);
        assert_eq!(abs_density(&[packed(600, 800, 500, 0, 0, 0)], &euro()), 0.5);
        assert_eq!(abs_density(&[], &euro()), 0.0);
    }

    #[test]
    fn rel_density_examples() {
        let pallet = Pallet::new(100, 100, 100, 1).unwrap();
        assert_eq!(rel_density(&[packed(100, 100, 30, 0, 0, 0)], &pallet), 1.0);

        // two towers with an empty strip between them
        let towers = [packed(40, 100, 100, 0, 0, 0), packed(40, 100, 100, 60, 0, 0)];
        assert_eq!(rel_density(&towers, &pallet), 1.0);

        // slab on top of a half-height void over the whole base
        let bridge = [packed(100, 100, 50, 0, 0, 50)];
        assert_eq!(rel_density(&bridge, &pallet), 0.5);
    }

    #[test]
    fn side_support_examples() {
        assert_eq!(side_support(&[packed(1200, 800, 300, 0, 0, 0)], &euro(), 0.2), 1.0);
        assert_eq!(side_support(&[packed(100, 100, 100, 500, 300, 0)], &euro(), 0.2), 0.0);
        let pair = [packed(100, 100, 100, 500, 300, 0), packed(100, 100, 100, 600, 300, 0)];
        assert_eq!(side_support(&pair, &euro(), 0.2), 0.25);
        assert_eq!(side_support(&[], &euro(), 0.2), 1.0);
    }

    #[test]
    fn surf_support_examples() {
        assert_eq!(surf_support(&[packed(100, 100, 100, 0, 0, 0)], 0.75), 1.0);
        let full = [packed(100, 100, 100, 0, 0, 0), packed(100, 100, 100, 0, 0, 100)];
        assert_eq!(surf_support(&full, 0.75), 1.0);
        let half = [packed(100, 100, 100, 0, 0, 0), packed(100, 100, 100, 50, 0, 100)];
        assert_eq!(surf_support(&half, 0.75), 0.0);
    }

    #[test]
    fn tall_item_examples() {
        let pallet = euro();
        assert_eq!(tall_item_score(&[packed(300, 300, 100, 0, 0, 0)], &pallet, 100), 1.0);
        assert_eq!(tall_item_score(&[packed(100, 100, 300, 550, 350, 0)], &pallet, 300), 1.0);
        // footprint centre at the pallet corner (box hangs outside; direct evaluation)
        let b = Aabb::new([-50, -50, 0], [100, 100, 300], 1);
        let p = 3.0 * 0.7 * 1.0;
        assert!((p - 2.1f64).abs() < 1e-12);
        assert_eq!(tall_item_boxes(&[b], &pallet, 300), 0.0);
    }

    #[test]
    fn tall_item_direct_evaluation() {
        let pallet = euro();
        // off-centre: r = 2, centre at (300, 200) -> d/d_max = 0.5, z/H* = 0.5 -> p = 1
        // centred on the floor: p = 0; mean 0.5
        let off = Aabb::new([250, 150, 200], [100, 100, 200], 1);
        let centred = Aabb::new([550, 350, 0], [100, 100, 200], 1);
        let s = tall_item_boxes(&[off, centred], &pallet, 400);
        assert!((s - 0.5).abs() < 1e-12, "{s}");
    }

    #[test]
    fn cog2d_examples() {
        let pallet = euro();
        assert_eq!(cog2d(&[packed(200, 200, 100, 500, 300, 0)], &pallet), 1.0);
        // centre at (L/4, W/4)
        let q = cog2d(&[packed(200, 200, 100, 200, 100, 0)], &pallet);
        assert!((q - 0.5).abs() < 1e-12);
        let pair = [packed(100, 100, 100, 0, 0, 0), packed(100, 100, 100, 1100, 700, 0)];
        assert!((cog2d(&pair, &pallet) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weights_must_sum_to_one() {
        assert!(KpiWeights::new([0.2; 7]).is_err());
        assert!(KpiWeights::new([-0.1, 0.2, 0.2, 0.2, 0.2, 0.2, 0.1]).is_err());
        assert!("0.1,0.1,0.1,0.1,0.2,0.2,0.2".parse::<KpiWeights>().is_ok());
        assert!("0.5,0.5".parse::<KpiWeights>().is_err());
    }

    #[test]
    fn fitness_examples() {
        let w = KpiWeights::equal();
        let ones = KpiVector::from_array([1.0; 7]);
        assert!((scalar_fitness(&ones, 0.0, &w) - 1.0).abs() < 1e-12);
        assert_eq!(scalar_fitness(&KpiVector::default(), 1.5, &w), FITNESS_FLOOR);
        let six = KpiVector::from_array([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0]);
        assert!((scalar_fitness(&six, 0.0, &w) - 6.0 / 7.0).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn layout() -> impl Strategy<Value = Vec<Aabb>> {
            proptest::collection::vec(
                (0i64..1300, 0i64..900, 0i64..2100, 1i64..700, 1i64..700, 1i64..900, 0u64..50_000),
                0..25,
            )
            .prop_map(|v| v.into_iter().map(|(x, y, z, a, b, c, m)| Aabb::new([x, y, z], [a, b, c], m)).collect())
        }

        fn kpis(boxes: &[Aabb]) -> KpiVector {
            KpiVector::compute(boxes, &Pallet::euro(2000, 1_000_000), &KpiConfig::default(), 0.5)
        }

        proptest! {
            #[test]
            fn every_kpi_in_unit_interval(boxes in layout()) {
                for k in kpis(&boxes).as_array() {
                    prop_assert!((0.0..=1.0).contains(&k), "{k}");
                }
                let pallet = Pallet::euro(2000, 1_000_000);
                prop_assert!((0.0..=1.0).contains(&cog3d_boxes(&boxes, &pallet)));
                prop_assert!(fitness(&boxes, 1, 2, &pallet, &KpiConfig::default()) >= FITNESS_FLOOR);
            }

            #[test]
            fn tall_item_is_permutation_invariant(mut boxes in layout(), seed in any::<u64>()) {
                use rand::{seq::SliceRandom, SeedableRng};
                let pallet = Pallet::euro(2000, 1_000_000);
                let h = boxes_used_height(&boxes);
                let before = tall_item_boxes(&boxes, &pallet, h);
                boxes.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
                prop_assert!((before - tall_item_boxes(&boxes, &pallet, h)).abs() < 1e-12);
            }

            #[test]
            fn cog2d_ignores_uniform_mass_scaling(boxes in layout(), k in 1u64..50) {
                let pallet = Pallet::euro(2000, 1_000_000);
                let scaled: Vec<Aabb> = boxes.iter().map(|b| Aabb { mass_g: b.mass_g * k, ..*b }).collect();
                prop_assert!((cog2d_boxes(&boxes, &pallet) - cog2d_boxes(&scaled, &pallet)).abs() < 1e-9);
            }

            #[test]
            fn fitness_monotone_in_each_kpi(
                base in proptest::array::uniform7(0.0f64..1.0),
                k in 0usize..7,
                bump in 0.0f64..1.0,
                overlap in 0.0f64..0.5,
                extra in 0.001f64..0.4,
            ) {
                let w = KpiWeights::equal();
                let lo = KpiVector::from_array(base);
                let mut hi_arr = base;
                hi_arr[k] = (hi_arr[k] + bump).min(1.0);
                let hi = KpiVector::from_array(hi_arr);
                prop_assert!(scalar_fitness(&hi, overlap, &w) >= scalar_fitness(&lo, overlap, &w));
                let raw = |o: f64| lo.as_array().iter().zip(w.as_array()).map(|(a, b)| a * b).sum::<f64>() - o;
                if raw(overlap + extra) > FITNESS_FLOOR {
                    prop_assert!(scalar_fitness(&lo, overlap + extra, &w) < scalar_fitness(&lo, overlap, &w));
                }
            }
        }
    }
}
