use serde::{Deserialize, Serialize};

use super::{
    abs_density_boxes, cog2d_boxes, cog3d_boxes, rel_density_boxes, side_support_boxes, surf_support_boxes, KpiConfig,
};
use crate::geometry::{box_within, boxes_intersect, boxes_used_height, total_overlap_volume, Aabb, Pallet};

/// Evaluation metrics for one order. Every KPI is already scaled by the
/// corrected packing efficiency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiReport {
    pub order_id: String,
    pub n_items: usize,
    pub n_placed: usize,
    pub abs_den: f64,
    pub rel_den: f64,
    pub hw_ratio: f64,
    pub side_sup: f64,
    pub surf_sup: f64,
    pub cog2d: f64,
    pub cog3d: f64,
    pub corrected_eff: f64,
    pub runtime_s: f64,
    /// Placed items passing containment, non-overlap and payload.
    pub n_valid: usize,
    pub overlap_volume_mm3: u64,
}

impl KpiReport {
    pub fn has_overlap(&self) -> bool {
        self.overlap_volume_mm3 > 0
    }
}

/// Per-box spatial validity: inside the pallet, touching no other box, and
/// within the payload when accumulated bottom-up. Support is not a validity
/// condition here; the post-processing validation enforces it.
pub fn validity_mask(boxes: &[Aabb], pallet: &Pallet) -> Vec<bool> {
    let mut valid: Vec<bool> = boxes
        .iter()
        .enumerate()
        .map(|(i, b)| box_within(pallet, b) && !boxes.iter().enumerate().any(|(j, o)| j != i && boxes_intersect(b, o)))
        .collect();
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by_key(|&i| (boxes[i].min[2], boxes[i].min[0] + boxes[i].min[1], i));
    let mut mass = 0u64;
    for i in order {
        if !valid[i] {
            continue;
        }
        if mass + boxes[i].mass_g > pallet.max_payload_g {
            valid[i] = false;
        } else {
            mass += boxes[i].mass_g;
        }
    }
    valid
}

/// Computes the evaluation metric set for a finished layout.
///
/// `total_items` is the order size (placed plus unplaced). The corrected
/// efficiency is `valid / total_items` and multiplies every reported KPI.
pub fn eval_metrics(
    order_id: &str,
    boxes: &[Aabb],
    pallet: &Pallet,
    total_items: usize,
    cfg: &KpiConfig,
) -> KpiReport {
    let n_valid = validity_mask(boxes, pallet).iter().filter(|v| **v).count();
    let corrected_eff = if total_items == 0 {
        0.0
    } else {
        (n_valid as f64 / total_items as f64).clamp(0.0, 1.0)
    };
    let h_star = boxes_used_height(boxes);
    let (abs_den, rel_den, hw, side, surf, c2, c3) = if boxes.is_empty() {
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    } else {
        (
            abs_density_boxes(boxes, pallet),
            rel_density_boxes(boxes, pallet, cfg.voxel_grid),
            (h_star as f64 / pallet.width_mm as f64).clamp(0.0, 1.0),
            side_support_boxes(boxes, pallet, cfg.tau_side),
            surf_support_boxes(boxes, cfg.tau_surface),
            cog2d_boxes(boxes, pallet),
            cog3d_boxes(boxes, pallet),
        )
    };
    KpiReport {
        order_id: order_id.to_string(),
        n_items: total_items,
        n_placed: boxes.len(),
        abs_den: abs_den * corrected_eff,
        rel_den: rel_den * corrected_eff,
        hw_ratio: hw * corrected_eff,
        side_sup: side * corrected_eff,
        surf_sup: surf * corrected_eff,
        cog2d: c2 * corrected_eff,
        cog3d: c3 * corrected_eff,
        corrected_eff,
        runtime_s: 0.0,
        n_valid,
        overlap_volume_mm3: total_overlap_volume(boxes),
    }
}
