//! Post-processing of a merged layout: slide items toward the origin,
//! drop leftover items into free slots, then strip anything infeasible.

use serde::{Deserialize, Serialize};

use crate::constructive::placement_box;
use crate::error::{Error, Result};
use crate::geometry::{box_support_ratio, box_within, boxes_intersect, union_area, Aabb, Item, Pallet, Placement, Rect, Rotation};
use crate::solution::Solution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PostConfig {
    pub tau_compaction: f64,
    pub tau_validation: f64,
    pub step_sizes: Vec<u32>,
    pub fallback_grid_step: u32,
    pub refinement_rounds: u32,
}

impl Default for PostConfig {
    fn default() -> Self {
        Self {
            tau_compaction: 0.75,
            tau_validation: 0.5,
            step_sizes: vec![25, 10, 5, 1],
            fallback_grid_step: 50,
            refinement_rounds: 2,
        }
    }
}

impl PostConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tau_compaction", self.tau_compaction), ("tau_validation", self.tau_validation)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        if self.step_sizes.is_empty() || self.step_sizes.contains(&0) || self.step_sizes.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Config("step_sizes must be positive and strictly decreasing".into()));
        }
        if self.fallback_grid_step == 0 {
            return Err(Error::Config("fallback_grid_step must be positive".into()));
        }
        Ok(())
    }
}

/// Per-stage counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PostDiagnostics {
    /// Accepted compaction moves.
    pub moves: usize,
    /// Items that moved at least once.
    pub items_moved: usize,
    pub recovered: usize,
    pub removed: usize,
}

/// Support of the boxes resting on `old` must stay at `tau` once `moved`
/// replaces it at index `k`.
fn dependents_hold(boxes: &[Aabb], k: usize, old: &Aabb, tau: f64) -> bool {
    let top = old.top();
    let fp = old.footprint();
    boxes.iter().enumerate().all(|(j, d)| {
        j == k || d.min[2] != top || d.footprint().intersect(&fp).is_none() || box_support_ratio(d, boxes) >= tau
    })
}

/// Slides items toward the origin with the shrinking step ladder.
///
/// Layers (items sharing a base level) are visited bottom-up and items
/// within a layer by `x + y`. A move is kept when the item stays inside the
/// pallet, overlaps nothing, keeps support at `tau_compaction`, and does not
/// leave any item resting on it below `tau_validation`. Passes repeat until
/// none accepts a move.
pub fn compact_layers(solution: &Solution, items: &[Item], pallet: &Pallet, cfg: &PostConfig) -> (Solution, PostDiagnostics) {
    let mut out = solution.clone();
    let mut boxes = out.boxes(items);
    let mut moved = vec![false; boxes.len()];
    let mut diag = PostDiagnostics::default();
    let moves: [(i64, i64); 3] = [(-1, 0), (0, -1), (-1, -1)];
    loop {
        let mut order: Vec<usize> = (0..boxes.len()).collect();
        order.sort_by_key(|&k| (boxes[k].min[2], boxes[k].min[0] + boxes[k].min[1], k));
        let mut accepted = false;
        for k in order {
            loop {
                let mut stepped = false;
                'search: for &s in &cfg.step_sizes {
                    for (dx, dy) in moves {
                        let cur = boxes[k];
                        let mut cand = cur;
                        cand.min[0] += dx * s as i64;
                        cand.min[1] += dy * s as i64;
                        if cand.min[0] < 0 || cand.min[1] < 0 || !box_within(pallet, &cand) {
                            continue;
                        }
                        if boxes.iter().enumerate().any(|(j, o)| j != k && boxes_intersect(o, &cand)) {
                            continue;
                        }
                        boxes[k] = cand;
                        if box_support_ratio(&cand, &boxes) >= cfg.tau_compaction
                            && dependents_hold(&boxes, k, &cur, cfg.tau_validation)
                        {
                            stepped = true;
                            break 'search;
                        }
                        boxes[k] = cur;
                    }
                }
                if !stepped {
                    break;
                }
                diag.moves += 1;
                moved[k] = true;
                accepted = true;
            }
        }
        if !accepted {
            break;
        }
    }
    for (k, b) in boxes.iter().enumerate() {
        let p = &mut out.placed[k].1;
        p.x_mm = b.min[0] as u32;
        p.y_mm = b.min[1] as u32;
    }
    diag.items_moved = moved.iter().filter(|m| **m).count();
    (out, diag)
}

fn is_feasible_at(cand: &Aabb, boxes: &[Aabb], pallet: &Pallet, tau: f64) -> bool {
    box_within(pallet, cand)
        && !boxes.iter().any(|o| boxes_intersect(o, cand))
        && box_support_ratio(cand, boxes) >= tau
}

/// Lowest feasible slot for `item` given the current boxes, searched on the
/// `step` lattice and ranked by `(z, x + y, x, rotation)`.
fn best_slot(item: &Item, boxes: &[Aabb], pallet: &Pallet, tau: f64, step: u32) -> Option<Placement> {
    let full = Rect::new(0, 0, pallet.length_mm as i64, pallet.width_mm as i64);
    let mut levels: Vec<i64> = boxes.iter().map(Aabb::top).collect();
    levels.sort_unstable();
    levels.dedup();
    let need = tau * item.base_area() as f64;
    let levels = std::iter::once(0).chain(levels.into_iter().filter(|&z| {
        z > 0 && union_area(full, boxes.iter().filter(|b| b.top() == z).map(Aabb::footprint)) as f64 >= need
    }));
    for z in levels {
        if z + item.height_mm as i64 > pallet.height_mm as i64 {
            break;
        }
        let mut cands: Vec<(u32, u32, Rotation)> = Vec::new();
        for rot in Rotation::BOTH {
            let (l, w) = rot.apply(item.length_mm, item.width_mm);
            if l > pallet.length_mm || w > pallet.width_mm {
                continue;
            }
            for x in (0..=pallet.length_mm - l).step_by(step as usize) {
                for y in (0..=pallet.width_mm - w).step_by(step as usize) {
                    cands.push((x, y, rot));
                }
            }
        }
        cands.sort_by_key(|&(x, y, rot)| (x + y, x, rot.degrees()));
        for (x, y, rot) in cands {
            let p = Placement::new(x, y, z as u32, rot);
            if is_feasible_at(&placement_box(item, p), boxes, pallet, tau) {
                return Some(p);
            }
        }
    }
    None
}

/// Tries to place every unplaced item, largest volume first. The lattice
/// step starts at `fallback_grid_step` and halves for each refinement round
/// until the item fits.
pub fn fallback_place(solution: &Solution, items: &[Item], pallet: &Pallet, cfg: &PostConfig) -> (Solution, usize) {
    let mut out = solution.clone();
    let mut boxes = out.boxes(items);
    let mut mass: u64 = boxes.iter().map(|b| b.mass_g).sum();
    let mut pending = out.unplaced.clone();
    pending.sort_by(|&a, &b| items[b].volume().cmp(&items[a].volume()).then(a.cmp(&b)));
    let mut recovered = Vec::new();
    for i in pending {
        let item = &items[i];
        if mass + item.mass_g > pallet.max_payload_g {
            continue;
        }
        let mut step = cfg.fallback_grid_step;
        for _ in 0..=cfg.refinement_rounds {
            if let Some(p) = best_slot(item, &boxes, pallet, cfg.tau_validation, step) {
                boxes.push(placement_box(item, p));
                out.placed.push((i, p));
                mass += item.mass_g;
                recovered.push(i);
                break;
            }
            step = (step / 2).max(1);
        }
    }
    out.unplaced.retain(|i| !recovered.contains(i));
    let n = recovered.len();
    (out, n)
}

/// Keeps items in `(z, x + y, index)` order while they are inside the
/// pallet, disjoint from kept items, supported at `tau_validation` by kept
/// items and within the payload. Everything else becomes unplaced.
pub fn validate(solution: &Solution, items: &[Item], pallet: &Pallet, cfg: &PostConfig) -> (Solution, usize) {
    let boxes = solution.boxes(items);
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by_key(|&k| (boxes[k].min[2], boxes[k].min[0] + boxes[k].min[1], solution.placed[k].0));
    let mut kept: Vec<usize> = Vec::new();
    let mut kept_boxes: Vec<Aabb> = Vec::new();
    let mut mass = 0u64;
    for k in order {
        let b = &boxes[k];
        if is_feasible_at(b, &kept_boxes, pallet, cfg.tau_validation) && mass + b.mass_g <= pallet.max_payload_g {
            mass += b.mass_g;
            kept.push(k);
            kept_boxes.push(*b);
        }
    }
    kept.sort_unstable();
    let removed = boxes.len() - kept.len();
    let placed: Vec<(usize, Placement)> = kept.into_iter().map(|k| solution.placed[k]).collect();
    (Solution::from_placed(placed, items.len()), removed)
}

/// Compaction, then a validation prune, fallback placement of everything
/// unplaced (pruned items included) and a final validation.
///
/// The prune keeps fallback from stacking onto items that validation would
/// drop anyway, and gives items cut off by a weak supporter a second chance.
pub fn post_process(solution: &Solution, items: &[Item], pallet: &Pallet, cfg: &PostConfig) -> (Solution, PostDiagnostics) {
    let (compacted, mut diag) = compact_layers(solution, items, pallet, cfg);
    let (pruned, dropped) = validate(&compacted, items, pallet, cfg);
    let (filled, recovered) = fallback_place(&pruned, items, pallet, cfg);
    let (valid, removed) = validate(&filled, items, pallet, cfg);
    diag.recovered = recovered;
    diag.removed = dropped + removed;
    (valid, diag)
}
