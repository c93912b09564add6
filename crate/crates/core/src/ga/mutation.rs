use rand::seq::SliceRandom;
use rand::Rng;

use super::{Chromosome, GaConfig, GaProblem};
use crate::constructive::{LayerMember, Plane};
use crate::geometry::{Rect, Rotation};
use crate::superitems::SuperItem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationOp {
    CenterTall,
    LowerTall,
    FillVoids,
    CompactToOrigin,
    SideContact,
    BottomOverlap,
    SwapItems,
    SwapLayers,
    SplitLayer,
}

impl MutationOp {
    pub const ALL: [MutationOp; 9] = [
        MutationOp::CenterTall,
        MutationOp::LowerTall,
        MutationOp::FillVoids,
        MutationOp::CompactToOrigin,
        MutationOp::SideContact,
        MutationOp::BottomOverlap,
        MutationOp::SwapItems,
        MutationOp::SwapLayers,
        MutationOp::SplitLayer,
    ];
}

/// Applies one uniformly chosen operator; an invalid result is discarded.
pub fn mutate<R: Rng>(c: &Chromosome, problem: &GaProblem, config: &GaConfig, rng: &mut R) -> Chromosome {
    let op = MutationOp::ALL[rng.gen_range(0..MutationOp::ALL.len())];
    apply_operator(op, c, problem, config, rng)
}

/// Runs `op`; returns `c` unchanged when the operator has nothing to do or
/// its result breaks a chromosome invariant.
pub fn apply_operator<R: Rng>(
    op: MutationOp,
    c: &Chromosome,
    problem: &GaProblem,
    config: &GaConfig,
    rng: &mut R,
) -> Chromosome {
    let out = match op {
        MutationOp::CenterTall => center_tall(c, problem, rng),
        MutationOp::LowerTall => lower_tall(c, problem, config, rng),
        MutationOp::FillVoids => fill_voids(c, problem, rng),
        MutationOp::CompactToOrigin => compact_to_origin(c, problem, rng),
        MutationOp::SideContact => side_contact(c, problem, rng),
        MutationOp::BottomOverlap => bottom_overlap(c, problem, rng),
        MutationOp::SwapItems => swap_items(c, problem, rng),
        MutationOp::SwapLayers => swap_layers(c, problem, rng),
        MutationOp::SplitLayer => split_layer(c, problem, rng),
    };
    match out {
        Some(mut m) => {
            m.restack(problem.units);
            if problem.is_valid(&m) {
                m
            } else {
                c.clone()
            }
        }
        None => c.clone(),
    }
}

fn rect_at(unit: &SuperItem, x: i64, y: i64, rot: Rotation) -> Rect {
    let (l, w) = unit.footprint(rot);
    Rect::new(x, y, x + l as i64, y + w as i64)
}

/// Footprints of layer `li` except member `skip`.
fn others(c: &Chromosome, units: &[SuperItem], li: usize, skip: Option<usize>) -> Vec<Rect> {
    c.layers[li]
        .members
        .iter()
        .enumerate()
        .filter(|(mi, _)| Some(*mi) != skip)
        .map(|(_, m)| m.rect(units))
        .collect()
}

fn is_free(r: &Rect, obstacles: &[Rect], problem: &GaProblem) -> bool {
    r.x0 >= 0
        && r.y0 >= 0
        && r.x1 <= problem.pallet.length_mm as i64
        && r.y1 <= problem.pallet.width_mm as i64
        && obstacles.iter().all(|o| o.intersect(r).is_none())
}

fn is_tall(unit: &SuperItem) -> bool {
    unit.height() as f64 > (unit.footprint_area() as f64).sqrt()
}

fn tall_members(c: &Chromosome, units: &[SuperItem], min_layer: usize) -> Vec<(usize, usize)> {
    c.layers
        .iter()
        .enumerate()
        .skip(min_layer)
        .flat_map(|(li, l)| {
            l.members
                .iter()
                .enumerate()
                .filter(|(_, m)| is_tall(&units[m.unit]))
                .map(move |(mi, _)| (li, mi))
        })
        .collect()
}

fn random_member<R: Rng>(c: &Chromosome, min_layer: usize, rng: &mut R) -> Option<(usize, usize)> {
    let all: Vec<(usize, usize)> = c
        .layers
        .iter()
        .enumerate()
        .skip(min_layer)
        .flat_map(|(li, l)| (0..l.members.len()).map(move |mi| (li, mi)))
        .collect();
    all.choose(rng).copied()
}

fn centre_distance(r: &Rect, problem: &GaProblem) -> f64 {
    let cx = (r.x0 + r.x1) as f64 / 2.0 - problem.pallet.length_mm as f64 / 2.0;
    let cy = (r.y0 + r.y1) as f64 / 2.0 - problem.pallet.width_mm as f64 / 2.0;
    (cx * cx + cy * cy).sqrt()
}

/// Moves a slender block toward the pallet centre, as far as it can go in
/// quarter steps.
fn center_tall<R: Rng>(c: &Chromosome, problem: &GaProblem, rng: &mut R) -> Option<Chromosome> {
    let units = problem.units;
    let &(li, mi) = tall_members(c, units, 0).choose(rng)?;
    let m = c.layers[li].members[mi];
    let unit = &units[m.unit];
    let (l, w) = unit.footprint(m.rotation);
    let tx = (problem.pallet.length_mm as i64 - l as i64) / 2;
    let ty = (problem.pallet.width_mm as i64 - w as i64) / 2;
    let (x, y) = (m.x_mm as i64, m.y_mm as i64);
    if (x, y) == (tx, ty) {
        return None;
    }
    let obstacles = others(c, units, li, Some(mi));
    for q in (1..=4).rev() {
        let nx = x + (tx - x) * q / 4;
        let ny = y + (ty - y) * q / 4;
        if (nx, ny) != (x, y) && is_free(&rect_at(unit, nx, ny, m.rotation), &obstacles, problem) {
            let mut out = c.clone();
            out.layers[li].members[mi] = LayerMember::new(m.unit, nx as u32, ny as u32, m.rotation);
            return Some(out);
        }
    }
    None
}

/// Candidate positions in a layer: the coarse lattice plus the contact and
/// extreme-point spots of the layer's plane.
fn layer_candidates(
    obstacles: &[Rect],
    unit: &SuperItem,
    problem: &GaProblem,
    step: u32,
) -> Vec<(i64, i64, Rotation)> {
    let mut plane = Plane::new(problem.pallet.length_mm, problem.pallet.width_mm);
    for r in obstacles {
        plane.occupy(*r);
    }
    let mut out = Vec::new();
    for s in [plane.bottom_left(unit.dims[0], unit.dims[1]), plane.extreme_point(unit.dims[0], unit.dims[1])]
        .into_iter()
        .flatten()
    {
        out.push((s.x as i64, s.y as i64, s.rotation));
    }
    for rot in Rotation::BOTH {
        let (l, w) = unit.footprint(rot);
        let (len, wid) = (problem.pallet.length_mm, problem.pallet.width_mm);
        if l > len || w > wid {
            continue;
        }
        out.push((((len - l) / 2) as i64, ((wid - w) / 2) as i64, rot));
        for x in (0..=len - l).step_by(step as usize) {
            for y in (0..=wid - w).step_by(step as usize) {
                out.push((x as i64, y as i64, rot));
            }
        }
    }
    out.retain(|&(x, y, rot)| is_free(&rect_at(unit, x, y, rot), obstacles, problem));
    out
}

/// Relocates a slender block from an upper layer into the lowest layer that
/// can take it, at the free spot closest to the centre. Kept only when the
/// tall-item score does not drop.
fn lower_tall<R: Rng>(c: &Chromosome, problem: &GaProblem, config: &GaConfig, rng: &mut R) -> Option<Chromosome> {
    let units = problem.units;
    let &(li, mi) = tall_members(c, units, 1).choose(rng)?;
    let m = c.layers[li].members[mi];
    let unit = &units[m.unit];
    for target in 0..li {
        let obstacles = others(c, units, target, None);
        let best = layer_candidates(&obstacles, unit, problem, config.grid_step_mm)
            .into_iter()
            .map(|(x, y, rot)| (centre_distance(&rect_at(unit, x, y, rot), problem), x, y, rot))
            .min_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
        let Some((_, x, y, rot)) = best else { continue };
        let mut out = c.clone();
        out.layers[li].members.remove(mi);
        out.layers[target].members.push(LayerMember::new(m.unit, x as u32, y as u32, rot));
        out.restack(units);
        if !problem.is_valid(&out) {
            continue;
        }
        if problem.kpis(&out).tall_item >= problem.kpis(c).tall_item {
            return Some(out);
        }
        return None;
    }
    None
}

/// Fills a gap in a layer with an unplaced block, or with a block pulled
/// down from a higher layer, that fits under the layer's height.
fn fill_voids<R: Rng>(c: &Chromosome, problem: &GaProblem, rng: &mut R) -> Option<Chromosome> {
    let units = problem.units;
    if c.layers.is_empty() {
        return None;
    }
    let li = rng.gen_range(0..c.layers.len());
    let cap = c.layers[li].height;
    let placed: Vec<usize> = c.units().collect();
    let mut unplaced: Vec<usize> = problem.residual.iter().copied().filter(|u| !placed.contains(u)).collect();
    unplaced.shuffle(rng);
    let mut above: Vec<(usize, usize)> = (li + 1..c.layers.len())
        .flat_map(|lj| (0..c.layers[lj].members.len()).map(move |mj| (lj, mj)))
        .collect();
    above.shuffle(rng);

    let mut plane = Plane::new(problem.pallet.length_mm, problem.pallet.width_mm);
    for r in others(c, units, li, None) {
        plane.occupy(r);
    }
    let sources = unplaced
        .into_iter()
        .map(|u| (u, None))
        .chain(above.into_iter().map(|(lj, mj)| (c.layers[lj].members[mj].unit, Some((lj, mj)))));
    for (u, from) in sources {
        let unit = &units[u];
        if unit.height() > cap {
            continue;
        }
        if let Some(s) = plane.bottom_left(unit.dims[0], unit.dims[1]) {
            let mut out = c.clone();
            if let Some((lj, mj)) = from {
                out.layers[lj].members.remove(mj);
            }
            out.layers[li].members.push(LayerMember::new(u, s.x, s.y, s.rotation));
            return Some(out);
        }
    }
    None
}

/// Distance `r` can slide toward the origin along x (`axis` 0) or y.
fn slide_back(r: &Rect, obstacles: &[Rect], axis: usize) -> i64 {
    let (lo, overlaps_across): (i64, fn(&Rect, &Rect) -> bool) = if axis == 0 {
        (r.x0, |a, b| a.y0 < b.y1 && b.y0 < a.y1)
    } else {
        (r.y0, |a, b| a.x0 < b.x1 && b.x0 < a.x1)
    };
    let stop = obstacles
        .iter()
        .filter(|o| overlaps_across(o, r))
        .map(|o| if axis == 0 { o.x1 } else { o.y1 })
        .filter(|&e| e <= lo)
        .max()
        .unwrap_or(0);
    lo - stop
}

/// Distance `r` can slide away from the origin before hitting an obstacle
/// or the pallet edge.
fn slide_forward(r: &Rect, obstacles: &[Rect], axis: usize, limit: i64) -> i64 {
    let hi = if axis == 0 { r.x1 } else { r.y1 };
    let stop = obstacles
        .iter()
        .filter(|o| {
            if axis == 0 {
                o.y0 < r.y1 && r.y0 < o.y1
            } else {
                o.x0 < r.x1 && r.x0 < o.x1
            }
        })
        .map(|o| if axis == 0 { o.x0 } else { o.y0 })
        .filter(|&e| e >= hi)
        .min()
        .unwrap_or(limit);
    stop - hi
}

fn shifted(r: &Rect, dx: i64, dy: i64) -> Rect {
    Rect::new(r.x0 + dx, r.y0 + dy, r.x1 + dx, r.y1 + dy)
}

/// Slides every member of one layer toward the origin, x then y, until
/// nothing moves.
fn compact_to_origin<R: Rng>(c: &Chromosome, problem: &GaProblem, rng: &mut R) -> Option<Chromosome> {
    let units = problem.units;
    if c.layers.is_empty() {
        return None;
    }
    let li = rng.gen_range(0..c.layers.len());
    let mut out = c.clone();
    let mut order: Vec<usize> = (0..out.layers[li].members.len()).collect();
    order.sort_by_key(|&mi| {
        let m = &out.layers[li].members[mi];
        (m.x_mm + m.y_mm, m.y_mm, m.x_mm)
    });
    let mut moved = false;
    loop {
        let mut progress = false;
        for &mi in &order {
            for axis in 0..2 {
                let obstacles = others(&out, units, li, Some(mi));
                let r = out.layers[li].members[mi].rect(units);
                let d = slide_back(&r, &obstacles, axis);
                if d > 0 {
                    let m = &mut out.layers[li].members[mi];
                    if axis == 0 {
                        m.x_mm -= d as u32;
                    } else {
                        m.y_mm -= d as u32;
                    }
                    progress = true;
                }
            }
        }
        if !progress {
            break;
        }
        moved = true;
    }
    moved.then_some(out)
}

/// Edge length shared with neighbours or the pallet boundary.
fn contact_length(r: &Rect, obstacles: &[Rect], problem: &GaProblem) -> i64 {
    let (len, wid) = (problem.pallet.length_mm as i64, problem.pallet.width_mm as i64);
    let mut total = 0;
    if r.x0 == 0 {
        total += r.y1 - r.y0;
    }
    if r.x1 == len {
        total += r.y1 - r.y0;
    }
    if r.y0 == 0 {
        total += r.x1 - r.x0;
    }
    if r.y1 == wid {
        total += r.x1 - r.x0;
    }
    for o in obstacles {
        if o.x1 == r.x0 || o.x0 == r.x1 {
            total += (o.y1.min(r.y1) - o.y0.max(r.y0)).max(0);
        }
        if o.y1 == r.y0 || o.y0 == r.y1 {
            total += (o.x1.min(r.x1) - o.x0.max(r.x0)).max(0);
        }
    }
    total
}

/// Slides one block in the direction that maximizes its side contact.
fn side_contact<R: Rng>(c: &Chromosome, problem: &GaProblem, rng: &mut R) -> Option<Chromosome> {
    let units = problem.units;
    let (li, mi) = random_member(c, 0, rng)?;
    let obstacles = others(c, units, li, Some(mi));
    let r = c.layers[li].members[mi].rect(units);
    let (len, wid) = (problem.pallet.length_mm as i64, problem.pallet.width_mm as i64);
    let moves = [
        (-slide_back(&r, &obstacles, 0), 0),
        (slide_forward(&r, &obstacles, 0, len), 0),
        (0, -slide_back(&r, &obstacles, 1)),
        (0, slide_forward(&r, &obstacles, 1, wid)),
    ];
    let current = contact_length(&r, &obstacles, problem);
    let best = moves
        .into_iter()
        .filter(|&(dx, dy)| dx != 0 || dy != 0)
        .map(|(dx, dy)| (contact_length(&shifted(&r, dx, dy), &obstacles, problem), dx, dy))
        .max_by_key(|&(score, dx, dy)| (score, -(dx.abs() + dy.abs())))?;
    if best.0 <= current {
        return None;
    }
    let mut out = c.clone();
    let m = &mut out.layers[li].members[mi];
    m.x_mm = (m.x_mm as i64 + best.1) as u32;
    m.y_mm = (m.y_mm as i64 + best.2) as u32;
    Some(out)
}

/// Realigns one block of an upper layer with the flush-topped blocks below
/// it to raise its base support.
fn bottom_overlap<R: Rng>(c: &Chromosome, problem: &GaProblem, rng: &mut R) -> Option<Chromosome> {
    let units = problem.units;
    let (li, mi) = random_member(c, 1, rng)?;
    let below = &c.layers[li - 1];
    let supporters: Vec<Rect> = below
        .members
        .iter()
        .filter(|m| units[m.unit].height() == below.height)
        .map(|m| m.rect(units))
        .collect();
    if supporters.is_empty() {
        return None;
    }
    let m = c.layers[li].members[mi];
    let unit = &units[m.unit];
    let support = |r: &Rect| -> i64 { supporters.iter().filter_map(|s| s.intersect(r)).map(|i| i.area()).sum() };
    let obstacles = others(c, units, li, Some(mi));
    let current = support(&m.rect(units));
    let mut best: Option<(i64, i64, i64, Rotation)> = None;
    for s in &supporters {
        for rot in Rotation::BOTH {
            let (l, w) = unit.footprint(rot);
            let (l, w) = (l as i64, w as i64);
            for (x, y) in [(s.x0, s.y0), (s.x1 - l, s.y0), (s.x0, s.y1 - w), (s.x1 - l, s.y1 - w)] {
                let r = rect_at(unit, x, y, rot);
                if !is_free(&r, &obstacles, problem) {
                    continue;
                }
                let score = support(&r);
                if best.is_none_or(|b| score > b.0) {
                    best = Some((score, x, y, rot));
                }
            }
        }
    }
    let (score, x, y, rot) = best?;
    if score <= current {
        return None;
    }
    let mut out = c.clone();
    out.layers[li].members[mi] = LayerMember::new(m.unit, x as u32, y as u32, rot);
    Some(out)
}

fn fit_in_place(
    unit: &SuperItem,
    at: &LayerMember,
    obstacles: &[Rect],
    problem: &GaProblem,
) -> Option<Rotation> {
    [at.rotation, at.rotation.toggled()]
        .into_iter()
        .find(|&rot| is_free(&rect_at(unit, at.x_mm as i64, at.y_mm as i64, rot), obstacles, problem))
}

/// Exchanges two blocks in different layers, each taking the other's spot.
fn swap_items<R: Rng>(c: &Chromosome, problem: &GaProblem, rng: &mut R) -> Option<Chromosome> {
    let units = problem.units;
    if c.layers.len() < 2 {
        return None;
    }
    let li = rng.gen_range(0..c.layers.len());
    let mut lj = rng.gen_range(0..c.layers.len() - 1);
    if lj >= li {
        lj += 1;
    }
    let mi = rng.gen_range(0..c.layers[li].members.len());
    let mj = rng.gen_range(0..c.layers[lj].members.len());
    let (a, b) = (c.layers[li].members[mi], c.layers[lj].members[mj]);
    let rot_b = fit_in_place(&units[b.unit], &a, &others(c, units, li, Some(mi)), problem)?;
    let rot_a = fit_in_place(&units[a.unit], &b, &others(c, units, lj, Some(mj)), problem)?;
    let mut out = c.clone();
    out.layers[li].members[mi] = LayerMember::new(b.unit, a.x_mm, a.y_mm, rot_b);
    out.layers[lj].members[mj] = LayerMember::new(a.unit, b.x_mm, b.y_mm, rot_a);
    Some(out)
}

fn swap_layers<R: Rng>(c: &Chromosome, _problem: &GaProblem, rng: &mut R) -> Option<Chromosome> {
    if c.layers.len() < 2 {
        return None;
    }
    let i = rng.gen_range(0..c.layers.len());
    let mut j = rng.gen_range(0..c.layers.len() - 1);
    if j >= i {
        j += 1;
    }
    let mut out = c.clone();
    out.layers.swap(i, j);
    Some(out)
}

/// Moves the back half of a layer's members into a new layer right above it.
fn split_layer<R: Rng>(c: &Chromosome, _problem: &GaProblem, rng: &mut R) -> Option<Chromosome> {
    let candidates: Vec<usize> = (0..c.layers.len()).filter(|&i| c.layers[i].members.len() >= 2).collect();
    let &li = candidates.choose(rng)?;
    let mut out = c.clone();
    let half = out.layers[li].members.len() / 2;
    let moved = out.layers[li].members.split_off(half);
    let mut upper = out.layers[li].clone();
    upper.members = moved;
    out.layers.insert(li + 1, upper);
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::geometry::{Item, Pallet};
    use crate::kpi::KpiConfig;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn compact_moves_single_item_to_origin() {
        let items = vec![Item::new("a", 200, 100, 100, 10).unwrap()];
        let units = singles(&items);
        let base = all_residual(1);
        let p = GaProblem::new(&items, &units, &base, Pallet::default(), KpiConfig::default());
        let c = chromosome(vec![layer(&[(0, 300, 250)], &units)], &units);
        let out = apply_operator(MutationOp::CompactToOrigin, &c, &p, &GaConfig::default(), &mut ChaCha8Rng::seed_from_u64(0));
        let m = out.layers[0].members[0];
        assert_eq!((m.x_mm, m.y_mm), (0, 0));
    }

    #[test]
    fn swap_layers_needs_two_layers() {
        let items = vec![Item::new("a", 200, 100, 100, 10).unwrap()];
        let units = singles(&items);
        let base = all_residual(1);
        let p = GaProblem::new(&items, &units, &base, Pallet::default(), KpiConfig::default());
        let c = chromosome(vec![layer(&[(0, 300, 250)], &units)], &units);
        let out = apply_operator(MutationOp::SwapLayers, &c, &p, &GaConfig::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(out, c);
    }

    #[test]
    fn lower_tall_relocates_without_hurting_tall_score() {
        // flat slab corner in layer 0, slender column on top in a corner
        let items = vec![
            Item::new("slab", 600, 400, 500, 100).unwrap(),
            Item::new("post", 200, 200, 500, 20).unwrap(),
        ];
        let units = singles(&items);
        let base = all_residual(2);
        let p = GaProblem::new(&items, &units, &base, Pallet::default(), KpiConfig::default());
        let c = chromosome(vec![layer(&[(0, 0, 0)], &units), layer(&[(1, 0, 0)], &units)], &units);
        assert!(p.is_valid(&c));
        let before = p.kpis(&c).tall_item;
        let out = apply_operator(MutationOp::LowerTall, &c, &p, &GaConfig::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(out.layers.len(), 1);
        assert_eq!(out.layers[0].members.len(), 2);
        assert!(p.kpis(&out).tall_item >= before);
        // independent oracle: the column now sits at z = 0
        let boxes = p.merged_boxes(&out);
        assert_eq!(boxes[1].min[2], 0);
    }

    #[test]
    fn fill_voids_pulls_unplaced_blocks_in() {
        let items: Vec<Item> = (0..2).map(|k| Item::new(format!("b{k}"), 300, 300, 200, 10).unwrap()).collect();
        let units = singles(&items);
        let base = all_residual(2);
        let p = GaProblem::new(&items, &units, &base, Pallet::default(), KpiConfig::default());
        let c = chromosome(vec![layer(&[(0, 0, 0)], &units)], &units);
        let out = apply_operator(MutationOp::FillVoids, &c, &p, &GaConfig::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(out.units().count(), 2);
    }

    #[test]
    fn split_layer_adds_a_layer() {
        let items: Vec<Item> = (0..2).map(|k| Item::new(format!("b{k}"), 300, 300, 200, 10).unwrap()).collect();
        let units = singles(&items);
        let base = all_residual(2);
        let p = GaProblem::new(&items, &units, &base, Pallet::default(), KpiConfig::default());
        let c = chromosome(vec![layer(&[(0, 0, 0), (1, 300, 0)], &units)], &units);
        let out = apply_operator(MutationOp::SplitLayer, &c, &p, &GaConfig::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(out.layers.len(), 2);
        assert_eq!(out.layers[1].base_z, 200);
    }

    fn random_problem_items(dims: &[(u32, u32, u32)]) -> Vec<Item> {
        dims.iter()
            .enumerate()
            .map(|(k, &(l, w, h))| Item::new(format!("r{k}"), l, w, h, 100 + k as u64).unwrap())
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn mutations_preserve_invariants(
            dims in prop::collection::vec((100u32..700, 100u32..600, 80u32..900), 1..14),
            seed in 0u64..1000,
        ) {
            let items = random_problem_items(&dims);
            let units = singles(&items);
            let base = all_residual(units.len());
            let p = GaProblem::new(&items, &units, &base, Pallet::default(), KpiConfig::default());
            let cfg = GaConfig::default();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut c = super::super::build_chromosome(&p.residual, crate::constructive::PlacementRule::BottomLeft, &p, 1.25);
            prop_assert!(p.is_valid(&c));
            for _ in 0..30 {
                c = mutate(&c, &p, &cfg, &mut rng);
                prop_assert!(p.is_valid(&c));
            }
            for op in MutationOp::ALL {
                let out = apply_operator(op, &c, &p, &cfg, &mut rng);
                prop_assert!(p.is_valid(&out));
            }
        }
    }
}
