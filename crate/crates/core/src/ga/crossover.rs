use std::collections::BTreeSet;

use rand::Rng;

use super::{Chromosome, GaProblem};
use crate::constructive::{Layer, LayerMember, Plane, PlacementRule};

/// One-point layer crossover with random cuts; see [`crossover_at`].
pub fn crossover<R: Rng>(
    a: &Chromosome,
    b: &Chromosome,
    fit_a: f64,
    fit_b: f64,
    problem: &GaProblem,
    rng: &mut R,
) -> Chromosome {
    if a == b {
        return a.clone();
    }
    let cut_a = rng.gen_range(0..=a.layers.len());
    let cut_b = rng.gen_range(0..=b.layers.len());
    crossover_at(a, b, cut_a, cut_b, fit_a, fit_b, problem)
}

/// Child = `a.layers[..cut_a]` followed by `b.layers[cut_b..]`.
///
/// Blocks already present in the prefix are removed from the suffix. Blocks
/// of either parent that the child lost are packed Bottom-Left into one new
/// top layer when that layer fits. An infeasible child is replaced by a copy
/// of the fitter parent (`a` on ties).
pub fn crossover_at(
    a: &Chromosome,
    b: &Chromosome,
    cut_a: usize,
    cut_b: usize,
    fit_a: f64,
    fit_b: f64,
    problem: &GaProblem,
) -> Chromosome {
    let units = problem.units;
    let mut layers: Vec<Layer> = a.layers[..cut_a.min(a.layers.len())].to_vec();
    let mut used: BTreeSet<usize> = layers.iter().flat_map(|l| l.members.iter().map(|m| m.unit)).collect();
    for layer in &b.layers[cut_b.min(b.layers.len())..] {
        let mut l = layer.clone();
        l.members.retain(|m| !used.contains(&m.unit));
        used.extend(l.members.iter().map(|m| m.unit));
        layers.push(l);
    }
    let mut child = Chromosome::new(layers);
    child.restack(units);

    let lost: Vec<usize> = a
        .units()
        .chain(b.units())
        .filter(|u| !used.contains(u))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if !lost.is_empty() {
        if let Some(extra) = repair_layer(&lost, &child, problem) {
            child.layers.push(extra);
            child.restack(units);
        }
    }

    if problem.is_valid(&child) {
        child
    } else if fit_b > fit_a {
        b.clone()
    } else {
        a.clone()
    }
}

/// Bottom-Left layer of the lost blocks that still fit on top of `child`.
fn repair_layer(lost: &[usize], child: &Chromosome, problem: &GaProblem) -> Option<Layer> {
    let units = problem.units;
    let room = problem.available_height().checked_sub(child.height())?;
    let mut mass = child.mass_g(units);
    let mut plane = Plane::new(problem.pallet.length_mm, problem.pallet.width_mm);
    let mut members = Vec::new();
    for &u in lost {
        let unit = &units[u];
        if unit.height() > room || mass + unit.mass_g > problem.payload_left {
            continue;
        }
        if let Some(s) = plane.place(PlacementRule::BottomLeft, unit.dims[0], unit.dims[1]) {
            members.push(LayerMember::new(u, s.x, s.y, s.rotation));
            mass += unit.mass_g;
        }
    }
    (!members.is_empty()).then(|| Layer {
        base_z: 0,
        height: 0,
        members,
    })
}
