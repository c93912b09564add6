use rand::seq::SliceRandom;
use rand::Rng;

use super::{Chromosome, GaConfig, GaProblem};
use crate::constructive::{Layer, LayerMember, Plane, PlacementRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SortStrategy {
    Volume,
    Area,
    Random,
}

/// Round-robin order of the seeding strategies.
pub const STRATEGIES: [(SortStrategy, PlacementRule); 6] = [
    (SortStrategy::Volume, PlacementRule::BottomLeft),
    (SortStrategy::Volume, PlacementRule::ExtremePoint),
    (SortStrategy::Area, PlacementRule::BottomLeft),
    (SortStrategy::Area, PlacementRule::ExtremePoint),
    (SortStrategy::Random, PlacementRule::BottomLeft),
    (SortStrategy::Random, PlacementRule::ExtremePoint),
];

fn sorted_residual<R: Rng>(problem: &GaProblem, strategy: SortStrategy, rng: &mut R) -> Vec<usize> {
    let units = problem.units;
    let mut order = problem.residual.clone();
    match strategy {
        SortStrategy::Volume => order.sort_by(|&a, &b| units[b].volume().cmp(&units[a].volume()).then(a.cmp(&b))),
        SortStrategy::Area => order.sort_by(|&a, &b| {
            (units[b].footprint_area(), units[b].height(), a).cmp(&(units[a].footprint_area(), units[a].height(), b))
        }),
        SortStrategy::Random => order.shuffle(rng),
    }
    order
}

/// Fills layers bottom-up from `order` with the given 2D rule.
///
/// A block joins the open layer when it fits in 2D, its height stays within
/// `tolerance` times the layer's current height, the stack stays under the
/// available height and the payload holds. Blocks that fit nowhere are left
/// out; building stops when a pass places nothing.
pub fn build_chromosome(order: &[usize], rule: PlacementRule, problem: &GaProblem, tolerance: f64) -> Chromosome {
    let units = problem.units;
    let pallet = &problem.pallet;
    let avail = problem.available_height();
    let mut remaining = order.to_vec();
    let mut layers = Vec::new();
    let (mut z, mut mass) = (0u32, 0u64);
    while !remaining.is_empty() {
        let mut plane = Plane::new(pallet.length_mm, pallet.width_mm);
        let mut height = 0u32;
        let mut members = Vec::new();
        for &u in &remaining {
            let unit = &units[u];
            let h = unit.height();
            if z + h > avail || mass + unit.mass_g > problem.payload_left {
                continue;
            }
            if height > 0 && h as f64 > tolerance * height as f64 {
                continue;
            }
            if let Some(spot) = plane.place(rule, unit.dims[0], unit.dims[1]) {
                members.push(LayerMember::new(u, spot.x, spot.y, spot.rotation));
                height = height.max(h);
                mass += unit.mass_g;
            }
        }
        if members.is_empty() {
            break;
        }
        remaining.retain(|u| !members.iter().any(|m| m.unit == *u));
        layers.push(Layer {
            base_z: z,
            height,
            members,
        });
        z += height;
    }
    Chromosome::new(layers)
}

/// Seeds `population_size` chromosomes, cycling through [`STRATEGIES`].
pub fn initialize_population<R: Rng>(problem: &GaProblem, config: &GaConfig, rng: &mut R) -> Vec<Chromosome> {
    (0..config.population_size)
        .map(|k| {
            let (sort, rule) = STRATEGIES[k % STRATEGIES.len()];
            let order = sorted_residual(problem, sort, rng);
            build_chromosome(&order, rule, problem, config.layer_height_tolerance)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::geometry::{Item, Pallet};
    use crate::kpi::KpiConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mixed_items() -> Vec<Item> {
        let dims = [(400, 300, 200), (250, 250, 180), (600, 400, 350), (120, 100, 90), (500, 500, 500), (330, 210, 150)];
        (0..30)
            .map(|k| {
                let (l, w, h) = dims[k % dims.len()];
                Item::new(format!("m{k}"), l, w, h, 1500 + k as u64).unwrap()
            })
            .collect()
    }

    #[test]
    fn six_chromosomes_use_each_strategy_once() {
        let items = mixed_items();
        let units = singles(&items);
        let base = all_residual(units.len());
        let p = GaProblem::new(&items, &units, &base, Pallet::default(), KpiConfig::default());
        let cfg = GaConfig {
            population_size: 6,
            ..GaConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pop = initialize_population(&p, &cfg, &mut rng);
        assert_eq!(pop.len(), 6);
        // the deterministic strategies are reproducible one by one
        let mut dummy = ChaCha8Rng::seed_from_u64(0);
        for (k, (sort, rule)) in STRATEGIES.iter().enumerate().take(4) {
            let order = sorted_residual(&p, *sort, &mut dummy);
            assert_eq!(pop[k], build_chromosome(&order, *rule, &p, 1.25));
        }
        for c in &pop {
            assert!(p.is_valid(c));
        }
    }

    #[test]
    fn random_orders_differ() {
        let items = mixed_items();
        let units = singles(&items);
        let base = all_residual(units.len());
        let p = GaProblem::new(&items, &units, &base, Pallet::default(), KpiConfig::default());
        let cfg = GaConfig {
            population_size: 100,
            ..GaConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pop = initialize_population(&p, &cfg, &mut rng);
        assert!(pop.iter().all(|c| p.is_valid(c)));
        assert_ne!(pop[4], pop[10]);
    }

    #[test]
    fn single_residual_gives_identical_chromosomes() {
        let items = vec![Item::new("only", 300, 200, 100, 5).unwrap()];
        let units = singles(&items);
        let base = all_residual(1);
        let p = GaProblem::new(&items, &units, &base, Pallet::default(), KpiConfig::default());
        let cfg = GaConfig {
            population_size: 12,
            ..GaConfig::default()
        };
        let pop = initialize_population(&p, &cfg, &mut ChaCha8Rng::seed_from_u64(3));
        assert!(pop.iter().all(|c| c == &pop[0]));
        assert_eq!(pop[0].layers.len(), 1);
        assert_eq!(pop[0].layers[0].members.len(), 1);
    }
}
