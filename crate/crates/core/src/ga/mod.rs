//! Genetic refinement of the residual blocks left by the constructive phase.
//!
//! A chromosome is a stack of layers placed in a frame whose origin is the
//! top of the base solution. Fitness is always measured on the merged
//! layout (base plus chromosome) so every KPI sees the full pallet.

mod crossover;
mod evolve;
mod init;
mod mutation;
mod schedule;

pub use crossover::{crossover, crossover_at};
pub use evolve::{evolve, merge_with_base, GaOutcome, Individual, Population};
pub use init::{build_chromosome, initialize_population, SortStrategy, STRATEGIES};
pub use mutation::{apply_operator, mutate, MutationOp};
pub use schedule::{crossover_prob, elite_count, mutation_prob, tournament_size};

use serde::{Deserialize, Serialize};

use crate::constructive::{is_stacked, placement_box, restack, stack_height, BaseSolution, Layer};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Item, Pallet, Placement};
use crate::kpi::{fitness, KpiConfig, KpiVector};
use crate::superitems::SuperItem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub elite_rate: f64,
    pub seed: u64,
    /// Move quantum for the sliding mutations, mm.
    pub grid_step_mm: u32,
    pub layer_height_tolerance: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            generations: 50,
            elite_rate: 0.10,
            seed: 42,
            grid_step_mm: 25,
            layer_height_tolerance: 1.25,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config("population_size must be at least 2".into()));
        }
        if self.generations < 1 {
            return Err(Error::Config("generations must be at least 1".into()));
        }
        if !(self.elite_rate > 0.0 && self.elite_rate <= 1.0) {
            return Err(Error::Config(format!("elite_rate must lie in (0, 1], got {}", self.elite_rate)));
        }
        if self.grid_step_mm == 0 {
            return Err(Error::Config("grid_step_mm must be positive".into()));
        }
        if self.layer_height_tolerance < 1.0 {
            return Err(Error::Config("layer_height_tolerance must be at least 1".into()));
        }
        Ok(())
    }
}

/// Stack of layers in the residual frame (z = 0 is the base solution top).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Chromosome {
    pub layers: Vec<Layer>,
}

impl Chromosome {
    pub fn new(layers: Vec<Layer>) -> Self {
        Self { layers }
    }

    pub fn units(&self) -> impl Iterator<Item = usize> + '_ {
        self.layers.iter().flat_map(|l| l.members.iter().map(|m| m.unit))
    }

    pub fn height(&self) -> u32 {
        stack_height(&self.layers)
    }

    pub fn mass_g(&self, units: &[SuperItem]) -> u64 {
        self.layers.iter().map(|l| l.mass_g(units)).sum()
    }

    pub fn item_count(&self, units: &[SuperItem]) -> usize {
        self.units().map(|u| units[u].members.len()).sum()
    }

    /// Drops empty layers, then recomputes heights and base levels.
    pub fn restack(&mut self, units: &[SuperItem]) {
        self.layers.retain(|l| !l.members.is_empty());
        restack(&mut self.layers, units, 0);
    }

    /// Item placements in the residual frame.
    pub fn placements<'a>(&'a self, units: &'a [SuperItem]) -> impl Iterator<Item = (usize, Placement)> + 'a {
        self.layers.iter().flat_map(move |l| l.placements(units))
    }
}

/// Everything the genetic phase needs to judge a chromosome.
#[derive(Debug, Clone)]
pub struct GaProblem<'a> {
    pub items: &'a [Item],
    pub units: &'a [SuperItem],
    pub pallet: Pallet,
    /// Residual block indices, ascending.
    pub residual: Vec<usize>,
    in_residual: Vec<bool>,
    pub base_boxes: Vec<Aabb>,
    pub base_z: u32,
    pub payload_left: u64,
    /// Number of items inside the residual blocks.
    pub residual_items: usize,
    pub kpi: KpiConfig,
}

impl<'a> GaProblem<'a> {
    pub fn new(items: &'a [Item], units: &'a [SuperItem], base: &BaseSolution, pallet: Pallet, kpi: KpiConfig) -> Self {
        let mut in_residual = vec![false; units.len()];
        for &u in &base.residual {
            in_residual[u] = true;
        }
        Self {
            items,
            units,
            pallet,
            residual: base.residual.clone(),
            in_residual,
            base_boxes: crate::constructive::placed_boxes(&base.placed, items),
            base_z: base.top_z,
            payload_left: pallet.max_payload_g.saturating_sub(base.mass_g),
            residual_items: base.residual.iter().map(|&u| units[u].members.len()).sum(),
            kpi,
        }
    }

    pub fn available_height(&self) -> u32 {
        self.pallet.height_mm.saturating_sub(self.base_z)
    }

    pub fn is_residual(&self, unit: usize) -> bool {
        self.in_residual.get(unit).copied().unwrap_or(false)
    }

    /// Chromosome invariants: residual blocks only, no block twice, valid
    /// layers stacked from 0, height and payload within what the base leaves.
    pub fn is_valid(&self, c: &Chromosome) -> bool {
        let mut seen = vec![false; self.units.len()];
        for u in c.units() {
            if !self.is_residual(u) || seen[u] {
                return false;
            }
            seen[u] = true;
        }
        c.layers.iter().all(|l| !l.members.is_empty() && l.is_valid(self.units, &self.pallet))
            && is_stacked(&c.layers, 0)
            && c.height() <= self.available_height()
            && c.mass_g(self.units) <= self.payload_left
    }

    /// Base boxes followed by the chromosome's boxes lifted to the base top.
    pub fn merged_boxes(&self, c: &Chromosome) -> Vec<Aabb> {
        let mut boxes = self.base_boxes.clone();
        boxes.extend(c.placements(self.units).map(|(i, mut p)| {
            p.z_mm += self.base_z;
            placement_box(&self.items[i], p)
        }));
        boxes
    }

    pub fn fitness(&self, c: &Chromosome) -> f64 {
        let boxes = self.merged_boxes(c);
        fitness(&boxes, c.item_count(self.units), self.residual_items, &self.pallet, &self.kpi)
    }

    pub fn kpis(&self, c: &Chromosome) -> KpiVector {
        let boxes = self.merged_boxes(c);
        let cov = crate::kpi::coverage(c.item_count(self.units), self.residual_items);
        KpiVector::compute(&boxes, &self.pallet, &self.kpi, cov)
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn validity_catches_duplicates_and_height() {
        let items: Vec<Item> = (0..2).map(|k| Item::new(format!("i{k}"), 100, 100, 1200, 10).unwrap()).collect();
        let units = singles(&items);
        let base = all_residual(2);
        let p = GaProblem::new(&items, &units, &base, Pallet::default(), KpiConfig::default());
        let ok = chromosome(vec![layer(&[(0, 0, 0), (1, 100, 0)], &units)], &units);
        assert!(p.is_valid(&ok));
        let dup = chromosome(vec![layer(&[(0, 0, 0), (0, 100, 0)], &units)], &units);
        assert!(!p.is_valid(&dup));
        let tall = chromosome(vec![layer(&[(0, 0, 0)], &units), layer(&[(1, 0, 0)], &units)], &units);
        assert_eq!(tall.height(), 2400);
        assert!(!p.is_valid(&tall));
    }

    #[test]
    fn merged_boxes_sit_on_base_top() {
        let items: Vec<Item> = (0..2).map(|k| Item::new(format!("i{k}"), 100, 100, 100, 10).unwrap()).collect();
        let units = singles(&items);
        let mut base = all_residual(2);
        base.residual = vec![1];
        base.placed = vec![(0, Placement::new(0, 0, 0, crate::geometry::Rotation::Deg0))];
        base.top_z = 100;
        base.mass_g = 10;
        let p = GaProblem::new(&items, &units, &base, Pallet::default(), KpiConfig::default());
        let c = chromosome(vec![layer(&[(1, 0, 0)], &units)], &units);
        let boxes = p.merged_boxes(&c);
        assert_eq!(boxes[1].min, [0, 0, 100]);
        assert!(p.is_valid(&c));
        assert_eq!(p.kpis(&c).coverage, 1.0);
        assert_eq!(p.kpis(&Chromosome::default()).coverage, 0.0);
    }
}
