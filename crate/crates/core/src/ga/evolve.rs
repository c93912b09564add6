use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    crossover, crossover_prob, elite_count, initialize_population, mutate, mutation_prob, tournament_size, Chromosome,
    GaConfig, GaProblem,
};
use crate::constructive::{placement_box, BaseSolution};
use crate::geometry::{box_within, boxes_intersect, Aabb, Item, Pallet};
use crate::par::{self, Execution};
use crate::solution::Solution;
use crate::superitems::SuperItem;

// Independent streams of the run seed.
const STREAM_INIT: u64 = 1;
const STREAM_EVOLVE: u64 = 2;

/// A chromosome plus its fitness, cleared whenever the structure changes.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    chromosome: Chromosome,
    fitness: Option<f64>,
}

impl Individual {
    pub fn new(chromosome: Chromosome) -> Self {
        Self {
            chromosome,
            fitness: None,
        }
    }

    pub fn chromosome(&self) -> &Chromosome {
        &self.chromosome
    }

    pub fn fitness(&self) -> Option<f64> {
        self.fitness
    }

    pub fn set_chromosome(&mut self, c: Chromosome) {
        if c != self.chromosome {
            self.chromosome = c;
            self.fitness = None;
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
}

impl Population {
    /// Fills every missing fitness value; results land in index order.
    pub fn evaluate(&mut self, problem: &GaProblem, exec: Execution) -> usize {
        let todo: Vec<usize> = (0..self.members.len()).filter(|&i| self.members[i].fitness.is_none()).collect();
        let chroms: Vec<&Chromosome> = todo.iter().map(|&i| &self.members[i].chromosome).collect();
        let scores = par::map(exec, &chroms, |c| problem.fitness(c));
        for (&i, f) in todo.iter().zip(scores) {
            self.members[i].fitness = Some(f);
        }
        todo.len()
    }

    fn score(&self, i: usize) -> f64 {
        self.members[i].fitness.expect("population evaluated")
    }

    /// Index of the fittest member, lowest index on ties.
    pub fn best(&self) -> usize {
        (0..self.members.len()).fold(0, |best, i| if self.score(i) > self.score(best) { i } else { best })
    }

    /// Indices by fitness descending, index ascending.
    fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.members.len()).collect();
        idx.sort_by(|&a, &b| self.score(b).total_cmp(&self.score(a)).then(a.cmp(&b)));
        idx
    }

    fn tournament<R: Rng>(&self, size: usize, rng: &mut R) -> usize {
        let n = self.members.len();
        let mut picks: Vec<usize> = sample(rng, n, size.min(n)).into_vec();
        picks.sort_unstable();
        picks.into_iter().fold(usize::MAX, |best, i| {
            if best == usize::MAX || self.score(i) > self.score(best) {
                i
            } else {
                best
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    pub best: Chromosome,
    pub best_fitness: f64,
    /// Best population fitness at generation 0 (the seeds) through G.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

/// Runs the generational loop and returns the best chromosome ever seen.
///
/// The loop itself is sequential; only fitness evaluation fans out, and
/// its results are collected by index, so `exec` never changes the outcome.
pub fn evolve(problem: &GaProblem, config: &GaConfig, exec: Execution) -> GaOutcome {
    let mut init_rng = ChaCha8Rng::seed_from_u64(config.seed);
    init_rng.set_stream(STREAM_INIT);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(STREAM_EVOLVE);

    let size = config.population_size;
    let mut pop = Population {
        members: initialize_population(problem, config, &mut init_rng)
            .into_iter()
            .map(Individual::new)
            .collect(),
    };
    let mut evaluations = pop.evaluate(problem, exec);
    let b = pop.best();
    let (mut best, mut best_fitness) = (pop.members[b].chromosome.clone(), pop.score(b));
    let mut trace = vec![best_fitness];

    let g_max = config.generations;
    let elites = elite_count(config.elite_rate, size);
    for g in 1..=g_max {
        let t = tournament_size(g, g_max, size);
        let (pc, pm) = (crossover_prob(g, g_max), mutation_prob(g, g_max));
        let ranking = pop.ranking();
        let mut next: Vec<Individual> = ranking[..elites].iter().map(|&i| pop.members[i].clone()).collect();
        while next.len() < size {
            let (p1, p2) = (pop.tournament(t, &mut rng), pop.tournament(t, &mut rng));
            let (a, b) = (&pop.members[p1], &pop.members[p2]);
            let fitter = if pop.score(p2) > pop.score(p1) { b } else { a };
            let mut child = fitter.clone();
            if rng.gen::<f64>() < pc {
                let c = crossover(&a.chromosome, &b.chromosome, pop.score(p1), pop.score(p2), problem, &mut rng);
                child.set_chromosome(c);
            }
            if rng.gen::<f64>() < pm {
                let m = mutate(&child.chromosome, problem, config, &mut rng);
                child.set_chromosome(m);
            }
            next.push(child);
        }
        pop.members = next;
        evaluations += pop.evaluate(problem, exec);
        let b = pop.best();
        let f = pop.score(b);
        if f > best_fitness {
            best_fitness = f;
            best = pop.members[b].chromosome.clone();
        }
        trace.push(f);
    }
    GaOutcome {
        best,
        best_fitness,
        trace,
        evaluations,
    }
}

/// Lifts the chromosome to `base.top_z` and appends it to the base
/// placements. Each lifted item must lie inside the pallet, touch no box
/// already kept and fit the remaining payload; otherwise it is unplaced.
pub fn merge_with_base(
    base: &BaseSolution,
    best: &Chromosome,
    units: &[SuperItem],
    items: &[Item],
    pallet: &Pallet,
) -> Solution {
    let mut placed = base.placed.clone();
    let mut boxes: Vec<Aabb> = crate::constructive::placed_boxes(&placed, items);
    let mut mass: u64 = boxes.iter().map(|b| b.mass_g).sum();
    for (i, mut p) in best.placements(units) {
        p.z_mm += base.top_z;
        let b = placement_box(&items[i], p);
        if box_within(pallet, &b)
            && !boxes.iter().any(|o| boxes_intersect(o, &b))
            && mass + b.mass_g <= pallet.max_payload_g
        {
            mass += b.mass_g;
            boxes.push(b);
            placed.push((i, p));
        }
    }
    Solution::from_placed(placed, items.len())
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::kpi::KpiConfig;

    fn order(n: usize) -> Vec<Item> {
        let dims = [(400, 300, 200), (250, 250, 180), (600, 400, 350), (120, 100, 290), (500, 500, 500)];
        (0..n)
            .map(|k| {
                let (l, w, h) = dims[k % dims.len()];
                Item::new(format!("e{k}"), l, w, h, 1200).unwrap()
            })
            .collect()
    }

    #[test]
    fn trivial_run_returns_single_item() {
        let items = order(1);
        let units = singles(&items);
        let base = all_residual(1);
        let p = GaProblem::new(&items, &units, &base, Pallet::default(), KpiConfig::default());
        let cfg = GaConfig {
            population_size: 2,
            generations: 1,
            ..GaConfig::default()
        };
        let out = evolve(&p, &cfg, Execution::Sequential);
        assert_eq!(out.best.units().collect::<Vec<_>>(), vec![0]);
        assert_eq!(out.trace.len(), 2);
    }

    #[test]
    fn trace_is_monotone_and_runs_are_reproducible() {
        let items = order(18);
        let units = singles(&items);
        let base = all_residual(items.len());
        let p = GaProblem::new(&items, &units, &base, Pallet::default(), KpiConfig::default());
        let cfg = GaConfig {
            population_size: 16,
            generations: 8,
            seed: 11,
            ..GaConfig::default()
        };
        let a = evolve(&p, &cfg, Execution::Sequential);
        let b = evolve(&p, &cfg, Execution::Parallel);
        assert!(a.trace.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(a, b);
        assert!(p.is_valid(&a.best));
        assert_eq!(a.best_fitness, *a.trace.last().unwrap());
    }

    #[test]
    fn merge_rebases_and_guards_containment() {
        let items: Vec<Item> = (0..3).map(|k| Item::new(format!("m{k}"), 300, 300, 100, 10).unwrap()).collect();
        let units = singles(&items);
        let mut base = all_residual(3);
        base.residual = vec![1, 2];
        base.placed = vec![(0, crate::geometry::Placement::new(0, 0, 0, crate::geometry::Rotation::Deg0))];
        base.top_z = 400;
        let pallet = Pallet::default();

        let empty = merge_with_base(&base, &Chromosome::default(), &units, &items, &pallet);
        assert_eq!(empty.placed, base.placed);
        assert_eq!(empty.unplaced, vec![1, 2]);

        let c = chromosome(vec![layer(&[(1, 0, 0)], &units)], &units);
        let m = merge_with_base(&base, &c, &units, &items, &pallet);
        assert_eq!(m.placed[1].1.z_mm, 400);
        assert_eq!(m.unplaced, vec![2]);

        base.top_z = 1950;
        let m = merge_with_base(&base, &c, &units, &items, &pallet);
        assert_eq!(m.placed.len(), 1);
        assert_eq!(m.unplaced, vec![1, 2]);
    }
}
