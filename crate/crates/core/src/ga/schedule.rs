//! Generation-dependent operator schedules.
//!
//! Each schedule is evaluated as a single ratio of exact integers so the
//! endpoint values are the correctly rounded decimals.

/// Tournament size `max(3, floor(P * (0.1 + 0.3 g / G)))`.
pub fn tournament_size(generation: usize, generations: usize, population: usize) -> usize {
    assert!(generations > 0 && generation <= generations);
    // P (G + 3g) / (10 G)
    let num = population as u128 * (generations as u128 + 3 * generation as u128);
    let den = 10 * generations as u128;
    ((num / den) as usize).max(3)
}

/// Crossover probability `0.5 (1 + 0.1 g / G)`.
pub fn crossover_prob(generation: usize, generations: usize) -> f64 {
    assert!(generations > 0 && generation <= generations);
    // (10 G + g) / (20 G)
    (10 * generations + generation) as f64 / (20 * generations) as f64
}

/// Mutation probability `0.35 (1 - 0.5 g / G)`.
pub fn mutation_prob(generation: usize, generations: usize) -> f64 {
    assert!(generations > 0 && generation <= generations);
    // 7 (2 G - g) / (40 G)
    (7 * (2 * generations - generation)) as f64 / (40 * generations) as f64
}

/// Number of elites `ceil(rate * P)`, at least one and at most `P`.
pub fn elite_count(rate: f64, population: usize) -> usize {
    let raw = rate * population as f64;
    // absorb representation error such as 0.1 * 100 = 10.000000000000002
    let n = (raw - 1e-9).ceil().max(1.0) as usize;
    n.min(population)
}
