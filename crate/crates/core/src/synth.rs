//! Seeded synthetic orders for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::io::{Article, Order};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub min_items: usize,
    pub max_items: usize,
    pub min_dim_mm: u32,
    pub max_dim_mm: u32,
    /// Upper bound on distinct articles per order.
    pub max_articles: usize,
    /// Item density range, g per cm^3.
    pub density: (f64, f64),
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            min_items: 10,
            max_items: 60,
            min_dim_mm: 50,
            max_dim_mm: 600,
            max_articles: 12,
            density: (0.1, 0.5),
        }
    }
}

/// One order with `min_items..=max_items` items spread over a few articles.
pub fn synthetic_order<R: Rng>(order_id: &str, cfg: &SynthConfig, rng: &mut R) -> Order {
    let n = rng.gen_range(cfg.min_items..=cfg.max_items.max(cfg.min_items));
    let k = rng.gen_range(1..=cfg.max_articles.min(n).max(1));
    // every article gets one copy, the rest is spread at random
    let mut qty = vec![1u32; k];
    for _ in k..n {
        qty[rng.gen_range(0..k)] += 1;
    }
    let articles = qty
        .into_iter()
        .enumerate()
        .map(|(a, quantity)| {
            let mut dim = || rng.gen_range(cfg.min_dim_mm..=cfg.max_dim_mm);
            let (length_mm, width_mm, height_mm) = (dim(), dim(), dim());
            let cm3 = length_mm as f64 * width_mm as f64 * height_mm as f64 / 1000.0;
            let weight_g = (cm3 * rng.gen_range(cfg.density.0..=cfg.density.1)).round().max(1.0) as u64;
            Article {
                id: format!("{order_id}-a{a}"),
                length_mm,
                width_mm,
                height_mm,
                weight_g,
                quantity,
            }
        })
        .collect();
    Order {
        order_id: order_id.to_string(),
        articles,
    }
}

/// `n` orders named `syn-0000`, `syn-0001`, ... from one seed.
pub fn synthetic_suite(n: usize, seed: u64, cfg: &SynthConfig) -> Vec<Order> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| synthetic_order(&format!("syn-{i:04}"), cfg, &mut rng)).collect()
}
