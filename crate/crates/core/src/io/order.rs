use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Item, Pallet};

/// One article line of an order; `quantity` copies of the same cuboid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Article {
    pub id: String,
    pub length_mm: u32,
    pub width_mm: u32,
    pub height_mm: u32,
    pub weight_g: u64,
    #[serde(default = "one")]
    pub quantity: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Order {
    pub order_id: String,
    pub articles: Vec<Article>,
}

impl Order {
    /// Checks positive dimensions, positive quantities and a non-empty order.
    pub fn validate(&self) -> Result<()> {
        if self.articles.is_empty() {
            return Err(Error::Validation(format!("order `{}`: articles is empty", self.order_id)));
        }
        for (k, a) in self.articles.iter().enumerate() {
            for (name, v) in [
                ("length_mm", a.length_mm),
                ("width_mm", a.width_mm),
                ("height_mm", a.height_mm),
                ("quantity", a.quantity),
            ] {
                if v == 0 {
                    return Err(Error::Validation(format!(
                        "order `{}`: articles[{k}].{name} must be positive (article `{}`)",
                        self.order_id, a.id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn item_count(&self) -> usize {
        self.articles.iter().map(|a| a.quantity as usize).sum()
    }

    /// Expanded item instances; copy `k` (from 1) of article `a` is `a#k`.
    pub fn expand(&self) -> impl Iterator<Item = Item> + '_ {
        self.articles.iter().flat_map(|a| {
            (1..=a.quantity).map(move |k| Item {
                id: format!("{}#{k}", a.id),
                length_mm: a.length_mm,
                width_mm: a.width_mm,
                height_mm: a.height_mm,
                mass_g: a.weight_g,
            })
        })
    }

    pub fn items(&self) -> Vec<Item> {
        self.expand().collect()
    }

    pub fn total_volume(&self) -> u64 {
        self.articles
            .iter()
            .map(|a| a.length_mm as u64 * a.width_mm as u64 * a.height_mm as u64 * a.quantity as u64)
            .sum()
    }

    /// Number of distinct base footprints, rotation-insensitive.
    pub fn distinct_footprints(&self) -> usize {
        self.articles
            .iter()
            .map(|a| (a.length_mm.max(a.width_mm), a.length_mm.min(a.width_mm)))
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Volumetric lower bound of the stack height: total volume over base area.
    pub fn estimated_stack_height_mm(&self, pallet: &Pallet) -> f64 {
        self.total_volume() as f64 / pallet.base_area() as f64
    }
}

fn from_json<'de, T: Deserialize<'de>>(bytes: &'de [u8]) -> Result<T> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        Error::parse(path, e.into_inner().to_string())
    })?;
    de.end()?;
    Ok(value)
}

/// Parses and validates one order document.
pub fn parse_order(bytes: &[u8]) -> Result<Order> {
    let order: Order = from_json(bytes)?;
    order.validate()?;
    Ok(order)
}

/// Loads a set of orders from a JSON array file, a JSON-lines file, a single
/// order file, or a directory of `.json` files (read in name order).
pub fn load_orders(path: &Path) -> Result<Vec<Order>> {
    if path.is_dir() {
        let mut files: Vec<_> = std::fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        let mut out = Vec::new();
        for f in files {
            out.extend(parse_order_set(&std::fs::read(&f)?)?);
        }
        return Ok(out);
    }
    parse_order_set(&std::fs::read(path)?)
}

/// Array of orders, a single order, or one order per line.
pub fn parse_order_set(bytes: &[u8]) -> Result<Vec<Order>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::parse("<document>", e.to_string()))?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let orders: Vec<Order> = from_json(trimmed.as_bytes())?;
        for o in &orders {
            o.validate()?;
        }
        return Ok(orders);
    }
    if let Ok(order) = parse_order(trimmed.as_bytes()) {
        return Ok(vec![order]);
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            parse_order(l.as_bytes()).map_err(|e| match e {
                Error::Parse { field, message } => Error::parse(format!("line {}: {field}", n + 1), message),
                other => other,
            })
        })
        .collect()
}

/// Selection rule for evaluation orders: varied footprints and a stack
/// height estimate in the band matching that variety.
pub fn passes_filter(order: &Order, pallet: &Pallet) -> bool {
    let fp = order.distinct_footprints();
    let h = order.estimated_stack_height_mm(pallet);
    (fp >= 5 && (1500.0..=1900.0).contains(&h)) || (fp >= 9 && (1200.0..=1500.0).contains(&h))
}

/// Keeps the orders passing [`passes_filter`], in input order.
pub fn filter_orders(orders: &[Order], pallet: &Pallet) -> Vec<Order> {
    orders.iter().filter(|o| passes_filter(o, pallet)).cloned().collect()
}
