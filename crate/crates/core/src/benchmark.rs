//! Batch runs over an order set and their summary tables.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::io::Order;
use crate::kpi::KpiReport;
use crate::par::{self, Execution};
use crate::pipeline::{pack_order, RunConfig};

/// Packs every order; reports come back in input order whatever `exec` is.
pub fn run_benchmark(orders: &[Order], cfg: &RunConfig, exec: Execution) -> Result<Vec<KpiReport>> {
    par::map(exec, orders, |o| pack_order(o, cfg).map(|out| out.report))
        .into_iter()
        .collect()
}

/// Columns summarized by [`aggregate`].
pub const AGGREGATE_COLUMNS: [&str; 11] = [
    "n_placed",
    "abs_den",
    "rel_den",
    "hw_ratio",
    "side_sup",
    "surf_sup",
    "cog2d",
    "cog3d",
    "corrected_eff",
    "n_items",
    "runtime_s",
];

fn column(r: &KpiReport, name: &str) -> f64 {
    match name {
        "n_items" => r.n_items as f64,
        "n_placed" => r.n_placed as f64,
        "abs_den" => r.abs_den,
        "rel_den" => r.rel_den,
        "hw_ratio" => r.hw_ratio,
        "side_sup" => r.side_sup,
        "surf_sup" => r.surf_sup,
        "cog2d" => r.cog2d,
        "cog3d" => r.cog3d,
        "corrected_eff" => r.corrected_eff,
        "runtime_s" => r.runtime_s,
        _ => unreachable!("unknown column {name}"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnStats {
    pub column: String,
    pub mean: f64,
    /// Population standard deviation (divides by n).
    pub std_pop: f64,
}

/// `(mean, population std)`; `(NaN, NaN)` for no values.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn aggregate(reports: &[KpiReport]) -> Vec<ColumnStats> {
    AGGREGATE_COLUMNS
        .iter()
        .map(|&c| {
            let values: Vec<f64> = reports.iter().map(|r| column(r, c)).collect();
            let (mean, std_pop) = mean_std(&values);
            ColumnStats {
                column: c.to_string(),
                mean,
                std_pop,
            }
        })
        .collect()
}

pub fn write_aggregate_csv<W: Write>(stats: &[ColumnStats], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in stats {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

/// One fixed-width bin `[lo, hi)` of the size series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bucket {
    pub lo: usize,
    pub hi: usize,
    /// Orders whose size (item count) falls in the bin.
    pub orders_by_size: usize,
    /// Orders whose packed-item count falls in the bin.
    pub orders_by_placed: usize,
    pub abs_den: f64,
    pub rel_den: f64,
    pub hw_ratio: f64,
    pub side_sup: f64,
    pub surf_sup: f64,
    pub cog2d: f64,
    pub cog3d: f64,
    pub corrected_eff: f64,
}

/// KPI means by packed-item count plus the order-size histogram. Bins of
/// `width` items span at least `[15, 60)` and widen to cover the data.
pub fn buckets(reports: &[KpiReport], width: usize) -> Vec<Bucket> {
    assert!(width > 0, "bucket width must be positive");
    let lo_data = reports.iter().map(|r| r.n_placed.min(r.n_items)).min().unwrap_or(15);
    let hi_data = reports.iter().map(|r| r.n_placed.max(r.n_items) + 1).max().unwrap_or(60);
    let start = lo_data.min(15) / width * width;
    let end = hi_data.max(60).div_ceil(width) * width;
    (start..end)
        .step_by(width)
        .map(|lo| {
            let hi = lo + width;
            let inside = |n: usize| lo <= n && n < hi;
            let placed: Vec<&KpiReport> = reports.iter().filter(|r| inside(r.n_placed)).collect();
            let mean = |f: fn(&KpiReport) -> f64| mean_std(&placed.iter().map(|r| f(r)).collect::<Vec<_>>()).0;
            Bucket {
                lo,
                hi,
                orders_by_size: reports.iter().filter(|r| inside(r.n_items)).count(),
                orders_by_placed: placed.len(),
                abs_den: mean(|r| r.abs_den),
                rel_den: mean(|r| r.rel_den),
                hw_ratio: mean(|r| r.hw_ratio),
                side_sup: mean(|r| r.side_sup),
                surf_sup: mean(|r| r.surf_sup),
                cog2d: mean(|r| r.cog2d),
                cog3d: mean(|r| r.cog3d),
                corrected_eff: mean(|r| r.corrected_eff),
            }
        })
        .collect()
}

pub fn write_buckets_csv<W: Write>(buckets: &[Bucket], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for b in buckets {
        w.serialize(b)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(n: usize, v: f64) -> KpiReport {
        KpiReport {
            order_id: format!("o{n}"),
            n_items: n,
            n_placed: n,
            abs_den: v,
            rel_den: v,
            hw_ratio: v,
            side_sup: v,
            surf_sup: v,
            cog2d: v,
            cog3d: v,
            corrected_eff: v,
            runtime_s: v,
            n_valid: n,
            overlap_volume_mm3: 0,
        }
    }

    #[test]
    fn single_order_has_zero_spread() {
        for s in aggregate(&[report(20, 0.7)]) {
            assert_eq!(s.std_pop, 0.0, "{}", s.column);
        }
    }

    #[test]
    fn two_orders_average() {
        let stats = aggregate(&[report(20, 0.4), report(30, 0.6)]);
        let abs = stats.iter().find(|s| s.column == "abs_den").unwrap();
        assert!((abs.mean - 0.5).abs() < 1e-12);
        assert!((abs.std_pop - 0.1).abs() < 1e-12);
    }

    #[test]
    fn buckets_cover_the_size_range() {
        let b = buckets(&[report(22, 0.5), report(24, 0.7), report(41, 0.2)], 5);
        assert_eq!(b.first().unwrap().lo, 15);
        assert_eq!(b.last().unwrap().hi, 60);
        assert!(b.iter().all(|x| x.hi - x.lo == 5));
        let bin = b.iter().find(|x| x.lo == 20).unwrap();
        assert_eq!(bin.orders_by_placed, 2);
        assert!((bin.abs_den - 0.6).abs() < 1e-12);
        assert_eq!(b.iter().map(|x| x.orders_by_size).sum::<usize>(), 3);
        let wide = buckets(&[report(3, 0.1), report(75, 0.1)], 5);
        assert_eq!((wide[0].lo, wide.last().unwrap().hi), (0, 80));
    }
}
