use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kpi::KpiReport;

/// Column set of the per-order report CSV.
pub const REPORT_COLUMNS: [&str; 12] = [
    "order_id",
    "n_items",
    "n_placed",
    "abs_den",
    "rel_den",
    "hw_ratio",
    "side_sup",
    "surf_sup",
    "cog2d",
    "cog3d",
    "corrected_eff",
    "runtime_s",
];

/// One CSV row; the report minus the diagnostic fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub order_id: String,
    pub n_items: usize,
    pub n_placed: usize,
    pub abs_den: f64,
    pub rel_den: f64,
    pub hw_ratio: f64,
    pub side_sup: f64,
    pub surf_sup: f64,
    pub cog2d: f64,
    pub cog3d: f64,
    pub corrected_eff: f64,
    pub runtime_s: f64,
}

impl From<&KpiReport> for ReportRow {
    fn from(r: &KpiReport) -> Self {
        Self {
            order_id: r.order_id.clone(),
            n_items: r.n_items,
            n_placed: r.n_placed,
            abs_den: r.abs_den,
            rel_den: r.rel_den,
            hw_ratio: r.hw_ratio,
            side_sup: r.side_sup,
            surf_sup: r.surf_sup,
            cog2d: r.cog2d,
            cog3d: r.cog3d,
            corrected_eff: r.corrected_eff,
            runtime_s: r.runtime_s,
        }
    }
}

pub fn write_reports_csv<W: Write>(reports: &[KpiReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if reports.is_empty() {
        w.write_record(REPORT_COLUMNS)?;
    }
    for r in reports {
        w.serialize(ReportRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_reports_csv<R: Read>(input: R) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

pub fn write_reports_json<W: Write>(reports: &[KpiReport], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, reports)?;
    out.write_all(b"\n")?;
    Ok(())
}
