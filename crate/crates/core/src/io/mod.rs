//! Order ingestion, the selection filter, and layout and report
//! serialization.

mod layout;
mod order;
mod report;

pub use layout::{LayoutDocument, LayoutMeta, PlacementRecord};
pub use order::{filter_orders, load_orders, parse_order, parse_order_set, passes_filter, Article, Order};
pub use report::{read_reports_csv, write_reports_csv, write_reports_json, ReportRow, REPORT_COLUMNS};
