//! End-to-end solve of one order: blocks, base layers, genetic refinement of
//! the residue and post-processing, cut short according to the [`Stage`].

use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constructive::{build_base_solution, ConstructiveConfig};
use crate::error::{Error, Result};
use crate::ga::{evolve, merge_with_base, GaConfig, GaProblem};
use crate::geometry::{Item, Pallet};
use crate::io::{LayoutDocument, LayoutMeta, Order};
use crate::kpi::{eval_metrics, KpiConfig, KpiReport};
use crate::par::Execution;
use crate::postprocess::{post_process, PostConfig, PostDiagnostics};
use crate::solution::Solution;
use crate::superitems::{build_superitems, SuperItemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    MaxrectsOnly,
    HybridGa,
    #[default]
    HybridGaPp,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::MaxrectsOnly, Stage::HybridGa, Stage::HybridGaPp];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::MaxrectsOnly => "maxrects-only",
            Stage::HybridGa => "hybrid-ga",
            Stage::HybridGaPp => "hybrid-ga-pp",
        }
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown stage `{s}` (expected maxrects-only, hybrid-ga or hybrid-ga-pp)")))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub pallet: Pallet,
    pub stage: Stage,
    pub superitems: SuperItemConfig,
    pub constructive: ConstructiveConfig,
    pub ga: GaConfig,
    pub kpi: KpiConfig,
    pub post: PostConfig,
    /// Fan-out of fitness evaluation; never affects results.
    #[serde(skip)]
    pub execution: Execution,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        Pallet::new(
            self.pallet.length_mm,
            self.pallet.width_mm,
            self.pallet.height_mm,
            self.pallet.max_payload_g,
        )?;
        self.ga.validate()?;
        self.kpi.validate()?;
        self.post.validate()?;
        if self.constructive.layer_height_tolerance < 1.0 {
            return Err(Error::Config("layer_height_tolerance must be at least 1".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form of every result-affecting setting.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackOutcome {
    pub order_id: String,
    pub items: Vec<Item>,
    pub solution: Solution,
    pub report: KpiReport,
    /// Per-generation best fitness; empty when the genetic phase did not run.
    pub trace: Vec<f64>,
    pub post: Option<PostDiagnostics>,
    pub residual_blocks: usize,
}

/// Solves one order. The report's `runtime_s` covers the solve path only.
pub fn pack_items(order_id: &str, items: Vec<Item>, cfg: &RunConfig) -> Result<PackOutcome> {
    cfg.validate()?;
    let started = Instant::now();
    let pallet = cfg.pallet;
    let units = build_superitems(&items, &pallet, &cfg.superitems);
    let base = build_base_solution(&units, &items, &pallet, &cfg.constructive);
    let residual_blocks = base.residual.len();

    let mut trace = Vec::new();
    let mut solution = match cfg.stage {
        Stage::MaxrectsOnly => Solution::from_placed(base.placed.clone(), items.len()),
        Stage::HybridGa | Stage::HybridGaPp if base.residual.is_empty() => {
            Solution::from_placed(base.placed.clone(), items.len())
        }
        Stage::HybridGa | Stage::HybridGaPp => {
            let problem = GaProblem::new(&items, &units, &base, pallet, cfg.kpi);
            let outcome = evolve(&problem, &cfg.ga, cfg.execution);
            trace = outcome.trace;
            merge_with_base(&base, &outcome.best, &units, &items, &pallet)
        }
    };
    let mut post = None;
    if cfg.stage == Stage::HybridGaPp {
        let (s, d) = post_process(&solution, &items, &pallet, &cfg.post);
        solution = s;
        post = Some(d);
    }
    let runtime_s = started.elapsed().as_secs_f64();

    let mut report = eval_metrics(
        order_id,
        &solution.boxes(&items),
        &pallet,
        items.len(),
        &cfg.kpi,
    );
    report.runtime_s = runtime_s;
    Ok(PackOutcome {
        order_id: order_id.to_string(),
        items,
        solution,
        report,
        trace,
        post,
        residual_blocks,
    })
}

pub fn pack_order(order: &Order, cfg: &RunConfig) -> Result<PackOutcome> {
    order.validate()?;
    pack_items(&order.order_id, order.items(), cfg)
}

/// Layout document with the report embedded.
pub fn layout_document(outcome: &PackOutcome, cfg: &RunConfig) -> LayoutDocument {
    let meta = LayoutMeta {
        seed: cfg.ga.seed,
        config_hash: cfg.config_hash(),
        stage: Some(cfg.stage.as_str().to_string()),
        created_at: None,
    };
    let mut doc = LayoutDocument::from_solution(&outcome.order_id, cfg.pallet, &outcome.items, &outcome.solution, meta);
    doc.kpi = Some(outcome.report.clone());
    doc
}

/// Scores an externally produced layout. `total_items` defaults to the
/// document's placed plus unplaced count; the solve time is carried over
/// from an embedded report when there is one.
pub fn evaluate_layout(
    doc: &LayoutDocument,
    items: Option<&[Item]>,
    total_items: Option<usize>,
    kpi: &KpiConfig,
) -> Result<KpiReport> {
    doc.validate()?;
    let boxes = doc.boxes(items)?;
    let total = total_items.unwrap_or_else(|| doc.total_items());
    let mut report = eval_metrics(&doc.order_id, &boxes, &doc.pallet, total, kpi);
    if let Some(k) = &doc.kpi {
        report.runtime_s = k.runtime_s;
    }
    Ok(report)
}
