//! Single-pallet 3D packing: superitem grouping, layered MaxRects base
//! solutions, genetic refinement of the residue, post-processing and KPI
//! evaluation.
//!
//! All geometry is on the integer millimetre grid. Rotation is about the
//! vertical axis only.

pub mod benchmark;
pub mod constructive;
pub mod error;
pub mod ga;
pub mod geometry;
pub mod io;
pub mod kpi;
pub mod par;
pub mod pipeline;
pub mod postprocess;
pub mod solution;
pub mod superitems;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{Item, Pallet, Placement, Rotation};
pub use pipeline::{pack_items, pack_order, RunConfig, Stage};
pub use solution::Solution;
