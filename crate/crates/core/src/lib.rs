//! Interoperability monitoring: models of collaborative process networks,
//! the Ratlop ratio and its potentiality, compatibility and performance
//! components, indicator ingestion, a file-backed assessment store and a
//! minimal-cost improvement planner.

pub mod document;
pub mod ingest;
pub mod model;
pub mod planner;
pub mod scoring;
pub mod store;

pub use document::{Document, DocumentError};
pub use model::*;
pub use planner::{plan_oracle, plan_scenario, ActionCatalog, AsIs, Plan, PlanError};
pub use scoring::{assess, AssessError, DcAggregation, ScoreBundle, ScoringConfig};
pub use store::{Store, StoreError};
