//! Minimal-cost improvement plans.
//!
//! The ratio is a weighted mean of three components that improve
//! independently: potentiality through maturity steps, compatibility through
//! cell resolutions, and performance through indicator packages.
//! [`plan_scenario`] enumerates the useful options of each component and
//! combines them; [`plan_oracle`] enumerates every action subset and serves
//! as a reference on small catalogs.

mod catalog;
mod oracle;
mod search;

use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalog::{
    apply_actions, Action, ActionCatalog, ActionGroup, CellResolution, IndicatorPackage,
    MaturityStep,
};
pub use oracle::{plan_oracle, ORACLE_ACTION_LIMIT};
pub use search::{max_achievable, plan_scenario, plan_scenario_cancelable, PACKAGE_COMBINATION_LIMIT};

use crate::model::{CollaborationNetwork, IndicatorSet, NetworkId};
use crate::scoring::{assess, AssessError, ScoreBundle, ScoringConfig};

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("target {0} must be a number in [0, 1]")]
    Target(f64),
    #[error("invalid catalog: {}", .0.join("; "))]
    Catalog(Vec<String>),
    #[error(transparent)]
    Assess(#[from] AssessError),
    #[error("target {target} is not reachable; the catalog reaches at most ratlop {:.6}", .max_achievable.ratlop)]
    Infeasible {
        target: f64,
        max_achievable: Box<ScoreBundle>,
    },
    #[error("{combinations} indicator package combinations exceed the limit of {limit}")]
    TooManyPackages { combinations: u128, limit: usize },
    #[error("{actions} catalog actions exceed the enumeration limit of {limit}")]
    OracleLimit { actions: usize, limit: usize },
    #[error("planning was cancelled")]
    Cancelled,
    #[error("invalid action set: {0}")]
    Action(String),
}

/// The current state a plan starts from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsIs {
    pub network: CollaborationNetwork,
    pub indicators: IndicatorSet,
}

impl AsIs {
    pub fn new(network: CollaborationNetwork, indicators: IndicatorSet) -> Self {
        Self {
            network,
            indicators,
        }
    }
}

/// Projected minus as-is, per component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreDeltas {
    pub pi: f64,
    pub dc: f64,
    pub po: f64,
    pub ratlop: f64,
}

impl ScoreDeltas {
    pub fn between(before: &ScoreBundle, after: &ScoreBundle) -> Self {
        Self {
            pi: after.pi - before.pi,
            dc: after.dc - before.dc,
            po: after.po - before.po,
            ratlop: after.ratlop - before.ratlop,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub network_id: NetworkId,
    pub target: f64,
    pub config: ScoringConfig,
    pub as_is: AsIs,
    pub as_is_scores: ScoreBundle,
    /// Chosen actions, sorted by id.
    pub actions: Vec<Action>,
    /// Sum of the action costs, added in id order.
    pub total_cost: f64,
    /// Scores recomputed on the network with every action applied.
    pub projected: ScoreBundle,
    pub deltas: ScoreDeltas,
}

impl Plan {
    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn count(&self, group: ActionGroup) -> usize {
        self.actions.iter().filter(|a| a.group() == group).count()
    }
}

pub(crate) fn check_target(target: f64) -> Result<(), PlanError> {
    if (0.0..=1.0).contains(&target) {
        Ok(())
    } else {
        Err(PlanError::Target(target))
    }
}

pub(crate) fn check_cancel(cancel: &AtomicBool) -> Result<(), PlanError> {
    if cancel.load(Ordering::Relaxed) {
        Err(PlanError::Cancelled)
    } else {
        Ok(())
    }
}

/// Builds the plan for an action set, rescoring the applied network.
pub(crate) fn finish(
    as_is: &AsIs,
    as_is_scores: ScoreBundle,
    config: &ScoringConfig,
    target: f64,
    actions: Vec<Action>,
) -> Result<Plan, PlanError> {
    let (actions, total_cost) = catalog::canonical(actions);
    let (net, ind) = apply_actions(&as_is.network, &as_is.indicators, &actions)?;
    let projected = assess(&net, &ind, config)?;
    Ok(Plan {
        network_id: as_is.network.id.clone(),
        target,
        config: *config,
        as_is: as_is.clone(),
        deltas: ScoreDeltas::between(&as_is_scores, &projected),
        as_is_scores,
        actions,
        total_cost,
        projected,
    })
}

/// Ordering of candidate action sets: cost, then action count, then the
/// sorted action ids.
#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub cost: f64,
    pub ids: Vec<String>,
    pub actions: Vec<Action>,
}

impl Candidate {
    pub fn new(actions: Vec<Action>) -> Self {
        let (actions, cost) = catalog::canonical(actions);
        let ids = actions.iter().map(Action::id).collect();
        Self { cost, ids, actions }
    }

    pub fn better_than(&self, other: &Candidate) -> bool {
        (self.cost, self.ids.len(), &self.ids) < (other.cost, other.ids.len(), &other.ids)
    }
}
