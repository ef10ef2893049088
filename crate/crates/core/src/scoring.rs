//! The five-step interoperability ratio.
//!
//! 1. scope: the network must validate;
//! 2. potentiality `PI = min_k(IMML_k / 5)` over internal organizations;
//! 3. compatibility `DC_link = 1 - n/24` for `n` incompatible cells, then
//!    aggregated across links (mean by default, min on request);
//! 4. performance `PO = cbrt(DS * QoS * TS)`;
//! 5. ratio `(w1 PI + w2 DC + w3 PO) / (w1 + w2 + w3)`.
//!
//! All functions are pure. Values are exposed at full precision; rounding is
//! a display concern.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    CollaborationNetwork, CompatibilityMatrix, IndicatorSet, LinkId, OrgId, ValidationReport,
    WeightVector, CELL_COUNT,
};

/// How per-link compatibility degrees combine into the scope degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DcAggregation {
    #[default]
    Mean,
    Min,
}

impl std::str::FromStr for DcAggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(Self::Mean),
            "min" => Ok(Self::Min),
            other => Err(format!("unknown dc aggregation {other:?} (expected mean or min)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoringConfig {
    #[serde(default)]
    pub weights: WeightVector,
    #[serde(default)]
    pub dc_aggregation: DcAggregation,
}

impl ScoringConfig {
    pub fn new(weights: WeightVector, dc_aggregation: DcAggregation) -> Self {
        Self {
            weights,
            dc_aggregation,
        }
    }
}

/// Scores of one assessment together with the per-organization and per-link
/// intermediates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBundle {
    pub pi: f64,
    pub dc: f64,
    pub po: f64,
    pub ratlop: f64,
    pub weights: WeightVector,
    pub dc_aggregation: DcAggregation,
    pub per_org_pi: BTreeMap<OrgId, f64>,
    pub per_link_dc: BTreeMap<LinkId, f64>,
}

/// The measurement steps, numbered as the method defines them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Scope,
    Potentiality,
    Compatibility,
    Performance,
    Aggregation,
}

impl Step {
    pub fn number(self) -> u8 {
        match self {
            Step::Scope => 1,
            Step::Potentiality => 2,
            Step::Compatibility => 3,
            Step::Performance => 4,
            Step::Aggregation => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Step::Scope => "scope delineation",
            Step::Potentiality => "interoperation potentiality",
            Step::Compatibility => "compatibility degree",
            Step::Performance => "operational performance",
            Step::Aggregation => "ratio aggregation",
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} ({})", self.number(), self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreError {
    #[error("maturity level {0} outside 1..=5")]
    LevelOutOfRange(u8),
    #[error("no rated organization in scope")]
    NoRatedOrganization,
    #[error("no interoperability link in scope")]
    NoLinks,
    #[error("{what} = {value} outside [0, 1]")]
    OutOfRange { what: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssessError {
    #[error("step 1 (scope delineation): invalid network: {0}")]
    InvalidScope(ValidationReport),
    #[error("{step}: {source}")]
    Step { step: Step, source: ScoreError },
}

impl AssessError {
    pub fn step(&self) -> Step {
        match self {
            AssessError::InvalidScope(_) => Step::Scope,
            AssessError::Step { step, .. } => *step,
        }
    }
}

/// `PI_k = 0.2 × IMML_k`, computed as `level / 5` so that every level maps to
/// the nearest double of its decimal value.
pub fn potentiality_of_org(level: u8) -> Result<f64, ScoreError> {
    if !(1..=5).contains(&level) {
        return Err(ScoreError::LevelOutOfRange(level));
    }
    Ok(f64::from(level) / 5.0)
}

/// `PI = min(PI_k)`.
pub fn network_potentiality(per_org: &[f64]) -> Result<f64, ScoreError> {
    per_org
        .iter()
        .copied()
        .reduce(f64::min)
        .ok_or(ScoreError::NoRatedOrganization)
}

/// `DC = 1 - Σ dc_ij / 24`.
pub fn link_compatibility(m: &CompatibilityMatrix) -> f64 {
    let satisfied = CELL_COUNT - m.incompatibility_count();
    satisfied as f64 / CELL_COUNT as f64
}

/// Combines per-link degrees, in the order given.
pub fn scope_compatibility(per_link: &[f64], how: DcAggregation) -> Result<f64, ScoreError> {
    if per_link.is_empty() {
        return Err(ScoreError::NoLinks);
    }
    Ok(match how {
        DcAggregation::Mean => per_link.iter().sum::<f64>() / per_link.len() as f64,
        DcAggregation::Min => per_link.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// Geometric mean of the three rates. A zero rate gives zero.
pub fn operational_performance(ind: &IndicatorSet) -> f64 {
    (ind.ds() * ind.qos() * ind.ts()).cbrt()
}

/// Weighted arithmetic mean of the three components.
pub fn aggregate_ratlop(pi: f64, dc: f64, po: f64, weights: &WeightVector) -> Result<f64, ScoreError> {
    for (what, value) in [("pi", pi), ("dc", dc), ("po", po)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(ScoreError::OutOfRange { what, value });
        }
    }
    let [w1, w2, w3] = weights.as_array();
    Ok((w1 * pi + w2 * dc + w3 * po) / (w1 + w2 + w3))
}

/// Runs all five steps on a network and its indicators.
pub fn assess(
    net: &CollaborationNetwork,
    ind: &IndicatorSet,
    config: &ScoringConfig,
) -> Result<ScoreBundle, AssessError> {
    let report = net.validate();
    if !report.is_valid() {
        return Err(AssessError::InvalidScope(report));
    }
    let at = |step| move |source| AssessError::Step { step, source };

    let mut per_org_pi = BTreeMap::new();
    let mut pis = Vec::new();
    for org in net.internal_organizations() {
        let Some(rating) = &org.maturity else { continue };
        let pi_k = potentiality_of_org(rating.level.get()).map_err(at(Step::Potentiality))?;
        per_org_pi.insert(org.id.clone(), pi_k);
        pis.push(pi_k);
    }
    let pi = network_potentiality(&pis).map_err(at(Step::Potentiality))?;

    let dcs: Vec<f64> = net.links.iter().map(|l| link_compatibility(&l.compatibility)).collect();
    let dc = scope_compatibility(&dcs, config.dc_aggregation).map_err(at(Step::Compatibility))?;
    let per_link_dc = net.links.iter().map(|l| l.id.clone()).zip(dcs).collect();

    let po = operational_performance(ind);
    if !(0.0..=1.0).contains(&po) {
        return Err(at(Step::Performance)(ScoreError::OutOfRange { what: "po", value: po }));
    }

    let ratlop = aggregate_ratlop(pi, dc, po, &config.weights).map_err(at(Step::Aggregation))?;

    Ok(ScoreBundle {
        pi,
        dc,
        po,
        ratlop,
        weights: config.weights,
        dc_aggregation: config.dc_aggregation,
        per_org_pi,
        per_link_dc,
    })
}
