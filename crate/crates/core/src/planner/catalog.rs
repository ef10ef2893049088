use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::PlanError;
use crate::model::{
    Cell, CollaborationNetwork, Indicator, IndicatorSet, LinkId, MaturityLevel, OrgId,
};

/// Raising one organization's maturity from `from_level` to the next level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaturityStep {
    pub organization: OrgId,
    pub from_level: MaturityLevel,
    pub cost: f64,
}

/// Removing one incompatibility of a link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResolution {
    pub link: LinkId,
    pub cell: Cell,
    pub cost: f64,
}

/// Setting one indicator to an absolute new value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorPackage {
    pub id: String,
    pub indicator: Indicator,
    pub new_value: f64,
    pub cost: f64,
}

/// Improvement actions available to the planner, with their costs in
/// effort units.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ActionCatalog {
    #[serde(default)]
    pub maturity_actions: Vec<MaturityStep>,
    #[serde(default)]
    pub cell_actions: Vec<CellResolution>,
    #[serde(default)]
    pub indicator_packages: Vec<IndicatorPackage>,
}

impl ActionCatalog {
    pub fn len(&self) -> usize {
        self.maturity_actions.len() + self.cell_actions.len() + self.indicator_packages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every catalog entry as an action.
    pub fn actions(&self) -> impl Iterator<Item = Action> + '_ {
        let m = self.maturity_actions.iter().cloned().map(Action::MaturityStep);
        let c = self.cell_actions.iter().cloned().map(Action::ResolveCell);
        let p = self.indicator_packages.iter().cloned().map(Action::IndicatorPackage);
        m.chain(c).chain(p)
    }

    /// Checks the catalog against the network and indicators it will be
    /// applied to. Returns every problem found.
    pub fn validate(&self, net: &CollaborationNetwork, ind: &IndicatorSet) -> Result<(), PlanError> {
        let mut problems = Vec::new();
        for a in self.actions() {
            if !(a.cost().is_finite() && a.cost() > 0.0) {
                problems.push(format!("{}: cost {} must be positive", a.id(), a.cost()));
            }
        }

        let mut seen = BTreeSet::new();
        for step in &self.maturity_actions {
            let id = Action::MaturityStep(step.clone()).id();
            let org = net.organization(&step.organization);
            match org.filter(|o| !o.external).and_then(|o| o.maturity.as_ref()) {
                None => problems.push(format!("{id}: no internal rated organization {}", step.organization)),
                Some(r) if step.from_level < r.level => problems.push(format!(
                    "{id}: level {} is below the current level {}",
                    step.from_level, r.level
                )),
                Some(_) => {}
            }
            if step.from_level.next().is_none() {
                problems.push(format!("{id}: level 5 is the highest maturity level"));
            }
            if !seen.insert((step.organization.clone(), step.from_level)) {
                problems.push(format!("{id}: listed twice"));
            }
        }

        let mut seen = BTreeSet::new();
        for cell in &self.cell_actions {
            let id = Action::ResolveCell(cell.clone()).id();
            match net.link(&cell.link) {
                None => problems.push(format!("{id}: unknown link {}", cell.link)),
                Some(l) if !l.compatibility.get(cell.cell) => {
                    problems.push(format!("{id}: cell has no incompatibility to resolve"))
                }
                Some(_) => {}
            }
            if !seen.insert((cell.link.clone(), cell.cell)) {
                problems.push(format!("{id}: listed twice"));
            }
        }

        let mut seen = BTreeSet::new();
        for p in &self.indicator_packages {
            let id = Action::IndicatorPackage(p.clone()).id();
            if p.id.is_empty() {
                problems.push("package with an empty id".to_string());
            }
            if !(0.0..=1.0).contains(&p.new_value) {
                problems.push(format!("{id}: new value {} is outside [0, 1]", p.new_value));
            } else if p.new_value < ind.get(p.indicator) {
                problems.push(format!(
                    "{id}: new value {} is below the current {} of {}",
                    p.new_value,
                    p.indicator,
                    ind.get(p.indicator)
                ));
            }
            if !seen.insert(p.id.clone()) {
                problems.push(format!("{id}: listed twice"));
            }
        }

        if problems.is_empty() {
            Ok(())
        } else {
            Err(PlanError::Catalog(problems))
        }
    }
}

/// The improvement areas an action belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionGroup {
    Maturity,
    Availability,
    Satisfaction,
    Incompatibility,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Action {
    MaturityStep(MaturityStep),
    ResolveCell(CellResolution),
    IndicatorPackage(IndicatorPackage),
}

impl Action {
    /// Stable identifier, used for ordering and tie-breaking.
    pub fn id(&self) -> String {
        match self {
            Action::MaturityStep(s) => format!("maturity:{}:{}", s.organization, s.from_level),
            Action::ResolveCell(c) => format!("cell:{}:{}", c.link, c.cell),
            Action::IndicatorPackage(p) => format!("package:{}", p.id),
        }
    }

    pub fn cost(&self) -> f64 {
        match self {
            Action::MaturityStep(s) => s.cost,
            Action::ResolveCell(c) => c.cost,
            Action::IndicatorPackage(p) => p.cost,
        }
    }

    pub fn group(&self) -> ActionGroup {
        match self {
            Action::MaturityStep(_) => ActionGroup::Maturity,
            Action::ResolveCell(_) => ActionGroup::Incompatibility,
            Action::IndicatorPackage(p) => match p.indicator {
                Indicator::Ds | Indicator::Qos => ActionGroup::Availability,
                Indicator::Ts => ActionGroup::Satisfaction,
            },
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::MaturityStep(s) => write!(
                f,
                "raise {} from level {} to {}",
                s.organization,
                s.from_level,
                u8::from(s.from_level) + 1
            ),
            Action::ResolveCell(c) => write!(f, "resolve {} on link {}", c.cell, c.link),
            Action::IndicatorPackage(p) => {
                write!(f, "apply package {} ({} to {})", p.id, p.indicator, p.new_value)
            }
        }
    }
}

/// Sorts by id and sums costs in that order.
pub(crate) fn canonical(mut actions: Vec<Action>) -> (Vec<Action>, f64) {
    actions.sort_by_cached_key(Action::id);
    let cost = actions.iter().map(Action::cost).sum();
    (actions, cost)
}

/// Applies `actions` to a network and its indicators.
///
/// Maturity steps of one organization must start at its current level and be
/// contiguous; cells must be open; at most one package may target each
/// indicator.
pub fn apply_actions(
    net: &CollaborationNetwork,
    ind: &IndicatorSet,
    actions: &[Action],
) -> Result<(CollaborationNetwork, IndicatorSet), PlanError> {
    let mut out = net.clone();
    let mut indicators = *ind;
    let mut steps: BTreeMap<&OrgId, Vec<MaturityLevel>> = BTreeMap::new();
    let mut packaged = BTreeSet::new();
    for action in actions {
        match action {
            Action::MaturityStep(s) => steps.entry(&s.organization).or_default().push(s.from_level),
            Action::ResolveCell(c) => {
                let link = out
                    .link_mut(&c.link)
                    .ok_or_else(|| PlanError::Action(format!("{}: unknown link", action.id())))?;
                if !link.compatibility.get(c.cell) {
                    return Err(PlanError::Action(format!("{}: cell is not open", action.id())));
                }
                link.compatibility.resolve(c.cell);
            }
            Action::IndicatorPackage(p) => {
                if !packaged.insert(p.indicator) {
                    return Err(PlanError::Action(format!(
                        "more than one package targets {}",
                        p.indicator
                    )));
                }
                indicators = indicators
                    .with(p.indicator, p.new_value)
                    .map_err(|e| PlanError::Action(format!("{}: {e}", action.id())))?;
            }
        }
    }
    for (org_id, mut levels) in steps {
        levels.sort();
        let org = out
            .organization_mut(org_id)
            .filter(|o| !o.external)
            .ok_or_else(|| PlanError::Action(format!("no internal organization {org_id}")))?;
        let rating = org
            .maturity
            .as_mut()
            .ok_or_else(|| PlanError::Action(format!("organization {org_id} has no rating")))?;
        for from in levels {
            if from != rating.level {
                return Err(PlanError::Action(format!(
                    "maturity steps of {org_id} are not contiguous from level {}",
                    rating.level
                )));
            }
            rating.level = from
                .next()
                .ok_or_else(|| PlanError::Action(format!("{org_id} is already at level 5")))?;
        }
    }
    Ok((out, indicators))
}
