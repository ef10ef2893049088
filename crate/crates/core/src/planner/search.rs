use std::cmp::Ordering as CmpOrdering;
use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::AtomicBool;

use super::catalog::{Action, ActionCatalog, CellResolution, IndicatorPackage};
use super::{check_cancel, check_target, finish, AsIs, Candidate, Plan, PlanError};
use crate::model::{CompatibilityMatrix, Indicator, LinkId, MaturityLevel, OrgId};
use crate::scoring::{
    aggregate_ratlop, assess, link_compatibility, network_potentiality, operational_performance,
    potentiality_of_org, scope_compatibility, DcAggregation, ScoreBundle, ScoringConfig,
};

/// Largest number of indicator package combinations `plan_scenario` will
/// enumerate.
pub const PACKAGE_COMBINATION_LIMIT: usize = 4096;

/// Component scores of modified inputs, computed the way `assess` computes
/// them so that search decisions agree with the rescored plan.
pub(crate) struct Evaluator<'a> {
    as_is: &'a AsIs,
    config: ScoringConfig,
    /// Internal rated organizations and their levels, in network order.
    pub orgs: Vec<(OrgId, u8)>,
    matrices: Vec<CompatibilityMatrix>,
    link_index: HashMap<LinkId, usize>,
}

impl<'a> Evaluator<'a> {
    pub fn new(as_is: &'a AsIs, config: &ScoringConfig) -> Self {
        let net = &as_is.network;
        Self {
            as_is,
            config: *config,
            orgs: net
                .internal_organizations()
                .filter_map(|o| o.maturity.as_ref().map(|r| (o.id.clone(), r.level.get())))
                .collect(),
            matrices: net.links.iter().map(|l| l.compatibility).collect(),
            link_index: net.links.iter().enumerate().map(|(i, l)| (l.id.clone(), i)).collect(),
        }
    }

    pub fn pi(&self, levels: impl IntoIterator<Item = u8>) -> f64 {
        let per_org: Vec<f64> = levels
            .into_iter()
            .map(|l| potentiality_of_org(l).expect("validated level"))
            .collect();
        network_potentiality(&per_org).expect("validated network has a rated organization")
    }

    pub fn dc<'c>(&self, cells: impl IntoIterator<Item = &'c CellResolution>) -> f64 {
        let mut matrices = self.matrices.clone();
        for c in cells {
            matrices[self.link_index[&c.link]].resolve(c.cell);
        }
        let per_link: Vec<f64> = matrices.iter().map(link_compatibility).collect();
        scope_compatibility(&per_link, self.config.dc_aggregation).expect("validated network has links")
    }

    pub fn po<'p>(&self, packages: impl IntoIterator<Item = &'p IndicatorPackage>) -> f64 {
        let mut ind = self.as_is.indicators;
        for p in packages {
            ind = ind.with(p.indicator, p.new_value).expect("validated package value");
        }
        operational_performance(&ind)
    }

    pub fn ratlop(&self, pi: f64, dc: f64, po: f64) -> f64 {
        aggregate_ratlop(pi, dc, po, &self.config.weights).expect("component scores lie in [0, 1]")
    }
}

/// One way of improving a single component.
#[derive(Debug, Clone)]
pub(crate) struct Choice {
    pub value: f64,
    pub actions: Vec<Action>,
}

fn by_cost_then_id<T>(cost: impl Fn(&T) -> f64, id: impl Fn(&T) -> String) -> impl FnMut(&&T, &&T) -> CmpOrdering {
    move |a, b| cost(a).total_cmp(&cost(b)).then_with(|| id(a).cmp(&id(b)))
}

fn cell_id(c: &CellResolution) -> String {
    Action::ResolveCell(c.clone()).id()
}

/// Maturity floors from the current minimum level up to 5. Raising the floor
/// to `L` takes every step below `L` of each organization under it.
fn maturity_choices(eval: &Evaluator, catalog: &ActionCatalog) -> Vec<Choice> {
    let steps: BTreeMap<(&OrgId, MaturityLevel), _> = catalog
        .maturity_actions
        .iter()
        .map(|s| ((&s.organization, s.from_level), s))
        .collect();
    let lowest = eval.orgs.iter().map(|(_, l)| *l).min().unwrap_or(5);
    let mut choices = Vec::new();
    'floors: for floor in lowest..=5 {
        let mut actions = Vec::new();
        for (org, level) in &eval.orgs {
            for from in *level..floor {
                let key = (org, MaturityLevel::new(from).expect("level below 5"));
                match steps.get(&key) {
                    Some(s) => actions.push(Action::MaturityStep((*s).clone())),
                    None => break 'floors,
                }
            }
        }
        let value = eval.pi(eval.orgs.iter().map(|(_, l)| (*l).max(floor)));
        choices.push(Choice { value, actions });
    }
    choices
}

/// Under the mean every resolved cell adds the same amount, so the `k`
/// cheapest cells are the best `k`. Under the minimum only the worst links
/// matter, so each option caps the open cells per link.
fn compatibility_choices(eval: &Evaluator, catalog: &ActionCatalog) -> Vec<Choice> {
    let order = by_cost_then_id(|c: &CellResolution| c.cost, cell_id);
    match eval.config.dc_aggregation {
        DcAggregation::Mean => {
            let mut cells: Vec<&CellResolution> = catalog.cell_actions.iter().collect();
            cells.sort_by(order);
            (0..=cells.len())
                .map(|k| Choice {
                    value: eval.dc(cells[..k].iter().copied()),
                    actions: cells[..k].iter().map(|c| Action::ResolveCell((*c).clone())).collect(),
                })
                .collect()
        }
        DcAggregation::Min => {
            let mut per_link: Vec<Vec<&CellResolution>> = vec![Vec::new(); eval.matrices.len()];
            for c in &catalog.cell_actions {
                per_link[eval.link_index[&c.link]].push(c);
            }
            let mut order = order;
            for cells in &mut per_link {
                cells.sort_by(&mut order);
            }
            let open: Vec<usize> = eval.matrices.iter().map(|m| m.incompatibility_count()).collect();
            let worst = open.iter().copied().max().unwrap_or(0);
            let mut choices = Vec::new();
            for cap in (0..=worst).rev() {
                let mut chosen = Vec::new();
                for (cells, &n) in per_link.iter().zip(&open) {
                    let need = n.saturating_sub(cap);
                    if need > cells.len() {
                        return choices;
                    }
                    chosen.extend_from_slice(&cells[..need]);
                }
                choices.push(Choice {
                    value: eval.dc(chosen.iter().copied()),
                    actions: chosen.into_iter().map(|c| Action::ResolveCell(c.clone())).collect(),
                });
            }
            choices
        }
    }
}

fn packages_by_indicator(catalog: &ActionCatalog) -> [Vec<&IndicatorPackage>; 3] {
    let mut groups: [Vec<&IndicatorPackage>; 3] = Default::default();
    for p in &catalog.indicator_packages {
        let slot = Indicator::ALL.iter().position(|i| *i == p.indicator).expect("known indicator");
        groups[slot].push(p);
    }
    groups
}

/// Every selection of at most one package per indicator.
pub(crate) fn package_combinations(
    eval: &Evaluator,
    catalog: &ActionCatalog,
    limit: Option<usize>,
    cancel: &AtomicBool,
) -> Result<Vec<Choice>, PlanError> {
    let groups = packages_by_indicator(catalog);
    let combinations = groups
        .iter()
        .fold(1u128, |acc, g| acc.saturating_mul(g.len() as u128 + 1));
    if let Some(limit) = limit {
        if combinations > limit as u128 {
            return Err(PlanError::TooManyPackages {
                combinations,
                limit,
            });
        }
    }
    let mut choices = Vec::with_capacity(combinations as usize);
    for a in 0..=groups[0].len() {
        check_cancel(cancel)?;
        for b in 0..=groups[1].len() {
            for c in 0..=groups[2].len() {
                let picked: Vec<&IndicatorPackage> = [(0, a), (1, b), (2, c)]
                    .into_iter()
                    .filter(|&(_, i)| i > 0)
                    .map(|(g, i)| groups[g][i - 1])
                    .collect();
                choices.push(Choice {
                    value: eval.po(picked.iter().copied()),
                    actions: picked.into_iter().map(|p| Action::IndicatorPackage(p.clone())).collect(),
                });
            }
        }
    }
    Ok(choices)
}

/// Performance options sorted by decreasing value, with the best option of
/// each prefix. The options meeting a threshold always form a prefix.
struct Frontier {
    values: Vec<f64>,
    best_of_prefix: Vec<Candidate>,
}

impl Frontier {
    fn new(mut choices: Vec<Choice>) -> Self {
        choices.sort_by(|a, b| b.value.total_cmp(&a.value));
        let mut values = Vec::with_capacity(choices.len());
        let mut best_of_prefix: Vec<Candidate> = Vec::with_capacity(choices.len());
        for c in choices {
            values.push(c.value);
            let cand = Candidate::new(c.actions);
            let best = match best_of_prefix.last() {
                Some(prev) if !cand.better_than(prev) => prev.clone(),
                _ => cand,
            };
            best_of_prefix.push(best);
        }
        Self {
            values,
            best_of_prefix,
        }
    }

    /// Cheapest option whose value satisfies `ok`, which must hold on a
    /// prefix of the values.
    fn cheapest(&self, ok: impl Fn(f64) -> bool) -> Option<&Candidate> {
        let n = self.values.partition_point(|&v| ok(v));
        n.checked_sub(1).map(|i| &self.best_of_prefix[i])
    }
}

pub fn plan_scenario(
    as_is: &AsIs,
    catalog: &ActionCatalog,
    target: f64,
    config: &ScoringConfig,
) -> Result<Plan, PlanError> {
    plan_scenario_cancelable(as_is, catalog, target, config, &AtomicBool::new(false))
}

/// [`plan_scenario`] that gives up with [`PlanError::Cancelled`] once
/// `cancel` is set.
pub fn plan_scenario_cancelable(
    as_is: &AsIs,
    catalog: &ActionCatalog,
    target: f64,
    config: &ScoringConfig,
    cancel: &AtomicBool,
) -> Result<Plan, PlanError> {
    check_target(target)?;
    let as_is_scores = assess(&as_is.network, &as_is.indicators, config)?;
    catalog.validate(&as_is.network, &as_is.indicators)?;
    if as_is_scores.ratlop >= target {
        return finish(as_is, as_is_scores, config, target, Vec::new());
    }
    let best = max_achievable(as_is, catalog, config)?;
    if best.ratlop < target {
        return Err(PlanError::Infeasible {
            target,
            max_achievable: Box::new(best),
        });
    }

    let eval = Evaluator::new(as_is, config);
    let pis = maturity_choices(&eval, catalog);
    let dcs = compatibility_choices(&eval, catalog);
    let pos = Frontier::new(package_combinations(
        &eval,
        catalog,
        Some(PACKAGE_COMBINATION_LIMIT),
        cancel,
    )?);

    let mut chosen: Option<Candidate> = None;
    for pi in &pis {
        check_cancel(cancel)?;
        for dc in &dcs {
            let Some(po) = pos.cheapest(|po| eval.ratlop(pi.value, dc.value, po) >= target) else {
                continue;
            };
            let mut actions = pi.actions.clone();
            actions.extend(dc.actions.iter().cloned());
            actions.extend(po.actions.iter().cloned());
            let cand = Candidate::new(actions);
            if chosen.as_ref().map_or(true, |c| cand.better_than(c)) {
                chosen = Some(cand);
            }
        }
    }
    match chosen {
        Some(c) => finish(as_is, as_is_scores, config, target, c.actions),
        None => Err(PlanError::Infeasible {
            target,
            max_achievable: Box::new(best),
        }),
    }
}

/// Scores after every applicable catalog action: all maturity steps that
/// continue from each organization's level, every cell, and the highest
/// package of each indicator.
pub fn max_achievable(
    as_is: &AsIs,
    catalog: &ActionCatalog,
    config: &ScoringConfig,
) -> Result<ScoreBundle, PlanError> {
    catalog.validate(&as_is.network, &as_is.indicators)?;
    let eval = Evaluator::new(as_is, config);
    let mut actions = Vec::new();
    for (org, level) in &eval.orgs {
        let mut next = *level;
        while let Some(step) = catalog
            .maturity_actions
            .iter()
            .find(|s| &s.organization == org && s.from_level.get() == next)
        {
            actions.push(Action::MaturityStep(step.clone()));
            next += 1;
        }
    }
    actions.extend(catalog.cell_actions.iter().cloned().map(Action::ResolveCell));
    for group in packages_by_indicator(catalog) {
        let top = group.into_iter().max_by(|a, b| {
            a.new_value
                .total_cmp(&b.new_value)
                .then_with(|| b.id.cmp(&a.id))
        });
        actions.extend(top.cloned().map(Action::IndicatorPackage));
    }
    let as_is_scores = assess(&as_is.network, &as_is.indicators, config)?;
    Ok(finish(as_is, as_is_scores, config, 0.0, actions)?.projected)
}
