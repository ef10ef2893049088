use std::collections::BTreeMap;
use std::sync::atomic::AtomicBool;

use super::catalog::{canonical, Action, ActionCatalog};
use super::search::{max_achievable, package_combinations, Choice, Evaluator};
use super::{check_target, finish, AsIs, Plan, PlanError};
use crate::model::OrgId;
use crate::scoring::{assess, ScoringConfig};

/// Largest catalog `plan_oracle` accepts.
pub const ORACLE_ACTION_LIMIT: usize = 20;

/// An option with its actions sorted by id and their costs summed in that
/// order.
struct Sorted {
    value: f64,
    actions: Vec<Action>,
    ids: Vec<String>,
    cost: f64,
}

impl From<Choice> for Sorted {
    fn from(c: Choice) -> Self {
        let (actions, cost) = canonical(c.actions);
        let ids = actions.iter().map(Action::id).collect();
        Self {
            value: c.value,
            actions,
            ids,
            cost,
        }
    }
}

/// Reference planner: scores every subset of the catalog and keeps the
/// cheapest one reaching `target`, breaking ties like [`super::plan_scenario`].
/// Maturity steps of an organization only apply in order, so they are
/// enumerated as step counts.
pub fn plan_oracle(
    as_is: &AsIs,
    catalog: &ActionCatalog,
    target: f64,
    config: &ScoringConfig,
) -> Result<Plan, PlanError> {
    check_target(target)?;
    if catalog.len() > ORACLE_ACTION_LIMIT {
        return Err(PlanError::OracleLimit {
            actions: catalog.len(),
            limit: ORACLE_ACTION_LIMIT,
        });
    }
    let as_is_scores = assess(&as_is.network, &as_is.indicators, config)?;
    catalog.validate(&as_is.network, &as_is.indicators)?;
    let eval = Evaluator::new(as_is, config);

    // Maturity: every vector of per-organization step counts.
    let mut ladders: Vec<Vec<Action>> = Vec::new();
    for (org, level) in &eval.orgs {
        let mut ladder = Vec::new();
        let mut next = *level;
        while let Some(s) = catalog
            .maturity_actions
            .iter()
            .find(|s| &s.organization == org && s.from_level.get() == next)
        {
            ladder.push(Action::MaturityStep(s.clone()));
            next += 1;
        }
        ladders.push(ladder);
    }
    let mut maturity = Vec::new();
    let mut counts = vec![0usize; ladders.len()];
    loop {
        let levels: BTreeMap<&OrgId, u8> = eval
            .orgs
            .iter()
            .zip(&counts)
            .map(|((org, level), n)| (org, level + *n as u8))
            .collect();
        let actions = ladders
            .iter()
            .zip(&counts)
            .flat_map(|(ladder, n)| ladder[..*n].iter().cloned())
            .collect();
        let value = eval.pi(eval.orgs.iter().map(|(org, _)| levels[org]));
        maturity.push(Sorted::from(Choice { value, actions }));
        // Mixed-radix increment.
        let mut i = 0;
        while i < counts.len() && counts[i] == ladders[i].len() {
            counts[i] = 0;
            i += 1;
        }
        if i == counts.len() {
            break;
        }
        counts[i] += 1;
    }

    // Cells: every subset.
    let cells = &catalog.cell_actions;
    let compatibility: Vec<Sorted> = (0u32..1 << cells.len())
        .map(|mask| {
            let picked: Vec<_> = (0..cells.len()).filter(|i| mask >> i & 1 == 1).map(|i| &cells[i]).collect();
            Sorted::from(Choice {
                value: eval.dc(picked.iter().copied()),
                actions: picked.into_iter().map(|c| Action::ResolveCell(c.clone())).collect(),
            })
        })
        .collect();

    let performance: Vec<Sorted> = package_combinations(&eval, catalog, None, &AtomicBool::new(false))?
        .into_iter()
        .map(Sorted::from)
        .collect();

    // Ids sort as cell < maturity < package, so the canonical order of a
    // union is the concatenation of its parts.
    let mut best: Option<(f64, usize, [&Sorted; 3])> = None;
    for m in &maturity {
        for c in &compatibility {
            let partial = m.cost + c.cost;
            if let Some((cost, _, _)) = best {
                if partial > cost * (1.0 + 1e-9) + 1e-9 {
                    continue;
                }
            }
            for p in &performance {
                if eval.ratlop(m.value, c.value, p.value) < target {
                    continue;
                }
                let parts = [c, m, p];
                let cost = parts
                    .iter()
                    .flat_map(|s| s.actions.iter())
                    .fold(0.0, |acc, a| acc + a.cost());
                let count = parts.iter().map(|s| s.ids.len()).sum::<usize>();
                let better = match &best {
                    None => true,
                    Some((best_cost, best_count, best_parts)) => {
                        let ids = parts.iter().flat_map(|s| s.ids.iter());
                        let best_ids = best_parts.iter().flat_map(|s| s.ids.iter());
                        (cost, count) < (*best_cost, *best_count)
                            || ((cost, count) == (*best_cost, *best_count) && ids.lt(best_ids))
                    }
                };
                if better {
                    best = Some((cost, count, parts));
                }
            }
        }
    }

    match best {
        Some((_, _, parts)) => {
            let actions = parts.iter().flat_map(|s| s.actions.iter().cloned()).collect();
            finish(as_is, as_is_scores, config, target, actions)
        }
        None => Err(PlanError::Infeasible {
            target,
            max_achievable: Box::new(max_achievable(as_is, catalog, config)?),
        }),
    }
}
