//! Human-readable output. Values are rounded half-up to two decimals for
//! display only; documents keep full precision.

use std::fmt::Write as _;

use imt_core::document::NetworkSummary;
use imt_core::model::Assessment;
use imt_core::planner::{ActionGroup, Plan};
use imt_core::scoring::ScoreBundle;
use imt_core::store::SeriesReport;

/// Rounds half-up to two decimals. The value is first printed with nine
/// decimals so that binary noise such as `0.125000000001` or
/// `0.12499999999` does not decide the rounding.
pub fn round2(x: f64) -> String {
    let text = format!("{:.9}", x.abs());
    let (int, frac) = text.split_once('.').unwrap_or((&text, "0"));
    let int: u64 = int.parse().unwrap_or(0);
    let digits: Vec<u64> = frac.bytes().map(|b| u64::from(b - b'0')).collect();
    let mut hundredths = int * 100 + digits[0] * 10 + digits[1];
    if digits[2] >= 5 {
        hundredths += 1;
    }
    let sign = if x < 0.0 && hundredths > 0 { "-" } else { "" };
    format!("{sign}{}.{:02}", hundredths / 100, hundredths % 100)
}

fn signed(x: f64) -> String {
    let r = round2(x);
    if r.starts_with('-') {
        r
    } else {
        format!("+{r}")
    }
}

/// A cost without trailing zeros: `6`, `6.5`, `6.25`.
pub fn cost(x: f64) -> String {
    let r = round2(x);
    r.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn scores(s: &ScoreBundle) -> String {
    format!(
        "PI      {}\nDC      {}\nPO      {}\nRatlop  {}\n",
        round2(s.pi),
        round2(s.dc),
        round2(s.po),
        round2(s.ratlop)
    )
}

pub fn assessment(a: &Assessment) -> String {
    let mut out = String::new();
    let stored = if a.version == 0 {
        "preview, not stored".to_string()
    } else {
        format!("version {}", a.version)
    };
    writeln!(out, "{} {} ({stored})", a.network_id, a.period).unwrap();
    out.push_str(&scores(&a.scores));
    out
}

fn counted(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

/// One-line summary such as `resolve 3 incompatibilities, cost 6`.
pub fn plan_summary(plan: &Plan) -> String {
    if plan.is_empty() {
        return "no action required".into();
    }
    let mut parts = Vec::new();
    let n = plan.count(ActionGroup::Maturity);
    if n > 0 {
        parts.push(format!("take {}", counted(n, "maturity step", "maturity steps")));
    }
    let n = plan.count(ActionGroup::Availability);
    if n > 0 {
        parts.push(format!("apply {}", counted(n, "availability package", "availability packages")));
    }
    let n = plan.count(ActionGroup::Satisfaction);
    if n > 0 {
        parts.push(format!("apply {}", counted(n, "satisfaction package", "satisfaction packages")));
    }
    let n = plan.count(ActionGroup::Incompatibility);
    if n > 0 {
        parts.push(format!("resolve {}", counted(n, "incompatibility", "incompatibilities")));
    }
    format!("{}, cost {}", parts.join(", "), cost(plan.total_cost))
}

pub fn plan(plan: &Plan) -> String {
    let mut out = String::new();
    writeln!(out, "{}", plan_summary(plan)).unwrap();
    writeln!(
        out,
        "ratlop {} -> {} (target {})",
        round2(plan.as_is_scores.ratlop),
        round2(plan.projected.ratlop),
        round2(plan.target)
    )
    .unwrap();
    let groups = [
        (ActionGroup::Maturity, "maturity"),
        (ActionGroup::Availability, "availability"),
        (ActionGroup::Satisfaction, "satisfaction"),
        (ActionGroup::Incompatibility, "incompatibilities"),
    ];
    for (group, title) in groups {
        let actions: Vec<_> = plan.actions.iter().filter(|a| a.group() == group).collect();
        if actions.is_empty() {
            continue;
        }
        writeln!(out, "{title}:").unwrap();
        for a in actions {
            writeln!(out, "  {a} (cost {})", cost(a.cost())).unwrap();
        }
    }
    writeln!(out, "projected:").unwrap();
    for line in scores(&plan.projected).lines() {
        writeln!(out, "  {line}").unwrap();
    }
    out
}

pub fn infeasible(target: f64, best: &ScoreBundle) -> String {
    format!(
        "target {} is out of reach; best achievable ratlop {} (PI {}, DC {}, PO {})",
        round2(target),
        round2(best.ratlop),
        round2(best.pi),
        round2(best.dc),
        round2(best.po)
    )
}

pub fn series(report: &SeriesReport) -> String {
    let mut out = String::new();
    writeln!(out, "{:<9} {:>7} {:>6} {:>6} {:>6} {:>7} {:>8}", "period", "version", "PI", "DC", "PO", "Ratlop", "change").unwrap();
    for (i, e) in report.series.entries.iter().enumerate() {
        let delta = i.checked_sub(1).and_then(|j| report.deltas.get(j));
        let change = delta.map_or(String::new(), |d| signed(d.d_ratlop));
        let mark = if delta.is_some_and(|d| d.regression) { "  REGRESSION" } else { "" };
        writeln!(
            out,
            "{:<9} {:>7} {:>6} {:>6} {:>6} {:>7} {:>8}{mark}",
            e.period.to_string(),
            e.version,
            round2(e.scores.pi),
            round2(e.scores.dc),
            round2(e.scores.po),
            round2(e.scores.ratlop),
            change
        )
        .unwrap();
    }
    let flagged = report.deltas.iter().filter(|d| d.regression).count();
    writeln!(out, "{}", counted(flagged, "regression", "regressions")).unwrap();
    out
}

pub fn networks(list: &[NetworkSummary]) -> String {
    let mut out = String::new();
    for n in list {
        writeln!(out, "{}  {} (revision {}, {} assessed periods)", n.id, n.name, n.revision, n.assessments).unwrap();
    }
    out
}
