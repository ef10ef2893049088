use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{NetworkId, Period};
use crate::scoring::ScoreBundle;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub period: Period,
    pub version: u32,
    pub scores: ScoreBundle,
}

/// Assessments of one network in strictly increasing period order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentSeries {
    pub network_id: NetworkId,
    pub entries: Vec<SeriesEntry>,
}

/// Change between two consecutive assessed periods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodDelta {
    pub from: Period,
    pub to: Period,
    pub d_pi: f64,
    pub d_dc: f64,
    pub d_po: f64,
    pub d_ratlop: f64,
    /// Set when `d_ratlop < -epsilon`.
    pub regression: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub network_id: NetworkId,
    pub epsilon: f64,
    pub deltas: Vec<PeriodDelta>,
}

impl DeltaReport {
    pub fn regressions(&self) -> impl Iterator<Item = &PeriodDelta> {
        self.deltas.iter().filter(|d| d.regression)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("delta report needs at least 2 assessed periods, series has {0}")]
    TooShort(usize),
    #[error("regression tolerance {0} must be finite and non-negative")]
    Epsilon(f64),
}

pub fn delta_report(series: &AssessmentSeries, epsilon: f64) -> Result<DeltaReport, SeriesError> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(SeriesError::Epsilon(epsilon));
    }
    if series.entries.len() < 2 {
        return Err(SeriesError::TooShort(series.entries.len()));
    }
    let deltas = series
        .entries
        .windows(2)
        .map(|pair| {
            let (a, b) = (&pair[0].scores, &pair[1].scores);
            let d_ratlop = b.ratlop - a.ratlop;
            PeriodDelta {
                from: pair[0].period,
                to: pair[1].period,
                d_pi: b.pi - a.pi,
                d_dc: b.dc - a.dc,
                d_po: b.po - a.po,
                d_ratlop,
                regression: d_ratlop < -epsilon,
            }
        })
        .collect();
    Ok(DeltaReport {
        network_id: series.network_id.clone(),
        epsilon,
        deltas,
    })
}

/// A series with its deltas, as served by the series endpoint and printed
/// by `imt report`. `deltas` is empty when fewer than two periods exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub series: AssessmentSeries,
    pub epsilon: f64,
    pub deltas: Vec<PeriodDelta>,
}

impl SeriesReport {
    pub fn build(series: AssessmentSeries, epsilon: f64) -> Result<Self, SeriesError> {
        let deltas = match delta_report(&series, epsilon) {
            Ok(report) => report.deltas,
            Err(SeriesError::TooShort(_)) => Vec::new(),
            Err(e) => return Err(e),
        };
        Ok(Self {
            series,
            epsilon,
            deltas,
        })
    }
}
