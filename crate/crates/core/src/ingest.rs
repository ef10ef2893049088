//! Turns availability probe logs and satisfaction surveys into the DS, QoS
//! and TS rates.
//!
//! Probe log file (CSV, RFC 3339 timestamps):
//!
//! ```text
//! timestamp,component,kind,status
//! 2010-01-04T08:00:00Z,app-s1,app_server,UP
//! 2010-01-04T08:00:00Z,wan-core,network,DOWN
//! ```
//!
//! Survey file (CSV, Likert scores 1 to 5):
//!
//! ```text
//! respondent,score
//! r001,4
//! ```
//!
//! Every probe sample weighs the same regardless of the interval it covers.
//! The overall rate of a component kind is the mean of its per-component
//! rates. Survey scores map affinely, 1 to 0.0 and 5 to 1.0.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Indicator, IndicatorSet};

pub const PROBE_HEADER: &str = "timestamp,component,kind,status";
pub const SURVEY_HEADER: &str = "respondent,score";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    AppServer,
    Network,
}

impl ComponentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ComponentKind::AppServer => "app_server",
            ComponentKind::Network => "network",
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProbeStatus {
    #[serde(rename = "UP")]
    Up,
    #[serde(rename = "DOWN")]
    Down,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub timestamp: DateTime<FixedOffset>,
    pub component: String,
    pub kind: ComponentKind,
    pub status: ProbeStatus,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("no probe records of kind {0}")]
    NoRecords(ComponentKind),
    #[error("survey batch is empty")]
    EmptySurvey,
    #[error("expected header {expected:?}, found {found:?}")]
    Header { expected: &'static str, found: String },
    #[error("line {line}: {message}")]
    Syntax { line: u64, message: String },
    #[error("line {line}: score {score} outside 1..=5")]
    Score { line: u64, score: i64 },
    #[error("component {component}: timestamp {timestamp} earlier than the previous sample")]
    Unordered { component: String, timestamp: String },
    #[error("component {component} reported as both {first} and {second}")]
    KindConflict {
        component: String,
        first: ComponentKind,
        second: ComponentKind,
    },
}

/// Availability samples, timestamps non-decreasing per component.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProbeLog {
    records: Vec<ProbeRecord>,
}

impl ProbeLog {
    pub fn new(records: Vec<ProbeRecord>) -> Result<Self, IngestError> {
        let mut last: BTreeMap<&str, (&DateTime<FixedOffset>, ComponentKind)> = BTreeMap::new();
        for r in &records {
            if let Some((prev, kind)) = last.get(r.component.as_str()) {
                if *kind != r.kind {
                    return Err(IngestError::KindConflict {
                        component: r.component.clone(),
                        first: *kind,
                        second: r.kind,
                    });
                }
                if r.timestamp < **prev {
                    return Err(IngestError::Unordered {
                        component: r.component.clone(),
                        timestamp: r.timestamp.to_rfc3339(),
                    });
                }
            }
            last.insert(&r.component, (&r.timestamp, r.kind));
        }
        Ok(Self { records })
    }

    pub fn parse_csv(text: &str) -> Result<Self, IngestError> {
        let mut reader = csv_reader(text, PROBE_HEADER)?;
        let mut records = Vec::new();
        for row in reader.records() {
            let row = row.map_err(syntax)?;
            let line = row.position().map_or(0, |p| p.line());
            let field = |i: usize| row.get(i).unwrap_or_default();
            let timestamp = DateTime::parse_from_rfc3339(field(0)).map_err(|e| IngestError::Syntax {
                line,
                message: format!("timestamp {:?}: {e}", field(0)),
            })?;
            let kind = match field(2) {
                "app_server" => ComponentKind::AppServer,
                "network" => ComponentKind::Network,
                other => {
                    return Err(IngestError::Syntax {
                        line,
                        message: format!("kind {other:?} is not app_server or network"),
                    })
                }
            };
            let status = match field(3) {
                "UP" => ProbeStatus::Up,
                "DOWN" => ProbeStatus::Down,
                other => {
                    return Err(IngestError::Syntax {
                        line,
                        message: format!("status {other:?} is not UP or DOWN"),
                    })
                }
            };
            if field(1).is_empty() {
                return Err(IngestError::Syntax {
                    line,
                    message: "empty component id".into(),
                });
            }
            records.push(ProbeRecord {
                timestamp,
                component: field(1).to_owned(),
                kind,
                status,
            });
        }
        Self::new(records)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{PROBE_HEADER}\n");
        for r in &self.records {
            let status = match r.status {
                ProbeStatus::Up => "UP",
                ProbeStatus::Down => "DOWN",
            };
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.timestamp.to_rfc3339(),
                r.component,
                r.kind,
                status
            ));
        }
        out
    }

    pub fn records(&self) -> &[ProbeRecord] {
        &self.records
    }

    pub fn availability_rate(&self, kind: ComponentKind) -> Result<f64, IngestError> {
        availability_rate(&self.records, kind)
    }
}

/// Mean over components of `kind` of their UP-sample ratio.
///
/// Components are visited in id order, so the result does not depend on
/// record order.
pub fn availability_rate<'a>(
    records: impl IntoIterator<Item = &'a ProbeRecord>,
    kind: ComponentKind,
) -> Result<f64, IngestError> {
    let mut per_component: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for r in records.into_iter().filter(|r| r.kind == kind) {
        let (up, total) = per_component.entry(&r.component).or_default();
        *total += 1;
        if r.status == ProbeStatus::Up {
            *up += 1;
        }
    }
    if per_component.is_empty() {
        return Err(IngestError::NoRecords(kind));
    }
    let sum: f64 = per_component
        .values()
        .map(|&(up, total)| up as f64 / total as f64)
        .sum();
    Ok(sum / per_component.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyResponse {
    pub respondent: String,
    pub score: u8,
}

/// Likert responses, each score in `1..=5`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SurveyBatch {
    responses: Vec<SurveyResponse>,
}

impl SurveyBatch {
    pub fn new(responses: Vec<SurveyResponse>) -> Result<Self, IngestError> {
        if let Some(bad) = responses.iter().find(|r| !(1..=5).contains(&r.score)) {
            return Err(IngestError::Score {
                line: 0,
                score: i64::from(bad.score),
            });
        }
        Ok(Self { responses })
    }

    /// Builds a batch from bare scores with generated respondent ids.
    pub fn from_scores(scores: impl IntoIterator<Item = u8>) -> Result<Self, IngestError> {
        Self::new(
            scores
                .into_iter()
                .enumerate()
                .map(|(i, score)| SurveyResponse {
                    respondent: format!("r{:03}", i + 1),
                    score,
                })
                .collect(),
        )
    }

    pub fn parse_csv(text: &str) -> Result<Self, IngestError> {
        let mut reader = csv_reader(text, SURVEY_HEADER)?;
        let mut responses = Vec::new();
        for row in reader.records() {
            let row = row.map_err(syntax)?;
            let line = row.position().map_or(0, |p| p.line());
            let raw = row.get(1).unwrap_or_default();
            let score: i64 = raw.parse().map_err(|_| IngestError::Syntax {
                line,
                message: format!("score {raw:?} is not an integer"),
            })?;
            if !(1..=5).contains(&score) {
                return Err(IngestError::Score { line, score });
            }
            responses.push(SurveyResponse {
                respondent: row.get(0).unwrap_or_default().to_owned(),
                score: score as u8,
            });
        }
        Ok(Self { responses })
    }

    pub fn responses(&self) -> &[SurveyResponse] {
        &self.responses
    }

    pub fn satisfaction_rate(&self) -> Result<f64, IngestError> {
        satisfaction_rate(self)
    }
}

/// `(mean score - 1) / 4`.
pub fn satisfaction_rate(batch: &SurveyBatch) -> Result<f64, IngestError> {
    if batch.responses.is_empty() {
        return Err(IngestError::EmptySurvey);
    }
    let total: u64 = batch.responses.iter().map(|r| u64::from(r.score)).sum();
    let n = batch.responses.len() as u64;
    // (total/n - 1)/4 == (total - n) / 4n, evaluated in integers first.
    Ok((total - n) as f64 / (4 * n) as f64)
}

/// An ingestion failure tagged with the indicator it was computing.
#[derive(Debug, Error)]
#[error("{indicator}: {source}")]
pub struct IndicatorError {
    pub indicator: Indicator,
    #[source]
    pub source: IngestError,
}

pub fn build_indicator_set(
    app_log: &ProbeLog,
    net_log: &ProbeLog,
    survey: &SurveyBatch,
) -> Result<IndicatorSet, IndicatorError> {
    let tag = |indicator| move |source| IndicatorError { indicator, source };
    let ds = app_log
        .availability_rate(ComponentKind::AppServer)
        .map_err(tag(Indicator::Ds))?;
    let qos = net_log
        .availability_rate(ComponentKind::Network)
        .map_err(tag(Indicator::Qos))?;
    let ts = survey.satisfaction_rate().map_err(tag(Indicator::Ts))?;
    Ok(IndicatorSet::new(ds, qos, ts).expect("rates are in [0, 1] by construction"))
}

fn csv_reader<'a>(text: &'a str, header: &'static str) -> Result<csv::Reader<&'a [u8]>, IngestError> {
    let first = text.lines().next().unwrap_or_default().trim_end_matches('\r');
    if first != header {
        return Err(IngestError::Header {
            expected: header,
            found: first.to_owned(),
        });
    }
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes()))
}

fn syntax(e: csv::Error) -> IngestError {
    let line = e.position().map_or(0, |p| p.line());
    IngestError::Syntax {
        line,
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(minute: u32, component: &str, kind: ComponentKind, up: bool) -> ProbeRecord {
        ProbeRecord {
            timestamp: DateTime::parse_from_rfc3339(&format!("2010-01-04T08:{minute:02}:00Z")).unwrap(),
            component: component.into(),
            kind,
            status: if up { ProbeStatus::Up } else { ProbeStatus::Down },
        }
    }

    fn log(samples: &[(&str, ComponentKind, &[bool])]) -> ProbeLog {
        let mut records = Vec::new();
        for (component, kind, statuses) in samples {
            for (i, up) in statuses.iter().enumerate() {
                records.push(rec(i as u32, component, *kind, *up));
            }
        }
        ProbeLog::new(records).unwrap()
    }

    use ComponentKind::{AppServer, Network};

    #[test]
    fn single_server_sample_ratio() {
        let l = log(&[("s1", AppServer, &[true, true, true, false])]);
        assert_eq!(l.availability_rate(AppServer).unwrap(), 0.75);
    }

    #[test]
    fn mean_of_per_component_rates() {
        let l = log(&[
            ("s1", AppServer, &[true, true]),
            ("s2", AppServer, &[true, false, true, false]),
        ]);
        assert_eq!(l.availability_rate(AppServer).unwrap(), 0.75);
    }

    #[test]
    fn all_up() {
        let l = log(&[
            ("s1", AppServer, &[true]),
            ("s2", AppServer, &[true, true]),
            ("s3", AppServer, &[true, true, true]),
        ]);
        assert_eq!(l.availability_rate(AppServer).unwrap(), 1.0);
    }

    #[test]
    fn missing_kind_is_named() {
        let l = log(&[("s1", AppServer, &[true])]);
        let err = l.availability_rate(Network).unwrap_err();
        assert!(err.to_string().contains("network"), "{err}");
    }

    #[test]
    fn survey_anchors() {
        assert_eq!(SurveyBatch::from_scores([5, 5, 5]).unwrap().satisfaction_rate().unwrap(), 1.0);
        assert_eq!(SurveyBatch::from_scores([1, 1]).unwrap().satisfaction_rate().unwrap(), 0.0);
        assert_eq!(SurveyBatch::from_scores([1, 5]).unwrap().satisfaction_rate().unwrap(), 0.5);
        assert!(matches!(
            SurveyBatch::default().satisfaction_rate(),
            Err(IngestError::EmptySurvey)
        ));
        assert!(SurveyBatch::from_scores([0]).is_err());
    }

    #[test]
    fn indicator_set_from_evidence() {
        let s2 = [true, true, false, true, true, true, false, true, true, true];
        // s1 = 10/10, s2 = 8/10 -> mean 0.9
        let app = log(&[("s1", AppServer, &[true; 10]), ("s2", AppServer, &s2)]);
        let net = log(&[("wan", Network, &[true, true, true, true, false])]);
        // mean 3.8 -> (3.8 - 1) / 4 = 0.7
        let survey = SurveyBatch::from_scores([4, 4, 4, 4, 3]).unwrap();
        let set = build_indicator_set(&app, &net, &survey).unwrap();
        assert!((set.ds() - 0.9).abs() < 1e-15);
        assert!((set.qos() - 0.8).abs() < 1e-15);
        assert!((set.ts() - 0.7).abs() < 1e-15);

        let perfect = log(&[("s", AppServer, &[true]), ("w", Network, &[true])]);
        let top = SurveyBatch::from_scores([5]).unwrap();
        let set = build_indicator_set(&perfect, &perfect, &top).unwrap();
        assert_eq!(set, IndicatorSet::perfect());

        let err = build_indicator_set(&perfect, &perfect, &SurveyBatch::default()).unwrap_err();
        assert_eq!(err.indicator, Indicator::Ts);
        assert!(err.to_string().starts_with("ts:"));
    }

    #[test]
    fn parses_probe_csv() {
        let text = "timestamp,component,kind,status\n\
                    2010-01-04T08:00:00Z,app-s1,app_server,UP\n\
                    2010-01-04T08:05:00+01:00,wan,network,DOWN\n\
                    2010-01-04T08:10:00Z,app-s1,app_server,DOWN\n";
        let l = ProbeLog::parse_csv(text).unwrap();
        assert_eq!(l.records().len(), 3);
        assert_eq!(l.availability_rate(AppServer).unwrap(), 0.5);
        assert_eq!(l.availability_rate(Network).unwrap(), 0.0);
        assert_eq!(ProbeLog::parse_csv(&l.to_csv()).unwrap(), l);
    }

    #[test]
    fn rejects_malformed_probe_csv() {
        let wrong_header = "time,component,kind,status\n";
        assert!(matches!(ProbeLog::parse_csv(wrong_header), Err(IngestError::Header { .. })));
        let bad_status = "timestamp,component,kind,status\n2010-01-04T08:00:00Z,s,app_server,MAYBE\n";
        let err = ProbeLog::parse_csv(bad_status).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let unordered = "timestamp,component,kind,status\n\
                         2010-01-04T09:00:00Z,s,app_server,UP\n\
                         2010-01-04T08:00:00Z,s,app_server,UP\n";
        assert!(matches!(ProbeLog::parse_csv(unordered), Err(IngestError::Unordered { .. })));
        let conflict = "timestamp,component,kind,status\n\
                        2010-01-04T08:00:00Z,s,app_server,UP\n\
                        2010-01-04T09:00:00Z,s,network,UP\n";
        assert!(matches!(ProbeLog::parse_csv(conflict), Err(IngestError::KindConflict { .. })));
        let bad_time = "timestamp,component,kind,status\n2010-01-04 08:00,s,app_server,UP\n";
        assert!(ProbeLog::parse_csv(bad_time).is_err());
    }

    #[test]
    fn parses_survey_csv() {
        let s = SurveyBatch::parse_csv("respondent,score\nr1,4\nr2,2\n").unwrap();
        assert_eq!(s.responses().len(), 2);
        assert_eq!(s.satisfaction_rate().unwrap(), 0.5);
        let err = SurveyBatch::parse_csv("respondent,score\nr1,6\n").unwrap_err();
        assert!(matches!(err, IngestError::Score { line: 2, score: 6 }));
        assert!(SurveyBatch::parse_csv("respondent,score\nr1,4.5\n").is_err());
        let empty = SurveyBatch::parse_csv("respondent,score\n").unwrap();
        assert!(empty.satisfaction_rate().is_err());
    }
}
