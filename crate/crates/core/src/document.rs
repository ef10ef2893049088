//! Canonical JSON documents exchanged by the CLI, the HTTP service and the
//! store.
//!
//! Every document is an object `{"body": ..., "kind": ..., "schema": 1}`.
//! The canonical text form is compact JSON with object keys sorted
//! bytewise. Integers are written as integers. Floating-point numbers are
//! written with the shortest digit string that parses back to the same
//! double, zero-padded to at least [`MIN_SIGNIFICANT_DIGITS`] significant
//! digits, in positional notation for decimal exponents in `-7..21` and in
//! `d.ddd…e±x` notation otherwise. Parsing a canonical document and writing
//! it again reproduces the same bytes.

use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::model::{Assessment, CollaborationNetwork, NetworkId, Period, WeightVector};
use crate::planner::{ActionCatalog, Plan};
use crate::scoring::{DcAggregation, ScoreBundle, ScoringConfig};
use crate::store::SeriesReport;

pub const SCHEMA_VERSION: u64 = 1;
pub const MIN_SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0:?} (expected 1)")]
    Schema(Option<Value>),
    #[error("non-finite number {0} cannot be written")]
    NonFinite(f64),
    #[error("expected a {expected} document, got {found}")]
    Kind { expected: &'static str, found: &'static str },
}

/// Summary row of `GET /v1/networks`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub id: NetworkId,
    pub name: String,
    pub revision: usize,
    pub assessments: usize,
}

/// Raw probe log and survey contents for one network and period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorFiles {
    pub network_id: NetworkId,
    pub period: Period,
    /// Probe log CSV text.
    pub probes: String,
    /// Survey CSV text.
    pub survey: String,
}

/// Parameters of an assessment run. All fields are optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AssessmentRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dc_aggregation: Option<DcAggregation>,
    #[serde(default)]
    pub overwrite: bool,
    /// Compute without storing.
    #[serde(default)]
    pub dry_run: bool,
    /// Draft network replacing the stored one for a dry run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<CollaborationNetwork>,
}

impl AssessmentRequest {
    pub fn config(&self) -> ScoringConfig {
        ScoringConfig {
            weights: self.weights.unwrap_or_default(),
            dc_aggregation: self.dc_aggregation.unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRequest {
    pub catalog: ActionCatalog,
    pub target: f64,
    /// Defaults to the configuration of the latest assessment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ScoringConfig>,
}

/// Machine-readable error payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    /// Failing measurement step, 1 to 5, when the error comes from scoring.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_achievable: Option<ScoreBundle>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "body", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Document {
    Network(CollaborationNetwork),
    NetworkList(Vec<NetworkSummary>),
    IndicatorFiles(IndicatorFiles),
    AssessmentRequest(AssessmentRequest),
    Assessment(Assessment),
    Series(SeriesReport),
    Catalog(ActionCatalog),
    PlanRequest(PlanRequest),
    Plan(Plan),
    Error(ErrorBody),
}

macro_rules! into_variant {
    ($method:ident, $variant:ident, $ty:ty, $name:literal) => {
        pub fn $method(self) -> Result<$ty, DocumentError> {
            match self {
                Document::$variant(v) => Ok(v),
                other => Err(DocumentError::Kind {
                    expected: $name,
                    found: other.kind(),
                }),
            }
        }
    };
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Network(_) => "network",
            Document::NetworkList(_) => "network_list",
            Document::IndicatorFiles(_) => "indicator_files",
            Document::AssessmentRequest(_) => "assessment_request",
            Document::Assessment(_) => "assessment",
            Document::Series(_) => "series",
            Document::Catalog(_) => "catalog",
            Document::PlanRequest(_) => "plan_request",
            Document::Plan(_) => "plan",
            Document::Error(_) => "error",
        }
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let mut value: Value = serde_json::from_str(text)?;
        let schema = value.as_object_mut().and_then(|o| o.remove("schema"));
        if schema.as_ref().and_then(Value::as_u64) != Some(SCHEMA_VERSION) {
            return Err(DocumentError::Schema(schema));
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn to_canonical(&self) -> Result<String, DocumentError> {
        let mut value = serde_json::to_value(self)?;
        if let Some(obj) = value.as_object_mut() {
            obj.insert("schema".into(), Value::from(SCHEMA_VERSION));
        }
        let mut out = String::new();
        write_value(&mut out, &value)?;
        Ok(out)
    }

    into_variant!(into_network, Network, CollaborationNetwork, "network");
    into_variant!(into_indicator_files, IndicatorFiles, IndicatorFiles, "indicator_files");
    into_variant!(into_assessment_request, AssessmentRequest, AssessmentRequest, "assessment_request");
    into_variant!(into_assessment, Assessment, Assessment, "assessment");
    into_variant!(into_series, Series, SeriesReport, "series");
    into_variant!(into_catalog, Catalog, ActionCatalog, "catalog");
    into_variant!(into_plan_request, PlanRequest, PlanRequest, "plan_request");
    into_variant!(into_plan, Plan, Plan, "plan");
    into_variant!(into_error, Error, ErrorBody, "error");
}

/// Canonical text of any serializable value, without the document envelope.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String, DocumentError> {
    let value = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &value)?;
    Ok(out)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, DocumentError> {
    Ok(serde_json::from_str(text)?)
}

fn write_value(out: &mut String, value: &Value) -> Result<(), DocumentError> {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                let x = n.as_f64().unwrap_or(f64::NAN);
                out.push_str(&format_number(x).ok_or(DocumentError::NonFinite(x))?);
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s)?),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item)?;
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut entries: Vec<_> = map.iter().collect();
            entries.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
            out.push('{');
            for (i, (k, v)) in entries.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k)?);
                out.push(':');
                write_value(out, v)?;
            }
            out.push('}');
        }
    }
    Ok(())
}

/// Canonical decimal text of a finite double, `None` for NaN and infinities.
pub fn format_number(x: f64) -> Option<String> {
    if !x.is_finite() {
        return None;
    }
    // `{:e}` yields the shortest round-trip digits, e.g. "-7.1527e-1".
    let sci = format!("{x:e}");
    let (mantissa, exp) = sci.split_once('e')?;
    let exp: i32 = exp.parse().ok()?;
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa),
    };
    let mut digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    while digits.len() < MIN_SIGNIFICANT_DIGITS {
        digits.push('0');
    }

    let mut out = String::with_capacity(digits.len() + 8);
    if negative {
        out.push('-');
    }
    if (-7..21).contains(&exp) {
        if exp >= 0 {
            let int_len = exp as usize + 1;
            while digits.len() <= int_len {
                digits.push('0');
            }
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        } else {
            out.push_str("0.");
            for _ in 0..(-exp - 1) {
                out.push('0');
            }
            out.push_str(&digits);
        }
    } else {
        out.push_str(&digits[..1]);
        out.push('.');
        out.push_str(&digits[1..]);
        write!(out, "e{exp}").unwrap();
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.6).unwrap(), "0.600000000000");
        assert_eq!(format_number(1.0).unwrap(), "1.00000000000");
        assert_eq!(format_number(0.0).unwrap(), "0.00000000000");
        assert_eq!(format_number(-0.05).unwrap(), "-0.0500000000000");
        assert_eq!(format_number(6.0).unwrap(), "6.00000000000");
        assert_eq!(format_number(0.1 + 0.2).unwrap(), "0.30000000000000004");
        assert_eq!(format_number(123456789012345.0).unwrap(), "123456789012345.0");
        assert_eq!(format_number(1e-9).unwrap(), "1.00000000000e-9");
        assert_eq!(format_number(2.5e21).unwrap(), "2.50000000000e21");
        assert_eq!(format_number(f64::NAN), None);
    }

    proptest! {
        #[test]
        fn formatted_numbers_parse_back_bit_exact(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let text = format_number(x).unwrap();
            let back: f64 = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits(), "{}", text);
            let significant = text
                .split('e')
                .next()
                .unwrap()
                .chars()
                .filter(char::is_ascii_digit)
                .skip_while(|c| *c == '0')
                .count();
            prop_assert!(significant >= MIN_SIGNIFICANT_DIGITS || x == 0.0, "{}", text);
        }

        #[test]
        fn canonical_text_is_a_fixed_point(xs in proptest::collection::vec(0.0f64..1.0, 0..8), key in "[a-z]{1,6}") {
            let mut map = serde_json::Map::new();
            map.insert(key, Value::from(xs.clone()));
            map.insert("n".into(), Value::from(7u64));
            let text = to_canonical_json(&Value::Object(map)).unwrap();
            let reparsed: Value = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(to_canonical_json(&reparsed).unwrap(), text);
        }
    }

    #[test]
    fn keys_are_sorted_and_schema_checked() {
        let doc = Document::Error(ErrorBody {
            code: "not_found".into(),
            message: "network x".into(),
            step: None,
            max_achievable: None,
        });
        let text = doc.to_canonical().unwrap();
        assert_eq!(
            text,
            r#"{"body":{"code":"not_found","message":"network x"},"kind":"error","schema":1}"#
        );
        assert_eq!(Document::parse(&text).unwrap(), doc);
        let v2 = text.replace("\"schema\":1", "\"schema\":2");
        assert!(matches!(Document::parse(&v2), Err(DocumentError::Schema(_))));
        let none = r#"{"body":{"code":"x","message":"y"},"kind":"error"}"#;
        assert!(matches!(Document::parse(none), Err(DocumentError::Schema(None))));
    }

    #[test]
    fn wrong_kind_is_reported() {
        let doc = Document::NetworkList(vec![]);
        let err = doc.into_plan().unwrap_err();
        assert_eq!(err.to_string(), "expected a plan document, got network_list");
    }
}
