//! Assessment periods, labelled `YYYY-Qn` (quarterly) or `YYYY-Mmm` (monthly).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    #[default]
    Quarterly,
    Monthly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PeriodLabel {
    Quarter { year: i32, quarter: u8 },
    Month { year: i32, month: u8 },
}

impl PeriodLabel {
    pub fn granularity(self) -> Granularity {
        match self {
            PeriodLabel::Quarter { .. } => Granularity::Quarterly,
            PeriodLabel::Month { .. } => Granularity::Monthly,
        }
    }

    fn first_month(self) -> (i32, u32, u32) {
        match self {
            PeriodLabel::Quarter { year, quarter } => (year, u32::from(quarter) * 3 - 2, 3),
            PeriodLabel::Month { year, month } => (year, u32::from(month), 1),
        }
    }
}

impl fmt::Display for PeriodLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeriodLabel::Quarter { year, quarter } => write!(f, "{year:04}-Q{quarter}"),
            PeriodLabel::Month { year, month } => write!(f, "{year:04}-M{month:02}"),
        }
    }
}

impl FromStr for PeriodLabel {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::PeriodLabel(s.to_owned());
        let b = s.as_bytes();
        if b.len() < 7 || b[4] != b'-' || !b[..4].iter().all(u8::is_ascii_digit) {
            return Err(bad());
        }
        let year: i32 = s[..4].parse().map_err(|_| bad())?;
        let digits = &s[6..];
        if !digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        match (b[5], digits.len()) {
            (b'Q', 1) => {
                let quarter: u8 = digits.parse().map_err(|_| bad())?;
                if (1..=4).contains(&quarter) {
                    return Ok(PeriodLabel::Quarter { year, quarter });
                }
            }
            (b'M', 2) => {
                let month: u8 = digits.parse().map_err(|_| bad())?;
                if (1..=12).contains(&month) {
                    return Ok(PeriodLabel::Month { year, month });
                }
            }
            _ => {}
        }
        Err(bad())
    }
}

#[derive(Serialize, Deserialize)]
struct RawPeriod {
    label: String,
    start_date: NaiveDate,
    end_date: NaiveDate,
}

/// A labelled calendar interval, both dates inclusive.
///
/// Periods order chronologically by `(start_date, end_date)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPeriod", into = "RawPeriod")]
pub struct Period {
    label: PeriodLabel,
    start_date: NaiveDate,
    end_date: NaiveDate,
}

impl Period {
    pub fn from_label(label: PeriodLabel) -> Result<Self, ModelError> {
        let (year, first, months) = label.first_month();
        let start = NaiveDate::from_ymd_opt(year, first, 1)
            .ok_or_else(|| ModelError::PeriodLabel(label.to_string()))?;
        let next = start
            .checked_add_months(chrono::Months::new(months))
            .ok_or_else(|| ModelError::PeriodLabel(label.to_string()))?;
        let end = next
            .pred_opt()
            .ok_or_else(|| ModelError::PeriodLabel(label.to_string()))?;
        debug_assert_eq!(start.year(), end.year());
        Ok(Self {
            label,
            start_date: start,
            end_date: end,
        })
    }

    pub fn quarter(year: i32, quarter: u8) -> Result<Self, ModelError> {
        check_range(quarter, 1..=4, || format!("{year:04}-Q{quarter}"))?;
        Self::from_label(PeriodLabel::Quarter { year, quarter })
    }

    pub fn month(year: i32, month: u8) -> Result<Self, ModelError> {
        check_range(month, 1..=12, || format!("{year:04}-M{month:02}"))?;
        Self::from_label(PeriodLabel::Month { year, month })
    }

    pub fn label(&self) -> PeriodLabel {
        self.label
    }

    pub fn start_date(&self) -> NaiveDate {
        self.start_date
    }

    pub fn end_date(&self) -> NaiveDate {
        self.end_date
    }

    pub fn granularity(&self) -> Granularity {
        self.label.granularity()
    }
}

fn check_range(
    v: u8,
    range: std::ops::RangeInclusive<u8>,
    label: impl FnOnce() -> String,
) -> Result<(), ModelError> {
    if range.contains(&v) {
        Ok(())
    } else {
        Err(ModelError::PeriodLabel(label()))
    }
}

impl FromStr for Period {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_label(s.parse()?)
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.label.fmt(f)
    }
}

impl Ord for Period {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.start_date, self.end_date).cmp(&(other.start_date, other.end_date))
    }
}

impl PartialOrd for Period {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<RawPeriod> for Period {
    type Error = ModelError;

    fn try_from(raw: RawPeriod) -> Result<Self, Self::Error> {
        let period: Period = raw.label.parse()?;
        if period.start_date != raw.start_date || period.end_date != raw.end_date {
            return Err(ModelError::PeriodDates {
                label: raw.label,
                start_date: raw.start_date,
                end_date: raw.end_date,
            });
        }
        Ok(period)
    }
}

impl From<Period> for RawPeriod {
    fn from(p: Period) -> Self {
        RawPeriod {
            label: p.label.to_string(),
            start_date: p.start_date,
            end_date: p.end_date,
        }
    }
}

/// Sorts periods chronologically, rejecting duplicate labels.
pub fn period_sequence(periods: impl IntoIterator<Item = Period>) -> Result<Vec<Period>, ModelError> {
    let mut seen: BTreeMap<Period, usize> = BTreeMap::new();
    for (position, period) in periods.into_iter().enumerate() {
        if let Some(&first) = seen.get(&period) {
            return Err(ModelError::DuplicatePeriod {
                label: period.to_string(),
                first,
                second: position,
            });
        }
        seen.insert(period, position);
    }
    Ok(seen.into_keys().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Period {
        s.parse().unwrap()
    }

    #[test]
    fn quarter_dates() {
        let q = p("2010-Q1");
        assert_eq!(q.start_date(), NaiveDate::from_ymd_opt(2010, 1, 1).unwrap());
        assert_eq!(q.end_date(), NaiveDate::from_ymd_opt(2010, 3, 31).unwrap());
        let q4 = p("2009-Q4");
        assert_eq!(q4.end_date(), NaiveDate::from_ymd_opt(2009, 12, 31).unwrap());
        let feb = p("2012-M02");
        assert_eq!(feb.end_date(), NaiveDate::from_ymd_opt(2012, 2, 29).unwrap());
        assert_eq!(feb.granularity(), Granularity::Monthly);
        assert!(q.start_date() < q.end_date());
    }

    #[test]
    fn label_syntax() {
        for bad in ["2010-Q5", "2010-Q0", "2010-M13", "2010-M1", "10-Q1", "2010Q1", "2010-X1", "2010-Q01", "2010-Q+"] {
            assert!(bad.parse::<Period>().is_err(), "{bad}");
        }
        for good in ["2010-Q3", "1999-M07"] {
            assert_eq!(p(good).to_string(), good);
        }
        assert!(Period::quarter(2010, 5).is_err());
        assert_eq!(Period::month(2010, 3).unwrap(), p("2010-M03"));
    }

    #[test]
    fn sequence_sorts() {
        let sorted = period_sequence([p("2010-Q3"), p("2010-Q1"), p("2010-Q2")]).unwrap();
        let labels: Vec<_> = sorted.iter().map(ToString::to_string).collect();
        assert_eq!(labels, ["2010-Q1", "2010-Q2", "2010-Q3"]);
    }

    #[test]
    fn sequence_crosses_year_boundary() {
        let sorted = period_sequence([p("2010-Q1"), p("2009-Q4")]).unwrap();
        assert_eq!(sorted, [p("2009-Q4"), p("2010-Q1")]);
    }

    #[test]
    fn sequence_rejects_duplicates() {
        let err = period_sequence([p("2010-Q1"), p("2010-Q1")]).unwrap_err();
        match err {
            ModelError::DuplicatePeriod { label, first, second } => {
                assert_eq!(label, "2010-Q1");
                assert_eq!((first, second), (0, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn serde_checks_dates() {
        let q = p("2010-Q2");
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(
            json,
            r#"{"label":"2010-Q2","start_date":"2010-04-01","end_date":"2010-06-30"}"#
        );
        assert_eq!(serde_json::from_str::<Period>(&json).unwrap(), q);
        let forged = r#"{"label":"2010-Q2","start_date":"2010-04-01","end_date":"2010-06-29"}"#;
        assert!(serde_json::from_str::<Period>(forged).is_err());
    }
}
