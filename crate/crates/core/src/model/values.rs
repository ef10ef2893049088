use std::fmt;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Interoperation maturity model level, 1 (isolated, ad hoc) to 5 (unified).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct MaturityLevel(u8);

impl MaturityLevel {
    pub const MIN: MaturityLevel = MaturityLevel(1);
    pub const MAX: MaturityLevel = MaturityLevel(5);

    pub fn new(level: u8) -> Result<Self, ModelError> {
        if (1..=5).contains(&level) {
            Ok(Self(level))
        } else {
            Err(ModelError::MaturityLevel(level))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// The next level up, `None` at level 5.
    pub fn next(self) -> Option<Self> {
        (self.0 < 5).then(|| Self(self.0 + 1))
    }

    /// Levels strictly above `self` up to and including 5.
    pub fn above(self) -> impl Iterator<Item = MaturityLevel> {
        (self.0 + 1..=5).map(MaturityLevel)
    }
}

impl TryFrom<u8> for MaturityLevel {
    type Error = ModelError;

    fn try_from(level: u8) -> Result<Self, Self::Error> {
        Self::new(level)
    }
}

impl From<MaturityLevel> for u8 {
    fn from(level: MaturityLevel) -> u8 {
        level.0
    }
}

impl fmt::Display for MaturityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Rated maturity of one organization. The model (LISI, EIMM, GIMM, ...) may
/// differ per organization; only the level enters the score.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MaturityRating {
    pub model_name: String,
    pub level: MaturityLevel,
}

impl MaturityRating {
    pub fn new(model_name: impl Into<String>, level: MaturityLevel) -> Self {
        Self {
            model_name: model_name.into(),
            level,
        }
    }
}

/// One of the three operational performance rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    /// Availability of application servers.
    Ds,
    /// Network availability.
    Qos,
    /// End-user satisfaction.
    Ts,
}

impl Indicator {
    pub const ALL: [Indicator; 3] = [Indicator::Ds, Indicator::Qos, Indicator::Ts];

    pub fn as_str(self) -> &'static str {
        match self {
            Indicator::Ds => "ds",
            Indicator::Qos => "qos",
            Indicator::Ts => "ts",
        }
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Deserialize)]
struct RawIndicators {
    ds: f64,
    qos: f64,
    ts: f64,
}

/// DS, QoS and TS rates, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawIndicators")]
pub struct IndicatorSet {
    ds: f64,
    qos: f64,
    ts: f64,
}

impl IndicatorSet {
    pub fn new(ds: f64, qos: f64, ts: f64) -> Result<Self, ModelError> {
        for (indicator, value) in Indicator::ALL.into_iter().zip([ds, qos, ts]) {
            check_rate(indicator, value)?;
        }
        Ok(Self { ds, qos, ts })
    }

    /// All three rates at 1.
    pub fn perfect() -> Self {
        Self {
            ds: 1.0,
            qos: 1.0,
            ts: 1.0,
        }
    }

    pub fn ds(&self) -> f64 {
        self.ds
    }

    pub fn qos(&self) -> f64 {
        self.qos
    }

    pub fn ts(&self) -> f64 {
        self.ts
    }

    pub fn get(&self, indicator: Indicator) -> f64 {
        match indicator {
            Indicator::Ds => self.ds,
            Indicator::Qos => self.qos,
            Indicator::Ts => self.ts,
        }
    }

    pub fn with(mut self, indicator: Indicator, value: f64) -> Result<Self, ModelError> {
        check_rate(indicator, value)?;
        match indicator {
            Indicator::Ds => self.ds = value,
            Indicator::Qos => self.qos = value,
            Indicator::Ts => self.ts = value,
        }
        Ok(self)
    }
}

fn check_rate(indicator: Indicator, value: f64) -> Result<(), ModelError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ModelError::IndicatorRange { indicator, value })
    }
}

impl TryFrom<RawIndicators> for IndicatorSet {
    type Error = ModelError;

    fn try_from(raw: RawIndicators) -> Result<Self, Self::Error> {
        Self::new(raw.ds, raw.qos, raw.ts)
    }
}

#[derive(Deserialize)]
struct RawWeights {
    w1: f64,
    w2: f64,
    w3: f64,
}

/// Weights of potentiality, compatibility and performance in the ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights")]
pub struct WeightVector {
    w1: f64,
    w2: f64,
    w3: f64,
}

impl WeightVector {
    pub fn new(w1: f64, w2: f64, w3: f64) -> Result<Self, ModelError> {
        let ws = [w1, w2, w3];
        if ws.iter().any(|w| !w.is_finite() || *w < 0.0) || ws.iter().sum::<f64>() <= 0.0 {
            return Err(ModelError::Weights { w1, w2, w3 });
        }
        Ok(Self { w1, w2, w3 })
    }

    /// `(1, 1, 1)`: the plain arithmetic mean.
    pub fn equal() -> Self {
        Self {
            w1: 1.0,
            w2: 1.0,
            w3: 1.0,
        }
    }

    pub fn potentiality(&self) -> f64 {
        self.w1
    }

    pub fn compatibility(&self) -> f64 {
        self.w2
    }

    pub fn performance(&self) -> f64 {
        self.w3
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.w1, self.w2, self.w3]
    }
}

impl Default for WeightVector {
    fn default() -> Self {
        Self::equal()
    }
}

impl TryFrom<RawWeights> for WeightVector {
    type Error = ModelError;

    fn try_from(raw: RawWeights) -> Result<Self, Self::Error> {
        Self::new(raw.w1, raw.w2, raw.w3)
    }
}

impl std::str::FromStr for WeightVector {
    type Err = ModelError;

    /// Parses `w1,w2,w3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| ModelError::WeightSyntax(s.to_owned()))?;
        match parts[..] {
            [w1, w2, w3] => Self::new(w1, w2, w3),
            _ => Err(ModelError::WeightSyntax(s.to_owned())),
        }
    }
}
