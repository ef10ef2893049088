//! Domain vocabulary: networks, organizations, processes, interfaces,
//! ratings, compatibility matrices, indicators, weights and periods.

mod assessment;
mod ids;
mod matrix;
mod network;
mod period;
mod values;

use chrono::NaiveDate;
use thiserror::Error;

pub use assessment::{Assessment, InputsSnapshot};
pub use ids::{LinkId, NetworkId, NodeId, OrgId};
pub use matrix::{
    BarrierCategory, BarrierFacet, Cell, CompatibilityMatrix, ConcernLevel, CELL_COUNT,
};
pub use network::{
    validate_network, CollaborationNetwork, InteropLink, Organization, ProcessKind, ProcessNode,
    ValidationReport, Violation,
};
pub use period::{period_sequence, Granularity, Period, PeriodLabel};
pub use values::{Indicator, IndicatorSet, MaturityLevel, MaturityRating, WeightVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("maturity level {0} outside 1..=5")]
    MaturityLevel(u8),
    #[error("indicator {indicator} = {value} outside [0, 1]")]
    IndicatorRange { indicator: Indicator, value: f64 },
    #[error("weights ({w1}, {w2}, {w3}) must be finite, non-negative and not all zero")]
    Weights { w1: f64, w2: f64, w3: f64 },
    #[error("weights {0:?} must be written w1,w2,w3")]
    WeightSyntax(String),
    #[error("compatibility matrix must be 4 rows of 6 cells (got {rows} rows of {columns:?})")]
    MatrixShape { rows: usize, columns: Vec<usize> },
    #[error("compatibility cell {cell} must be 0 or 1, got {value}")]
    MatrixCell { cell: Cell, value: u8 },
    #[error("period label {0:?} is not YYYY-Qn or YYYY-Mmm")]
    PeriodLabel(String),
    #[error("period {label} does not span {start_date}..={end_date}")]
    PeriodDates {
        label: String,
        start_date: NaiveDate,
        end_date: NaiveDate,
    },
    #[error("duplicate period {label} at positions {first} and {second}")]
    DuplicatePeriod {
        label: String,
        first: usize,
        second: usize,
    },
}
