//! The 4×6 interoperation compatibility matrix.
//!
//! Rows are levels of interoperability concern, columns are the six barrier
//! facets grouped under conceptual, organisational and technological
//! barriers. A cell holds 0 when the criteria of that area are satisfied and
//! 1 when incompatibilities are met. Graded values are rejected.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Number of elementary compatibility cells (4 levels × 6 facets).
pub const CELL_COUNT: usize = ConcernLevel::ALL.len() * BarrierFacet::ALL.len();

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcernLevel {
    Business,
    Process,
    Service,
    Data,
}

impl ConcernLevel {
    pub const ALL: [ConcernLevel; 4] = [
        ConcernLevel::Business,
        ConcernLevel::Process,
        ConcernLevel::Service,
        ConcernLevel::Data,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConcernLevel::Business => "business",
            ConcernLevel::Process => "process",
            ConcernLevel::Service => "service",
            ConcernLevel::Data => "data",
        }
    }
}

/// Barrier family a facet belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierCategory {
    Conceptual,
    Organisational,
    Technology,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierFacet {
    Syntactic,
    Semantic,
    AuthoritiesResponsibilities,
    Organisation,
    Platform,
    Communication,
}

impl BarrierFacet {
    pub const ALL: [BarrierFacet; 6] = [
        BarrierFacet::Syntactic,
        BarrierFacet::Semantic,
        BarrierFacet::AuthoritiesResponsibilities,
        BarrierFacet::Organisation,
        BarrierFacet::Platform,
        BarrierFacet::Communication,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn category(self) -> BarrierCategory {
        match self {
            BarrierFacet::Syntactic | BarrierFacet::Semantic => BarrierCategory::Conceptual,
            BarrierFacet::AuthoritiesResponsibilities | BarrierFacet::Organisation => {
                BarrierCategory::Organisational
            }
            BarrierFacet::Platform | BarrierFacet::Communication => BarrierCategory::Technology,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BarrierFacet::Syntactic => "syntactic",
            BarrierFacet::Semantic => "semantic",
            BarrierFacet::AuthoritiesResponsibilities => "authorities_responsibilities",
            BarrierFacet::Organisation => "organisation",
            BarrierFacet::Platform => "platform",
            BarrierFacet::Communication => "communication",
        }
    }
}

/// Address of one cell, `dc_ij` with `i` the concern level and `j` the facet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub level: ConcernLevel,
    pub facet: BarrierFacet,
}

impl Cell {
    pub fn new(level: ConcernLevel, facet: BarrierFacet) -> Self {
        Self { level, facet }
    }

    /// Row-major position in `0..24`.
    pub fn index(self) -> usize {
        self.level.index() * BarrierFacet::ALL.len() + self.facet.index()
    }

    pub fn from_index(index: usize) -> Option<Self> {
        if index >= CELL_COUNT {
            return None;
        }
        let cols = BarrierFacet::ALL.len();
        Some(Self {
            level: ConcernLevel::ALL[index / cols],
            facet: BarrierFacet::ALL[index % cols],
        })
    }

    /// All 24 cells in row-major order.
    pub fn all() -> impl Iterator<Item = Cell> {
        (0..CELL_COUNT).filter_map(Cell::from_index)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.level.as_str(), self.facet.as_str())
    }
}

/// Binary matrix of elementary incompatibilities.
///
/// Serialized as four rows (business, process, service, data) of six `0`/`1`
/// integers in facet order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u8>>", into = "Vec<Vec<u8>>")]
pub struct CompatibilityMatrix {
    rows: [[bool; 6]; 4],
}

impl CompatibilityMatrix {
    /// No incompatibility anywhere.
    pub fn compatible() -> Self {
        Self::default()
    }

    /// Every cell marked incompatible.
    pub fn incompatible() -> Self {
        Self {
            rows: [[true; 6]; 4],
        }
    }

    /// Builds a matrix from a 24-bit mask, bit `k` being cell `Cell::from_index(k)`.
    pub fn from_bits(bits: u32) -> Self {
        let mut m = Self::default();
        for cell in Cell::all() {
            m.set(cell, bits & (1 << cell.index()) != 0);
        }
        m
    }

    pub fn bits(&self) -> u32 {
        Cell::all()
            .filter(|c| self.get(*c))
            .fold(0, |acc, c| acc | (1 << c.index()))
    }

    pub fn with_open(cells: impl IntoIterator<Item = Cell>) -> Self {
        let mut m = Self::default();
        for c in cells {
            m.set(c, true);
        }
        m
    }

    pub fn get(&self, cell: Cell) -> bool {
        self.rows[cell.level.index()][cell.facet.index()]
    }

    pub fn set(&mut self, cell: Cell, incompatible: bool) {
        self.rows[cell.level.index()][cell.facet.index()] = incompatible;
    }

    /// Marks `cell` as resolved (0).
    pub fn resolve(&mut self, cell: Cell) {
        self.set(cell, false);
    }

    /// Number of cells set to 1.
    pub fn incompatibility_count(&self) -> usize {
        self.rows.iter().flatten().filter(|v| **v).count()
    }

    /// Cells currently set to 1, row-major.
    pub fn open_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        Cell::all().filter(move |c| self.get(*c))
    }
}

impl TryFrom<Vec<Vec<u8>>> for CompatibilityMatrix {
    type Error = ModelError;

    fn try_from(rows: Vec<Vec<u8>>) -> Result<Self, Self::Error> {
        if rows.len() != ConcernLevel::ALL.len()
            || rows.iter().any(|r| r.len() != BarrierFacet::ALL.len())
        {
            return Err(ModelError::MatrixShape {
                rows: rows.len(),
                columns: rows.iter().map(Vec::len).collect(),
            });
        }
        let mut m = Self::default();
        for (level, row) in ConcernLevel::ALL.into_iter().zip(&rows) {
            for (facet, &value) in BarrierFacet::ALL.into_iter().zip(row) {
                let cell = Cell::new(level, facet);
                match value {
                    0 => {}
                    1 => m.set(cell, true),
                    other => return Err(ModelError::MatrixCell { cell, value: other }),
                }
            }
        }
        Ok(m)
    }
}

impl From<CompatibilityMatrix> for Vec<Vec<u8>> {
    fn from(m: CompatibilityMatrix) -> Self {
        m.rows
            .iter()
            .map(|row| row.iter().map(|&v| u8::from(v)).collect())
            .collect()
    }
}
