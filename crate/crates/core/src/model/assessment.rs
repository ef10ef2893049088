use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    CollaborationNetwork, CompatibilityMatrix, IndicatorSet, LinkId, MaturityRating, NetworkId,
    OrgId, Period, WeightVector,
};
use crate::scoring::{aggregate_ratlop, ScoreBundle};

/// The ratings, matrices and indicators an assessment was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputsSnapshot {
    pub ratings: BTreeMap<OrgId, MaturityRating>,
    pub matrices: BTreeMap<LinkId, CompatibilityMatrix>,
    pub indicators: IndicatorSet,
}

impl InputsSnapshot {
    pub fn capture(net: &CollaborationNetwork, indicators: IndicatorSet) -> Self {
        Self {
            ratings: net
                .organizations
                .iter()
                .filter_map(|o| o.maturity.clone().map(|m| (o.id.clone(), m)))
                .collect(),
            matrices: net
                .links
                .iter()
                .map(|l| (l.id.clone(), l.compatibility))
                .collect(),
            indicators,
        }
    }

    /// Overlays the captured ratings and matrices onto `net`. Organizations
    /// and links absent from the snapshot are left untouched.
    pub fn apply_to(&self, net: &CollaborationNetwork) -> CollaborationNetwork {
        let mut out = net.clone();
        for org in &mut out.organizations {
            if let Some(r) = self.ratings.get(&org.id) {
                org.maturity = Some(r.clone());
            }
        }
        for link in &mut out.links {
            if let Some(m) = self.matrices.get(&link.id) {
                link.compatibility = *m;
            }
        }
        out
    }
}

/// One stored, period-stamped score bundle.
///
/// `version` starts at 1 and increases with each overwrite of the same
/// `(network, period)`; earlier versions are kept by the store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub network_id: NetworkId,
    pub period: Period,
    pub version: u32,
    pub scores: ScoreBundle,
    pub inputs: InputsSnapshot,
}

impl Assessment {
    pub fn pi(&self) -> f64 {
        self.scores.pi
    }

    pub fn dc(&self) -> f64 {
        self.scores.dc
    }

    pub fn po(&self) -> f64 {
        self.scores.po
    }

    pub fn ratlop(&self) -> f64 {
        self.scores.ratlop
    }

    pub fn weights(&self) -> WeightVector {
        self.scores.weights
    }

    /// True when the stored ratio matches the aggregation of its components
    /// to within 1e-9.
    pub fn is_consistent(&self) -> bool {
        let s = &self.scores;
        aggregate_ratlop(s.pi, s.dc, s.po, &s.weights)
            .map(|r| (r - s.ratlop).abs() <= 1e-9)
            .unwrap_or(false)
    }
}
