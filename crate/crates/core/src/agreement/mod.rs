//! Synchronous round-based approximate agreement.
//!
//! Each round every honest node reliably broadcasts its vector, receives all
//! honest vectors plus whatever the Byzantine nodes deliver to it, and
//! replaces its vector by the output of a per-node rule.

mod engine;
mod step;

pub use engine::{first_round_received, run_agreement, run_agreement_with, AgreementRun, NodeRound, RoundTrace};
pub use step::{hyperbox_round, md_round, md_round_with, node_step, MdAggregate};

use serde::{Deserialize, Serialize};

use crate::aggregation::{KrumDistance, WeiszfeldConfig};

/// Per-node update rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgreementAlgo {
    /// Midpoint of the trusted box intersected with the median hyperbox.
    HyperboxGeo,
    /// Same with the box spanned by all subset means.
    HyperboxMean,
    /// Geometric median of a minimum-diameter `(n − t)`-subset.
    MinDiamGeo,
    /// Mean of a minimum-diameter `(n − t)`-subset.
    MinDiamMean,
    /// A single-shot rule applied to the whole received multiset.
    Plain(PlainRule),
}

impl AgreementAlgo {
    pub fn is_hyperbox(&self) -> bool {
        matches!(self, AgreementAlgo::HyperboxGeo | AgreementAlgo::HyperboxMean)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlainRule {
    Mean,
    GeoMedian,
    Krum,
    MultiKrum(usize),
}

/// How a node chooses among equal-diameter subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Lexicographically smallest index set.
    #[default]
    Lexicographic,
    /// Adversary-controlled: the candidate whose aggregate lies farthest from
    /// the honest centroid. Only the simulator can evaluate this; it exists to
    /// realize worst-case schedules.
    Adversarial,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AgreementOptions {
    pub weiszfeld: WeiszfeldConfig,
    pub tie_break: TieBreak,
    pub krum_distance: KrumDistance,
}
