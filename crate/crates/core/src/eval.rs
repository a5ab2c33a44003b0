//! One-round approximation-ratio measurement.

use serde::{Deserialize, Serialize};

use crate::agreement::{first_round_received, node_step, AgreementAlgo, AgreementOptions, PlainRule};
use crate::aggregation::{geometric_median, medoid};
use crate::error::Result;
use crate::geometry::{approximation_ratio, enumerate_s_geo, min_covering_ball, ApproxRatio};
use crate::instance::AgreementInstance;
use crate::vector::Vector;

/// A rule evaluated on a node's first-round multiset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalRule {
    Agreement(AgreementAlgo),
    Medoid,
}

impl EvalRule {
    pub fn name(&self) -> String {
        match self {
            EvalRule::Agreement(AgreementAlgo::HyperboxGeo) => "hyperbox_geo".into(),
            EvalRule::Agreement(AgreementAlgo::HyperboxMean) => "hyperbox_mean".into(),
            EvalRule::Agreement(AgreementAlgo::MinDiamGeo) => "min_diam_geo".into(),
            EvalRule::Agreement(AgreementAlgo::MinDiamMean) => "min_diam_mean".into(),
            EvalRule::Agreement(AgreementAlgo::Plain(PlainRule::Mean)) => "mean".into(),
            EvalRule::Agreement(AgreementAlgo::Plain(PlainRule::GeoMedian)) => "geo_median".into(),
            EvalRule::Agreement(AgreementAlgo::Plain(PlainRule::Krum)) => "krum".into(),
            EvalRule::Agreement(AgreementAlgo::Plain(PlainRule::MultiKrum(q))) => format!("multi_krum_{q}"),
            EvalRule::Medoid => "medoid".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeRatio {
    pub node: usize,
    pub output: Vector,
    /// Distance from the output to the honest geometric median.
    pub distance: f64,
    /// Covering radius of the node's subset medians.
    pub r_cov: f64,
    pub ratio: ApproxRatio,
}

/// Per honest node: the rule's first-round output measured against the
/// geometric median of the honest inputs, in units of the covering radius of
/// that node's own set of subset medians.
pub fn one_round_ratios(instance: &AgreementInstance, rule: EvalRule, opts: &AgreementOptions) -> Result<Vec<NodeRatio>> {
    Ok(one_round_ratios_many(instance, &[rule], opts)?.remove(0))
}

/// [`one_round_ratios`] for several rules, sharing each node's covering ball.
/// The result is indexed by rule, then node.
pub fn one_round_ratios_many(
    instance: &AgreementInstance,
    rules: &[EvalRule],
    opts: &AgreementOptions,
) -> Result<Vec<Vec<NodeRatio>>> {
    let received = first_round_received(instance)?;
    let true_geo = geometric_median(&instance.honest_inputs, &opts.weiszfeld)?;
    let mut out: Vec<Vec<NodeRatio>> = vec![Vec::with_capacity(received.len()); rules.len()];
    for (node, r) in received.iter().enumerate() {
        let s_geo = enumerate_s_geo(r, &instance.params, &opts.weiszfeld)?;
        let ball = min_covering_ball(&s_geo.medians)?;
        for (slot, rule) in out.iter_mut().zip(rules) {
            let output = match rule {
                EvalRule::Agreement(algo) => node_step(*algo, r, &instance.params, opts, None)?.chosen,
                EvalRule::Medoid => medoid(r)?,
            };
            slot.push(NodeRatio {
                node,
                distance: output.dist(&true_geo),
                r_cov: ball.radius,
                ratio: approximation_ratio(&output, &true_geo, &ball),
                output,
            });
        }
    }
    Ok(out)
}

/// The largest ratio, `Unbounded` dominating every finite value.
pub fn max_ratio(ratios: impl IntoIterator<Item = ApproxRatio>) -> Option<ApproxRatio> {
    ratios.into_iter().reduce(|a, b| match (a, b) {
        (ApproxRatio::Unbounded, _) | (_, ApproxRatio::Unbounded) => ApproxRatio::Unbounded,
        (ApproxRatio::Finite(x), ApproxRatio::Finite(y)) => ApproxRatio::Finite(x.max(y)),
    })
}
