use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::{Behavior, Broadcast, ValueRule};
use crate::aggregation::mean;
use crate::error::{Error, Result};
use crate::hyperbox::Hyperbox;
use crate::instance::AgreementInstance;
use crate::vector::{diameter, Vector, TAU};

use super::step::node_step;
use super::{AgreementAlgo, AgreementOptions};

/// What one honest node saw and did in one round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeRound {
    /// Honest vectors in node order followed by the Byzantine deliveries.
    pub received: Vec<Vector>,
    /// `TH_i`, hyperbox variants only.
    pub trusted_box: Option<Hyperbox>,
    /// `GH_i` or the mean box, hyperbox variants only.
    pub median_box: Option<Hyperbox>,
    pub chosen: Vector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTrace {
    /// 1-based.
    pub round: usize,
    pub nodes: Vec<NodeRound>,
    /// Bounding box of the honest inputs to this round.
    pub honest_box: Hyperbox,
    pub honest_diameter: f64,
    /// Bounding box of the honest outputs.
    pub output_box: Hyperbox,
    pub output_diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementRun {
    pub rounds: Vec<RoundTrace>,
    pub honest_outputs: Vec<Vector>,
    /// Protocol-following values of the Byzantine nodes after the last round.
    pub byzantine_states: Vec<Vector>,
    pub initial_diameter: f64,
    pub final_diameter: f64,
    /// Whether the final honest diameter is below `eps`.
    pub converged: bool,
}

impl AgreementRun {
    pub fn rounds_used(&self) -> usize {
        self.rounds.len()
    }

    /// Honest diameter after each round, preceded by the initial one.
    pub fn diameters(&self) -> Vec<f64> {
        std::iter::once(self.initial_diameter)
            .chain(self.rounds.iter().map(|r| r.output_diameter))
            .collect()
    }

    /// `E_max` of the honest bounding box before the first round and after
    /// every round.
    pub fn e_max_series(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.rounds.iter().map(|r| r.honest_box.e_max()).collect();
        if let Some(last) = self.rounds.last() {
            out.push(last.output_box.e_max());
        }
        out
    }
}

fn collect_broadcasts(
    instance: &AgreementInstance,
    round: usize,
    honest: &[Vector],
    shadows: &[Vector],
) -> Result<Vec<Option<Broadcast>>> {
    let broadcasts: Vec<Option<Broadcast>> = shadows
        .iter()
        .enumerate()
        .map(|(k, own)| instance.adversary.broadcast(k, round, own, honest))
        .collect();
    for b in broadcasts.iter().flatten() {
        b.value.ensure_dim(instance.params.d)?;
        b.value.ensure_finite()?;
    }
    Ok(broadcasts)
}

/// Byzantine nodes whose broadcast reaches honest node `i`.
fn delivery_mask(broadcasts: &[Option<Broadcast>], h: usize, i: usize) -> Vec<usize> {
    broadcasts
        .iter()
        .enumerate()
        .filter(|(_, b)| b.as_ref().is_some_and(|b| b.recipients.reaches(h, i)))
        .map(|(k, _)| k)
        .collect()
}

fn received_for(honest: &[Vector], broadcasts: &[Option<Broadcast>], mask: &[usize]) -> Vec<Vector> {
    let mut r = honest.to_vec();
    r.extend(mask.iter().map(|&k| broadcasts[k].as_ref().expect("masked").value.clone()));
    r
}

/// What every honest node receives in the first round.
pub fn first_round_received(instance: &AgreementInstance) -> Result<Vec<Vec<Vector>>> {
    instance.validate()?;
    let h = instance.params.honest();
    let broadcasts = collect_broadcasts(instance, 1, &instance.honest_inputs, &instance.byzantine_inputs)?;
    Ok((0..h)
        .map(|i| received_for(&instance.honest_inputs, &broadcasts, &delivery_mask(&broadcasts, h, i)))
        .collect())
}

pub fn run_agreement(instance: &AgreementInstance, algo: AgreementAlgo, rounds: usize, eps: f64) -> Result<AgreementRun> {
    run_agreement_with(instance, algo, rounds, eps, &AgreementOptions::default())
}

fn uses_own_value(behavior: &Behavior) -> bool {
    match behavior {
        Behavior::Crash { .. } | Behavior::SignFlip => true,
        Behavior::SelectiveOmission { value, .. } => !matches!(value, ValueRule::Fixed(_)),
        Behavior::FixedVector(_) | Behavior::MdOscillation | Behavior::Scripted(_) => false,
    }
}

/// Simulates up to `rounds` synchronous rounds, stopping early once the honest
/// diameter drops below `eps`.
///
/// Honest node `i` receives every honest vector plus each Byzantine broadcast
/// whose recipient rule reaches `i`. Byzantine nodes keep a protocol-following
/// value that they update with the same rule applied to all honest vectors and
/// their own value.
pub fn run_agreement_with(
    instance: &AgreementInstance,
    algo: AgreementAlgo,
    rounds: usize,
    eps: f64,
    opts: &AgreementOptions,
) -> Result<AgreementRun> {
    instance.validate()?;
    opts.weiszfeld.validate()?;
    if rounds == 0 {
        return Err(Error::InvalidParams("rounds must be at least 1".into()));
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidParams(format!("eps must be non-negative, got {eps}")));
    }
    let params = &instance.params;
    let adversary = &instance.adversary;
    let h = params.honest();
    let track_shadows = uses_own_value(&adversary.behavior);

    let mut honest = instance.honest_inputs.clone();
    let mut shadows = instance.byzantine_inputs.clone();
    let initial_diameter = diameter(&honest)?;
    let mut traces = Vec::with_capacity(rounds);

    for round in 1..=rounds {
        let honest_box = Hyperbox::bounding(&honest)?;
        let honest_diameter = diameter(&honest)?;
        let broadcasts = collect_broadcasts(instance, round, &honest, &shadows)?;
        let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for i in 0..h {
            groups.entry(delivery_mask(&broadcasts, h, i)).or_default().push(i);
        }
        let target = mean(&honest)?;
        let groups: Vec<(Vec<usize>, Vec<usize>)> = groups.into_iter().collect();
        let results = groups
            .par_iter()
            .map(|(mask, _)| node_step(algo, &received_for(&honest, &broadcasts, mask), params, opts, Some(&target)))
            .collect::<Result<Vec<_>>>()?;

        let mut nodes: Vec<Option<NodeRound>> = vec![None; h];
        for ((_, members), result) in groups.iter().zip(results) {
            for &i in members {
                nodes[i] = Some(result.clone());
            }
        }
        let nodes: Vec<NodeRound> = nodes.into_iter().map(|n| n.expect("every node grouped")).collect();

        if algo.is_hyperbox() {
            let slack = TAU * (1.0 + honest_box.e_max());
            for (i, node) in nodes.iter().enumerate() {
                assert!(
                    honest_box.contains_within(&node.chosen, slack),
                    "round {round}: honest node {i} left the honest bounding box"
                );
            }
        }

        if track_shadows {
            shadows = shadows
                .par_iter()
                .map(|own| {
                    let mut r = honest.clone();
                    r.push(own.clone());
                    node_step(algo, &r, params, opts, Some(&target)).map(|n| n.chosen)
                })
                .collect::<Result<Vec<_>>>()?;
        }

        honest = nodes.iter().map(|n| n.chosen.clone()).collect();
        let output_box = Hyperbox::bounding(&honest)?;
        let output_diameter = diameter(&honest)?;
        traces.push(RoundTrace {
            round,
            nodes,
            honest_box,
            honest_diameter,
            output_box,
            output_diameter,
        });
        if output_diameter < eps {
            break;
        }
    }

    let final_diameter = traces.last().map_or(initial_diameter, |t| t.output_diameter);
    Ok(AgreementRun {
        rounds: traces,
        honest_outputs: honest,
        byzantine_states: shadows,
        initial_diameter,
        final_diameter,
        converged: final_diameter < eps,
    })
}
