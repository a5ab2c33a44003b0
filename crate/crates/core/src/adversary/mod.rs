//! Byzantine behaviours and the instance generators behind the
//! counterexamples.
//!
//! A Byzantine node contributes at most one vector per round together with
//! the set of honest recipients it reaches. Per-recipient values are not
//! representable, which is how the reliable-broadcast guarantee (no
//! equivocation) is enforced.

mod generators;

pub use generators::{
    make_krum_unbounded_instance, make_md_oscillation_instance, make_safearea_instance, random_instance,
    KrumUnboundedInstance, SafeAreaInstance,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

/// Negated gradient sent by a sign-flipping client.
pub fn sign_flip(g: &Vector) -> Vector {
    g.neg()
}

/// Whether a node crashing at `crash_round` still sends in `round` (1-based).
pub fn crash_behavior(crash_round: usize, round: usize) -> bool {
    round < crash_round
}

/// Which honest nodes receive a Byzantine broadcast.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecipientRule {
    All,
    Nobody,
    /// Honest nodes `0..h/2`.
    FirstHalf,
    /// Honest nodes `h/2..h`.
    SecondHalf,
    EvenIndexed,
    /// Explicit honest indices.
    Only(Vec<usize>),
}

impl RecipientRule {
    pub fn reaches(&self, honest: usize, recipient: usize) -> bool {
        match self {
            RecipientRule::All => true,
            RecipientRule::Nobody => false,
            RecipientRule::FirstHalf => recipient < honest / 2,
            RecipientRule::SecondHalf => recipient >= honest / 2,
            RecipientRule::EvenIndexed => recipient % 2 == 0,
            RecipientRule::Only(ids) => ids.contains(&recipient),
        }
    }
}

/// Value a selectively omitting node broadcasts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueRule {
    /// Its protocol-following value.
    Honest,
    /// The negation of its protocol-following value.
    Flipped,
    /// Its protocol-following value times a factor.
    Scaled(f64),
    Fixed(Vector),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behavior {
    /// Silent from `from_round` (1-based) onwards, protocol-following before.
    Crash { from_round: usize },
    /// Broadcasts the negation of its protocol-following value to everyone.
    SignFlip,
    FixedVector(Vector),
    SelectiveOmission { value: ValueRule, recipients: RecipientRule },
    /// Splits into two groups; each echoes the current vector of one half of
    /// the honest nodes to that half only.
    MdOscillation,
    /// Fixed per-node broadcasts, built with [`AdversarySpec::from_deliveries`].
    Scripted(Vec<Option<(Vector, RecipientRule)>>),
}

/// Behaviour shared by all `byzantine_count` Byzantine nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarySpec {
    pub behavior: Behavior,
    pub byzantine_count: usize,
}

/// One Byzantine broadcast for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct Broadcast {
    pub value: Vector,
    pub recipients: RecipientRule,
}

impl AdversarySpec {
    pub fn new(behavior: Behavior, byzantine_count: usize) -> Result<Self> {
        if let Behavior::Crash { from_round: 0 } = behavior {
            return Err(Error::InvalidParams("crash round is 1-based".into()));
        }
        if let Behavior::Scripted(msgs) = &behavior {
            if msgs.len() != byzantine_count {
                return Err(Error::InvalidParams(format!(
                    "scripted adversary lists {} nodes, byzantine_count is {byzantine_count}",
                    msgs.len()
                )));
            }
        }
        Ok(AdversarySpec {
            behavior,
            byzantine_count,
        })
    }

    /// No Byzantine nodes at all.
    pub fn none() -> Self {
        AdversarySpec {
            behavior: Behavior::Crash { from_round: 1 },
            byzantine_count: 0,
        }
    }

    /// Builds a scripted adversary from per-recipient deliveries:
    /// `deliveries[node][recipient]` is what `node` sends to honest node
    /// `recipient`. Rejects any node that would send two different vectors.
    pub fn from_deliveries(deliveries: Vec<Vec<Option<Vector>>>) -> Result<Self> {
        let count = deliveries.len();
        let mut msgs = Vec::with_capacity(count);
        for (node, row) in deliveries.into_iter().enumerate() {
            let mut value: Option<Vector> = None;
            let mut ids = Vec::new();
            for (recipient, sent) in row.into_iter().enumerate() {
                let Some(sent) = sent else { continue };
                match &value {
                    Some(v) if *v != sent => return Err(Error::Equivocation { node }),
                    Some(_) => {}
                    None => value = Some(sent),
                }
                ids.push(recipient);
            }
            msgs.push(value.map(|v| (v, RecipientRule::Only(ids))));
        }
        AdversarySpec::new(Behavior::Scripted(msgs), count)
    }

    /// One representative of every behaviour kind for sweeps: crash,
    /// sign flip, a far fixed vector, selective omission of a far outlier and
    /// the two-group oscillation.
    pub fn catalog(byzantine_count: usize, d: usize, far: f64) -> Vec<AdversarySpec> {
        let far_vec = Vector::from_finite(vec![far; d]);
        vec![
            AdversarySpec::new(Behavior::Crash { from_round: 2 }, byzantine_count),
            AdversarySpec::new(Behavior::SignFlip, byzantine_count),
            AdversarySpec::new(Behavior::FixedVector(far_vec.clone()), byzantine_count),
            AdversarySpec::new(
                Behavior::SelectiveOmission {
                    value: ValueRule::Fixed(far_vec.neg()),
                    recipients: RecipientRule::EvenIndexed,
                },
                byzantine_count,
            ),
            AdversarySpec::new(Behavior::MdOscillation, byzantine_count),
        ]
        .into_iter()
        .map(|r| r.expect("catalog entries are valid"))
        .collect()
    }

    pub fn kind_name(&self) -> &'static str {
        match self.behavior {
            Behavior::Crash { .. } => "crash",
            Behavior::SignFlip => "sign_flip",
            Behavior::FixedVector(_) => "fixed_vector",
            Behavior::SelectiveOmission { .. } => "selective_omission",
            Behavior::MdOscillation => "md_oscillation",
            Behavior::Scripted(_) => "scripted",
        }
    }

    /// Broadcast of Byzantine node `k` in `round` (1-based).
    ///
    /// `own` is the node's protocol-following value and `honest` the current
    /// honest vectors.
    pub fn broadcast(&self, k: usize, round: usize, own: &Vector, honest: &[Vector]) -> Option<Broadcast> {
        let all = |value: Vector| {
            Some(Broadcast {
                value,
                recipients: RecipientRule::All,
            })
        };
        match &self.behavior {
            Behavior::Crash { from_round } => crash_behavior(*from_round, round).then(|| own.clone()).and_then(all),
            Behavior::SignFlip => all(sign_flip(own)),
            Behavior::FixedVector(v) => all(v.clone()),
            Behavior::SelectiveOmission { value, recipients } => {
                let value = match value {
                    ValueRule::Honest => own.clone(),
                    ValueRule::Flipped => own.neg(),
                    ValueRule::Scaled(s) => own.scale(*s),
                    ValueRule::Fixed(v) => v.clone(),
                };
                Some(Broadcast {
                    value,
                    recipients: recipients.clone(),
                })
            }
            Behavior::MdOscillation => {
                let h = honest.len();
                let first_group = k < self.byzantine_count.div_ceil(2);
                let (rep, recipients) = if first_group {
                    (0, RecipientRule::FirstHalf)
                } else {
                    (h / 2, RecipientRule::SecondHalf)
                };
                honest.get(rep).map(|v| Broadcast {
                    value: v.clone(),
                    recipients,
                })
            }
            Behavior::Scripted(msgs) => msgs[k].as_ref().map(|(v, r)| Broadcast {
                value: v.clone(),
                recipients: r.clone(),
            }),
        }
    }
}
