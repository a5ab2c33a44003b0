use crate::aggregation::{
    coordinate_trim, geometric_median, krum_with, mean, mean_hyperbox, mean_of,
    min_diameter_subset, min_diameter_subsets, multi_krum_with, pick, WeiszfeldConfig,
};
use crate::error::Result;
use crate::geometry::geo_hyperbox;
use crate::hyperbox::Hyperbox;
use crate::params::SystemParams;
use crate::vector::{common_dim, Vector, TAU};

use super::{AgreementAlgo, AgreementOptions, NodeRound, PlainRule, TieBreak};

/// Aggregate applied to the chosen minimum-diameter subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdAggregate {
    GeoMedian,
    Mean,
}

fn aggregate(vs: &[Vector], idx: &[usize], how: MdAggregate, cfg: &WeiszfeldConfig) -> Result<Vector> {
    match how {
        MdAggregate::GeoMedian => geometric_median(&pick(vs, idx), cfg),
        MdAggregate::Mean => Ok(mean_of(vs, idx)),
    }
}

/// One minimum-diameter step with lexicographic tie-breaking.
pub fn md_round(received: &[Vector], params: &SystemParams, cfg: &WeiszfeldConfig, how: MdAggregate) -> Result<Vector> {
    let opts = AgreementOptions {
        weiszfeld: *cfg,
        ..Default::default()
    };
    md_round_with(received, params, &opts, how, None)
}

/// Minimum-diameter step. With [`TieBreak::Adversarial`] and a `target`,
/// picks among all subsets within `TAU` of the minimal diameter the one
/// whose aggregate is farthest from `target`.
pub fn md_round_with(
    received: &[Vector],
    params: &SystemParams,
    opts: &AgreementOptions,
    how: MdAggregate,
    target: Option<&Vector>,
) -> Result<Vector> {
    let q = params.quorum();
    let cfg = &opts.weiszfeld;
    match (opts.tie_break, target) {
        (TieBreak::Adversarial, Some(target)) => {
            let (_, candidates) = min_diameter_subsets(received, q, TAU)?;
            let mut best: Option<(f64, Vector)> = None;
            for idx in &candidates {
                let out = aggregate(received, idx, how, cfg)?;
                let dist = out.dist(target);
                if best.as_ref().is_none_or(|(d, _)| dist > *d + TAU) {
                    best = Some((dist, out));
                }
            }
            Ok(best.expect("at least one candidate").1)
        }
        _ => {
            let idx = min_diameter_subset(received, q)?;
            aggregate(received, &idx, how, cfg)
        }
    }
}

/// Midpoint of `trusted ∩ other`, tolerating the rounding-level gaps that the
/// approximate medians can open. Stays inside `trusted` in every coordinate.
fn midpoint_of_intersection(trusted: &Hyperbox, other: &Hyperbox, scale: f64) -> Vector {
    let slack = 1e-6 * (1.0 + scale);
    let coords = trusted
        .intervals()
        .iter()
        .zip(other.intervals())
        .map(|(th, gh)| match th.intersect(gh) {
            Some(iv) => iv.mid(),
            None => {
                let gap = (gh.lo - th.hi).max(th.lo - gh.hi);
                assert!(
                    gap <= slack,
                    "trusted box and median box are disjoint (gap {gap:e}); this is a bug"
                );
                if gh.lo > th.hi {
                    th.hi
                } else {
                    th.lo
                }
            }
        })
        .collect();
    Vector::from_finite(coords)
}

fn hyperbox_step(
    received: &[Vector],
    params: &SystemParams,
    cfg: &WeiszfeldConfig,
    geo: bool,
) -> Result<(Hyperbox, Hyperbox, Vector)> {
    let th = coordinate_trim(received, params)?;
    let gh = if geo {
        geo_hyperbox(received, params, cfg)?
    } else {
        mean_hyperbox(received, params)?
    };
    let scale = Hyperbox::bounding(received)?.e_max();
    let out = midpoint_of_intersection(&th, &gh, scale);
    Ok((th, gh, out))
}

/// One hyperbox step with the geometric median hyperbox.
pub fn hyperbox_round(received: &[Vector], params: &SystemParams, cfg: &WeiszfeldConfig) -> Result<Vector> {
    hyperbox_step(received, params, cfg, true).map(|(_, _, v)| v)
}

/// Applies `algo` to one node's received multiset.
pub fn node_step(
    algo: AgreementAlgo,
    received: &[Vector],
    params: &SystemParams,
    opts: &AgreementOptions,
    target: Option<&Vector>,
) -> Result<NodeRound> {
    common_dim(received)?;
    let cfg = &opts.weiszfeld;
    let (trusted_box, median_box, chosen) = match algo {
        AgreementAlgo::HyperboxGeo | AgreementAlgo::HyperboxMean => {
            let (th, gh, v) = hyperbox_step(received, params, cfg, algo == AgreementAlgo::HyperboxGeo)?;
            (Some(th), Some(gh), v)
        }
        AgreementAlgo::MinDiamGeo => (None, None, md_round_with(received, params, opts, MdAggregate::GeoMedian, target)?),
        AgreementAlgo::MinDiamMean => (None, None, md_round_with(received, params, opts, MdAggregate::Mean, target)?),
        AgreementAlgo::Plain(rule) => {
            let v = match rule {
                PlainRule::Mean => mean(received)?,
                PlainRule::GeoMedian => geometric_median(received, cfg)?,
                PlainRule::Krum => krum_with(received, params, opts.krum_distance)?,
                PlainRule::MultiKrum(q) => multi_krum_with(received, params, q, opts.krum_distance)?,
            };
            (None, None, v)
        }
    };
    Ok(NodeRound {
        received: received.to_vec(),
        trusted_box,
        median_box,
        chosen,
    })
}
