//! Named reproductions of the known worst-case constructions and bounds.
//!
//! Each reproduction builds its instances, runs them and reports whether the
//! expected outcome was observed, with one line of evidence per check.

use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::{make_krum_unbounded_instance, make_md_oscillation_instance, make_safearea_instance, random_instance, AdversarySpec};
use crate::agreement::{run_agreement, run_agreement_with, AgreementAlgo, AgreementOptions, TieBreak};
use crate::error::{Error, Result};
use crate::eval::{max_ratio, one_round_ratios, EvalRule};
use crate::geometry::ApproxRatio;
use crate::params::SystemParams;
use crate::vector::Vector;

pub const REPRODUCTIONS: [&str; 5] = [
    "md-oscillation",
    "krum-unbounded",
    "safearea-unbounded",
    "hyperbox-contraction",
    "md-one-round-2approx",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproReport {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub passed: bool,
    pub detail: String,
}

impl ReproReport {
    fn new(name: &str, checks: Vec<Check>) -> Self {
        ReproReport {
            name: name.to_string(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

fn check(passed: bool, detail: String) -> Check {
    Check { passed, detail }
}

/// Runs the reproduction called `name`; `seed` offsets every random draw.
pub fn run_reproduction(name: &str, seed: u64) -> Result<ReproReport> {
    let checks = match name {
        "md-oscillation" => md_oscillation()?,
        "krum-unbounded" => krum_unbounded(seed)?,
        "safearea-unbounded" => safearea()?,
        "hyperbox-contraction" => hyperbox_contraction(seed)?,
        "md-one-round-2approx" => md_one_round(seed)?,
        _ => {
            return Err(Error::InvalidParams(format!(
                "unknown reproduction {name:?}; available: {}",
                REPRODUCTIONS.join(", ")
            )))
        }
    };
    Ok(ReproReport::new(name, checks))
}

fn scalar(x: f64) -> Vector {
    Vector::new(vec![x]).expect("finite")
}

fn md_oscillation() -> Result<Vec<Check>> {
    let p = SystemParams::new(8, 2, 2, 1)?;
    let inst = make_md_oscillation_instance(p, scalar(0.0), scalar(1.0))?;
    let hook = AgreementOptions {
        tie_break: TieBreak::Adversarial,
        ..Default::default()
    };
    let md = run_agreement_with(&inst, AgreementAlgo::MinDiamGeo, 10, 0.0, &hook)?;
    let stuck = md.diameters().iter().all(|&d| d == 1.0);
    let hb = run_agreement(&inst, AgreementAlgo::HyperboxGeo, 10, 0.0)?;
    let bound = 1.0 / 2f64.powi(9);
    Ok(vec![
        check(
            stuck,
            format!("min-diameter geo diameters over 10 rounds: {:?}", md.diameters()),
        ),
        check(
            hb.final_diameter <= bound,
            format!("hyperbox geo final diameter {:e} <= {bound:e}", hb.final_diameter),
        ),
    ])
}

fn krum_unbounded(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (n, t, d) in [(4, 1, 2), (10, 3, 3), (7, 2, 5)] {
        let p = SystemParams::new(n, t, 0, d)?;
        let inst = make_krum_unbounded_instance(p, seed)?;
        let gap = inst.krum_output.dist(&inst.geo_median);
        let mgap = inst.multi_krum_output.dist(&inst.geo_median);
        out.push(check(
            inst.ball.radius < 1e-9 && gap > 1e-3 && inst.krum_ratio.is_unbounded(),
            format!(
                "n={n} t={t} d={d}: r_cov {:e}, |krum - median| {gap:.6}, ratio {}",
                inst.ball.radius, inst.krum_ratio
            ),
        ));
        out.push(check(
            mgap > 1e-3 && inst.multi_krum_ratio.is_unbounded(),
            format!("n={n} t={t} d={d}: |multi-krum - median| {mgap:.6}, ratio {}", inst.multi_krum_ratio),
        ));
    }
    Ok(out)
}

fn safearea() -> Result<Vec<Check>> {
    let r3 = make_safearea_instance(SystemParams::new(5, 1, 1, 3)?, 10.0, 0.0)?;
    let r4 = make_safearea_instance(SystemParams::new(6, 1, 1, 4)?, 10.0, 0.0)?;
    Ok(vec![
        check(
            r3.ratio.finite().is_some_and(|r| (r - 4.0).abs() <= 1e-6),
            format!("d=3 f=1: ratio {}", r3.ratio),
        ),
        check(r4.ratio.is_unbounded(), format!("d=4 f=1: ratio {}", r4.ratio)),
    ])
}

/// Largest violation of `E_max(TH^{r+1}) <= E_max(TH^r)/2` over a run.
pub fn contraction_excess(e_max: &[f64]) -> f64 {
    e_max
        .windows(2)
        .map(|w| w[1] - w[0] / 2.0)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn hyperbox_contraction(seed: u64) -> Result<Vec<Check>> {
    let p = SystemParams::new(10, 2, 2, 2)?;
    let mut out = Vec::new();
    for adv in AdversarySpec::catalog(p.f, p.d, 10.0) {
        let worst = (0..20u64)
            .into_par_iter()
            .map(|i| {
                let inst = random_instance(p, adv.clone(), seed.wrapping_add(i))?;
                let run = run_agreement(&inst, AgreementAlgo::HyperboxGeo, 8, 0.0)?;
                Ok(contraction_excess(&run.e_max_series()))
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(check(
            worst <= 1e-9,
            format!("{}: max E_max excess over halving {worst:e}", adv.kind_name()),
        ));
    }
    Ok(out)
}

fn md_one_round(seed: u64) -> Result<Vec<Check>> {
    let opts = AgreementOptions::default();
    let mut out = Vec::new();
    for (n, t, d) in [(7, 2, 2), (10, 3, 3), (12, 3, 5)] {
        let p = SystemParams::new(n, t, t, d)?;
        let ratios = AdversarySpec::catalog(t, d, 5.0)
            .into_par_iter()
            .flat_map_iter(|adv| (0..10u64).map(move |i| (adv.clone(), i)))
            .map(|(adv, i)| {
                let inst = random_instance(p, adv, seed.wrapping_add(i))?;
                let r = one_round_ratios(&inst, EvalRule::Agreement(AgreementAlgo::MinDiamGeo), &opts)?;
                Ok(max_ratio(r.into_iter().map(|x| x.ratio)).expect("honest nodes"))
            })
            .collect::<Result<Vec<ApproxRatio>>>()?;
        let worst = max_ratio(ratios).expect("nonempty");
        out.push(check(worst.within(2.0 + 1e-6), format!("n={n} t={t} d={d}: max ratio {worst}")));
    }
    Ok(out)
}
