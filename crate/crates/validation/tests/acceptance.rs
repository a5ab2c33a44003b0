//! Acceptance suite: one pass/fail line per criterion, exit status 1 if any
//! criterion fails. Runs with `cargo test --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use byzagg::adversary::{
    make_krum_unbounded_instance, make_md_oscillation_instance, make_safearea_instance, random_instance, AdversarySpec,
    Behavior,
};
use byzagg::aggregation::{geometric_median, WeiszfeldConfig};
use byzagg::agreement::{run_agreement, run_agreement_with, AgreementAlgo, AgreementOptions, TieBreak};
use byzagg::eval::{max_ratio, one_round_ratios, EvalRule};
use byzagg::geometry::{convex_hull_membership_2d, enumerate_s_geo, ApproxRatio};
use byzagg::learning::{
    generate_blobs, generate_blobs_in, run_learning, AggregationRule, Architecture, LearningConfig, LearningSetup,
    Model, ModelKind, SplitKind,
};
use byzagg::repro::contraction_excess;
use byzagg::{euclidean_distance, Hyperbox, SystemParams, Vector, TAU};
use byzagg_cli::Cli;
use byzagg_cli::output::{learning_csv, ratios_csv, round_rows, rounds_csv, RatioRow};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn scalar(x: f64) -> Vector {
    Vector::new(vec![x]).unwrap()
}

fn median3(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

fn c1_contraction() -> Verdict {
    let mut worst = f64::NEG_INFINITY;
    let mut instances = 0;
    for d in [1, 2, 5, 16] {
        let p = SystemParams::new(10, 2, 2, d).unwrap();
        let jobs: Vec<(AdversarySpec, u64)> = AdversarySpec::catalog(2, d, 10.0)
            .into_iter()
            .flat_map(|a| (0..20u64).map(move |s| (a.clone(), s)))
            .collect();
        instances += jobs.len();
        let w = jobs
            .par_iter()
            .map(|(adv, s)| {
                let inst = random_instance(p, adv.clone(), 1000 * d as u64 + s).unwrap();
                let run = run_agreement(&inst, AgreementAlgo::HyperboxGeo, 8, 0.0).unwrap();
                contraction_excess(&run.e_max_series())
            })
            .reduce(|| f64::NEG_INFINITY, f64::max);
        worst = worst.max(w);
    }
    verdict(
        worst <= 1e-9,
        format!("{instances} instances, 5 adversary kinds, d in {{1,2,5,16}}, 8 rounds: max E_max excess over halving {worst:e}"),
    )
}

/// `(n, t, d)` for the ratio sweeps; `f = t`.
const SWEEP: [(usize, usize, usize); 6] = [(4, 1, 1), (7, 2, 2), (9, 2, 4), (10, 3, 3), (11, 3, 2), (12, 3, 5)];

fn sweep(rule: EvalRule, bound: impl Fn(usize) -> f64 + Sync) -> (usize, usize, String) {
    let opts = AgreementOptions::default();
    let jobs: Vec<((usize, usize, usize), AdversarySpec, u64)> = SWEEP
        .iter()
        .flat_map(|&(n, t, d)| {
            AdversarySpec::catalog(t, d, 5.0)
                .into_iter()
                .flat_map(move |a| (0..4u64).map(move |s| ((n, t, d), a.clone(), s)))
        })
        .collect();
    let results: Vec<(usize, ApproxRatio, bool)> = jobs
        .par_iter()
        .map(|&((n, t, d), ref adv, s)| {
            let p = SystemParams::new(n, t, t, d).unwrap();
            let inst = random_instance(p, adv.clone(), 77 + s).unwrap();
            let r = one_round_ratios(&inst, rule, &opts).unwrap();
            let worst = max_ratio(r.into_iter().map(|x| x.ratio)).unwrap();
            (d, worst, worst.within(bound(d) + 1e-6))
        })
        .collect();
    let ok = results.iter().filter(|r| r.2).count();
    let mut worst_rel = f64::NEG_INFINITY;
    for (d, r, _) in &results {
        worst_rel = worst_rel.max(r.finite().map_or(f64::INFINITY, |x| x / bound(*d)));
    }
    (ok, results.len(), format!("largest ratio / bound {worst_rel:.6}"))
}

fn c2_hyperbox_ratio() -> Verdict {
    let (ok, total, detail) = sweep(EvalRule::Agreement(AgreementAlgo::HyperboxGeo), |d| 2.0 * (d as f64).sqrt());
    verdict(ok == total, format!("{ok}/{total} instances within 2*sqrt(d) + 1e-6; {detail}"))
}

fn c3_md_ratio() -> Verdict {
    let (ok, total, detail) = sweep(EvalRule::Agreement(AgreementAlgo::MinDiamGeo), |_| 2.0);
    verdict(ok == total, format!("{ok}/{total} instances within 2 + 1e-6; {detail}"))
}

fn c4_oscillation() -> Verdict {
    let p = SystemParams::new(8, 2, 2, 1).unwrap();
    let inst = make_md_oscillation_instance(p, scalar(0.0), scalar(1.0)).unwrap();
    let hook = AgreementOptions {
        tie_break: TieBreak::Adversarial,
        ..Default::default()
    };
    let md = run_agreement_with(&inst, AgreementAlgo::MinDiamGeo, 10, 0.0, &hook).unwrap();
    let d0 = md.initial_diameter;
    let stuck = md.rounds_used() == 10 && md.diameters().iter().all(|&d| (d - d0).abs() <= 1e-12);
    let hb = run_agreement(&inst, AgreementAlgo::HyperboxGeo, 10, 0.0).unwrap();
    let bound = d0 / 2f64.powi(9);
    verdict(
        stuck && hb.final_diameter <= bound,
        format!(
            "min-diameter geo diameters {:?}; hyperbox geo after 10 rounds {:e} (bound {bound:e})",
            md.diameters(),
            hb.final_diameter
        ),
    )
}

fn c5_krum() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, t, d) in [(4, 1, 2), (7, 2, 3), (10, 3, 5)] {
        let p = SystemParams::new(n, t, 0, d).unwrap();
        let k = make_krum_unbounded_instance(p, 0).unwrap();
        let gap = euclidean_distance(&k.krum_output, &k.geo_median).unwrap();
        let mgap = euclidean_distance(&k.multi_krum_output, &k.geo_median).unwrap();
        let this = k.received.len() == n - t
            && k.ball.radius < 1e-9
            && gap > 1e-3
            && k.krum_ratio.is_unbounded()
            && mgap > 1e-3
            && k.multi_krum_ratio.is_unbounded();
        ok &= this;
        parts.push(format!(
            "(n={n},t={t},d={d}) r_cov {:e} krum gap {gap:.4} {} multi-krum gap {mgap:.4} {}",
            k.ball.radius, k.krum_ratio, k.multi_krum_ratio
        ));
    }
    verdict(ok, parts.join("; "))
}

fn c6_safearea() -> Verdict {
    let r3 = make_safearea_instance(SystemParams::new(5, 1, 1, 3).unwrap(), 10.0, 0.0).unwrap();
    let r4 = make_safearea_instance(SystemParams::new(6, 1, 1, 4).unwrap(), 10.0, 0.0).unwrap();
    let ok3 = r3.ratio.finite().is_some_and(|r| (r - 4.0).abs() <= 1e-6);
    verdict(
        ok3 && r4.ratio.is_unbounded(),
        format!("d=3 f=1 ratio {}; d=4 f=1 ratio {}", r3.ratio, r4.ratio),
    )
}

fn hull_instance(rng: &mut ChaCha8Rng, d: usize) -> (SystemParams, Vec<Vector>, Vec<Vector>) {
    let t = rng.random_range(1..=3usize);
    let n = rng.random_range(3 * t + 1..=10usize.max(3 * t + 1));
    let p = SystemParams::new(n, t, t, d).unwrap();
    let mut draw = |scale: f64| Vector::new((0..d).map(|_| scale * rng.random_range(-1.0..1.0)).collect()).unwrap();
    let honest = (0..n - t).map(|_| draw(1.0)).collect();
    let byz = (0..t).map(|_| draw(10.0)).collect();
    (p, honest, byz)
}

fn c7_geom_in_convex() -> Verdict {
    let cfg = WeiszfeldConfig::default();
    let check = |seed: u64, d: usize, hull: bool| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, honest, byz) = hull_instance(&mut rng, d);
        let mu = geometric_median(&honest, &cfg).unwrap();
        let all: Vec<Vector> = honest.iter().chain(&byz).cloned().collect();
        let s = enumerate_s_geo(&all, &p, &cfg).unwrap();
        if hull {
            convex_hull_membership_2d(&mu, &s.medians).unwrap()
        } else {
            Hyperbox::bounding(&s.medians).unwrap().contains_within(&mu, TAU)
        }
    };
    let in_hull = (0..100u64).into_par_iter().filter(|&s| check(s, 2, true)).count();
    let in_box = (0..100u64)
        .into_par_iter()
        .filter(|&s| check(10_000 + s, 1 + (s as usize % 5), false))
        .count();
    verdict(
        in_hull == 100 && in_box == 100,
        format!("honest median in hull of subset medians {in_hull}/100 (d=2); in median box {in_box}/100 (d<=5)"),
    )
}

fn c8_gradients() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for case in 0..20u64 {
        let kind = if case % 2 == 0 {
            ModelKind::SoftmaxRegression
        } else {
            ModelKind::TwoLayerMlp { hidden: 8 }
        };
        let data = generate_blobs_in(5, 3, 6, 1.0, case).unwrap();
        let base = Model::new(kind, 5, 3, case).unwrap();
        let params: Vec<f64> = (0..base.num_params()).map(|_| rng.random_range(-0.5..0.5)).collect();
        let model = base.with_params(params.clone()).unwrap();
        let size = rng.random_range(1..=data.len());
        let batch = &data.samples[..size];
        let (_, g) = model.loss_and_gradient(batch).unwrap();
        let h = 1e-5;
        for i in 0..params.len() {
            let eval = |delta: f64| {
                let mut q = params.clone();
                q[i] += delta;
                model.with_params(q).unwrap().loss_and_gradient(batch).unwrap().0
            };
            let numeric = (eval(h) - eval(-h)) / (2.0 * h);
            if numeric.abs() > 1e-7 || g[i].abs() > 1e-7 {
                worst = worst.max((g[i] - numeric).abs() / g[i].abs().max(numeric.abs()));
            }
        }
    }
    verdict(worst < 1e-4, format!("20 (model, batch) pairs: max relative error {worst:e}"))
}

fn learning_run(rule: AggregationRule, architecture: Architecture, split: SplitKind, f: usize, t: usize, seed: u64) -> f64 {
    let config = LearningConfig {
        n: 10,
        f,
        t,
        rule,
        architecture,
        split,
        attack: Behavior::SignFlip,
        iterations: 150,
        seed,
        ..LearningConfig::default()
    };
    let data = generate_blobs(10, 200, 1.0, seed).unwrap();
    let setup = LearningSetup::from_dataset(config, &data).unwrap();
    run_learning(&setup).unwrap().final_accuracy().unwrap()
}

fn medians(
    rules: &[AggregationRule],
    architecture: Architecture,
    split: SplitKind,
    f: usize,
    t: usize,
) -> Vec<(AggregationRule, f64, Vec<f64>)> {
    rules
        .par_iter()
        .map(|&rule| {
            let accs: Vec<f64> = (0..3u64)
                .into_par_iter()
                .map(|s| learning_run(rule, architecture, split, f, t, s))
                .collect();
            (rule, median3(accs.clone()), accs)
        })
        .collect()
}

fn describe(rows: &[(AggregationRule, f64, Vec<f64>)]) -> String {
    rows.iter()
        .map(|(r, m, a)| format!("{} {m:.3} {a:.3?}", r.name()))
        .collect::<Vec<_>>()
        .join(", ")
}

fn c9_decentralized_ordering() -> Verdict {
    use AggregationRule::*;
    let rows = medians(&[BoxGeo, MdGeo, BoxMean, MdMean], Architecture::Decentralized, SplitKind::MildHeterogeneous, 1, 1);
    let base = medians(&[Mean], Architecture::Decentralized, SplitKind::MildHeterogeneous, 0, 1);
    let acc = |r: AggregationRule| rows.iter().find(|x| x.0 == r).unwrap().1;
    let baseline = base[0].1;
    let gap = (acc(BoxGeo) - acc(BoxMean))
        .min(acc(BoxGeo) - acc(MdMean))
        .min(acc(MdGeo) - acc(BoxMean))
        .min(acc(MdGeo) - acc(MdMean));
    let ratio = acc(BoxGeo) / baseline;
    verdict(
        gap >= 0.10 && ratio >= 0.75,
        format!(
            "3-seed medians: {}; f=0 baseline {baseline:.3}; smallest geo-minus-mean gap {:+.1} points (need >= 10); box_geo / baseline {ratio:.3} (need >= 0.75)",
            describe(&rows),
            100.0 * gap
        ),
    )
}

fn c10_centralized_extreme() -> Verdict {
    use AggregationRule::*;
    let rows = medians(&[BoxGeo, MdGeo, Krum], Architecture::Centralized, SplitKind::ExtremeTwoClass, 2, 2);
    let acc = |r: AggregationRule| rows.iter().find(|x| x.0 == r).unwrap().1;
    let ok = acc(BoxGeo) > acc(Krum) && acc(MdGeo) > acc(Krum) && acc(MdGeo) >= acc(BoxGeo) - 0.02;
    verdict(ok, format!("3-seed medians: {}", describe(&rows)))
}

fn agree_cli(config: &str, out: &std::path::Path) -> Vec<u8> {
    let cli = Cli::parse_from(["byzagg", "agree", "--config", config, "--out", out.to_str().unwrap(), "--quiet"]);
    assert_eq!(byzagg_cli::run(&cli), byzagg_cli::EXIT_OK);
    std::fs::read(out.join("rounds.csv")).unwrap()
}

fn c11_determinism() -> Verdict {
    let once = || {
        let p = SystemParams::new(10, 2, 2, 5).unwrap();
        let adv = AdversarySpec::catalog(2, 5, 10.0).remove(3);
        let inst = random_instance(p, adv, 3).unwrap();
        let run = run_agreement(&inst, AgreementAlgo::HyperboxGeo, 8, 0.0).unwrap();
        let rounds = rounds_csv(&round_rows(&inst.honest_inputs, &run), 5);

        let rows: Vec<RatioRow> = (0..5u64)
            .map(|s| {
                let inst = random_instance(SystemParams::new(7, 2, 2, 2).unwrap(), AdversarySpec::catalog(2, 2, 5.0).remove(1), s).unwrap();
                let r = one_round_ratios(&inst, EvalRule::Agreement(AgreementAlgo::MinDiamGeo), &AgreementOptions::default()).unwrap();
                RatioRow {
                    instance: s as usize,
                    seed: s,
                    rule: "min_diam_geo".into(),
                    ratio: max_ratio(r.iter().map(|x| x.ratio)).unwrap(),
                    distance: r[0].distance,
                    r_cov: r[0].r_cov,
                }
            })
            .collect();
        let ratios = ratios_csv(&rows);

        let config = LearningConfig {
            rule: AggregationRule::BoxGeo,
            iterations: 40,
            seed: 2,
            ..LearningConfig::default()
        };
        let data = generate_blobs(10, 200, 1.0, 2).unwrap();
        let trace = run_learning(&LearningSetup::from_dataset(config, &data).unwrap()).unwrap();
        (rounds, ratios, learning_csv(&trace.records))
    };
    let a = once();
    let b = once();
    let tmp = tempfile::tempdir().unwrap();
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/agree.toml");
    let f1 = agree_cli(cfg, &tmp.path().join("a"));
    let f2 = agree_cli(cfg, &tmp.path().join("b"));
    let same = a == b && f1 == f2;
    verdict(
        same,
        format!(
            "rounds/ratios/learning CSVs ({} bytes) and CLI rounds.csv ({} bytes) identical across reruns: {same}",
            a.0.len() + a.1.len() + a.2.len(),
            f1.len()
        ),
    )
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Verdict,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "hyperbox contraction", limit: Some(Duration::from_secs(30)), run: c1_contraction },
        Criterion { id: 2, name: "hyperbox 2*sqrt(d) approximation", limit: Some(Duration::from_secs(120)), run: c2_hyperbox_ratio },
        Criterion { id: 3, name: "min-diameter one-round 2-approximation", limit: None, run: c3_md_ratio },
        Criterion { id: 4, name: "min-diameter non-convergence", limit: None, run: c4_oscillation },
        Criterion { id: 5, name: "krum unboundedness", limit: None, run: c5_krum },
        Criterion { id: 6, name: "safe-area construction", limit: None, run: c6_safearea },
        Criterion { id: 7, name: "median in hull of subset medians", limit: None, run: c7_geom_in_convex },
        Criterion { id: 8, name: "gradient correctness", limit: None, run: c8_gradients },
        Criterion { id: 9, name: "decentralized learning ordering", limit: Some(Duration::from_secs(300)), run: c9_decentralized_ordering },
        Criterion { id: 10, name: "centralized extreme-split ordering", limit: None, run: c10_centralized_extreme },
        Criterion { id: 11, name: "determinism", limit: None, run: c11_determinism },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let v = (c.run)();
        let took = start.elapsed();
        let in_time = c.limit.map_or(true, |l| took <= l);
        let passed = v.passed && in_time;
        let limit = c.limit.map(|l| format!(", limit {} s", l.as_secs())).unwrap_or_default();
        println!(
            "criterion {:>2} {}: {} ({:.2} s{limit}) {}",
            c.id,
            if passed { "PASS" } else { "FAIL" },
            c.name,
            took.as_secs_f64(),
            v.detail
        );
        if !passed {
            failed.push(c.id);
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed.len(), criteria.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {failed:?}");
        ExitCode::FAILURE
    }
}
