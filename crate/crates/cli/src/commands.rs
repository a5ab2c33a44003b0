//! The four subcommands. Each returns its artifacts instead of writing them,
//! so nothing touches the disk until a command has finished.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use byzagg::adversary::{make_krum_unbounded_instance, make_md_oscillation_instance, random_instance, AdversarySpec, Behavior};
use byzagg::agreement::{run_agreement_with, AgreementAlgo, PlainRule};
use byzagg::eval::{one_round_ratios_many, EvalRule, NodeRatio};
use byzagg::geometry::ApproxRatio;
use byzagg::learning::{generate_blobs, load_csv_dataset, run_learning, Dataset, LearningConfig, LearningSetup};
use byzagg::repro::{run_reproduction, ReproReport, REPRODUCTIONS};
use byzagg::{AgreementInstance, SystemParams};

use crate::config::{AgreePlan, ConfigError, DataSection, EvalPlan, InstancePlan, LearnPlan};
use crate::output::{json, learning_csv, ratios_csv, round_rows, rounds_csv, Artifacts, Metadata, RatioRow};

#[derive(Debug)]
pub enum CmdError {
    /// Exit code 2.
    Config(ConfigError),
    /// Exit code 1.
    Runtime(String),
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Config(e) => write!(f, "configuration error:\n{e}"),
            CmdError::Runtime(e) => write!(f, "error: {e}"),
        }
    }
}

impl From<ConfigError> for CmdError {
    fn from(e: ConfigError) -> Self {
        CmdError::Config(e)
    }
}

impl From<byzagg::Error> for CmdError {
    fn from(e: byzagg::Error) -> Self {
        CmdError::Runtime(e.to_string())
    }
}

/// What a finished command produced.
#[derive(Debug, Default)]
pub struct Report {
    pub artifacts: Artifacts,
    /// Human-readable progress lines for standard output.
    pub lines: Vec<String>,
    /// `false` maps to exit code 1.
    pub passed: bool,
}

pub fn build_instance(plan: &InstancePlan, seed: u64) -> byzagg::Result<AgreementInstance> {
    match plan {
        InstancePlan::Random { params, adversary } => random_instance(*params, adversary.clone(), seed),
        InstancePlan::Explicit {
            params,
            honest,
            byzantine,
            adversary,
        } => {
            let inst = AgreementInstance::new(*params, honest.clone(), adversary.clone(), seed)?;
            match byzantine {
                Some(b) => inst.with_byzantine_inputs(b.clone()),
                None => Ok(inst),
            }
        }
        InstancePlan::MdOscillation { params, v1, v2 } => make_md_oscillation_instance(*params, v1.clone(), v2.clone()),
        InstancePlan::KrumUnbounded { params } => {
            let k = make_krum_unbounded_instance(*params, seed)?;
            let silent = AdversarySpec::new(Behavior::Crash { from_round: 1 }, params.f)?;
            AgreementInstance::new(*params, k.received, silent, k.seed)
        }
    }
}

pub fn algo_name(algo: AgreementAlgo) -> String {
    EvalRule::Agreement(algo).name()
}

#[derive(Debug, Serialize)]
struct AgreeSummary {
    algo: String,
    params: SystemParams,
    seed: u64,
    eps: f64,
    converged: bool,
    initial_diameter: f64,
    final_diameter: f64,
    rounds_used: usize,
    metadata: Metadata,
}

pub fn agree(plan: &AgreePlan) -> Result<Report, CmdError> {
    let inst = build_instance(&plan.instance, plan.seed)?;
    let run = run_agreement_with(&inst, plan.algo, plan.rounds, plan.eps, &plan.options)?;
    let rows = round_rows(&inst.honest_inputs, &run);
    let summary = AgreeSummary {
        algo: algo_name(plan.algo),
        params: inst.params,
        seed: plan.seed,
        eps: plan.eps,
        converged: run.converged,
        initial_diameter: run.initial_diameter,
        final_diameter: run.final_diameter,
        rounds_used: run.rounds_used(),
        metadata: Metadata::now(),
    };
    let mut report = Report {
        passed: true,
        ..Default::default()
    };
    report.lines.push(format!(
        "{}: {} rounds, diameter {:e} -> {:e}, converged = {}",
        summary.algo, summary.rounds_used, summary.initial_diameter, summary.final_diameter, summary.converged
    ));
    report.artifacts.add("rounds.csv", rounds_csv(&rows, inst.params.d));
    report.artifacts.add("summary.json", json(&summary));
    Ok(report)
}

fn ratio_key(r: ApproxRatio) -> f64 {
    r.finite().unwrap_or(f64::INFINITY)
}

/// The node with the largest ratio; the first one on ties.
pub fn worst_node(ratios: &[NodeRatio]) -> &NodeRatio {
    ratios
        .iter()
        .reduce(|a, b| if ratio_key(b.ratio) > ratio_key(a.ratio) { b } else { a })
        .expect("at least one honest node")
}

/// Known worst-case ratio of a rule, if any.
pub fn ratio_bound(rule: EvalRule, d: usize) -> Option<f64> {
    match rule {
        EvalRule::Agreement(AgreementAlgo::HyperboxGeo) => Some(2.0 * (d as f64).sqrt()),
        EvalRule::Agreement(AgreementAlgo::MinDiamGeo) => Some(2.0),
        _ => None,
    }
}

/// Tolerance added to a bound before a ratio counts as a violation.
pub const BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Serialize)]
struct RuleSummary {
    max_ratio: ApproxRatio,
    unbounded_rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    within_bound: Option<bool>,
}

#[derive(Debug, Serialize)]
struct EvalSummary {
    params: SystemParams,
    seed: u64,
    instances: usize,
    rules: BTreeMap<String, RuleSummary>,
    metadata: Metadata,
}

pub fn eval_rules(algo: AgreementAlgo, krum_q: usize) -> Vec<EvalRule> {
    let mut rules = vec![EvalRule::Agreement(algo)];
    for r in [
        EvalRule::Agreement(AgreementAlgo::Plain(PlainRule::Krum)),
        EvalRule::Agreement(AgreementAlgo::Plain(PlainRule::MultiKrum(krum_q))),
        EvalRule::Medoid,
    ] {
        if !rules.contains(&r) {
            rules.push(r);
        }
    }
    rules
}

pub fn eval(plan: &EvalPlan) -> Result<Report, CmdError> {
    let rules = eval_rules(plan.algo, plan.krum_q);
    let rows: Vec<RatioRow> = (0..plan.instances)
        .into_par_iter()
        .map(|i| {
            let seed = plan.seed.wrapping_add(i as u64);
            let inst = build_instance(&plan.instance, seed)?;
            let per_rule = one_round_ratios_many(&inst, &rules, &plan.options)?;
            Ok(rules
                .iter()
                .zip(&per_rule)
                .map(|(rule, ratios)| {
                    let w = worst_node(ratios);
                    RatioRow {
                        instance: i,
                        seed,
                        rule: rule.name(),
                        ratio: w.ratio,
                        distance: w.distance,
                        r_cov: w.r_cov,
                    }
                })
                .collect::<Vec<_>>())
        })
        .collect::<byzagg::Result<Vec<Vec<_>>>>()?
        .into_iter()
        .flatten()
        .collect();

    let d = crate::config::plan_params(&plan.instance).d;
    let mut summaries = BTreeMap::new();
    let mut report = Report {
        passed: true,
        ..Default::default()
    };
    for &rule in &rules {
        let name = rule.name();
        let mine: Vec<&RatioRow> = rows.iter().filter(|r| r.rule == name).collect();
        let max = mine
            .iter()
            .map(|r| r.ratio)
            .reduce(|a, b| if ratio_key(b) > ratio_key(a) { b } else { a })
            .expect("instances >= 1");
        let bound = ratio_bound(rule, d);
        let within = bound.map(|b| max.within(b + BOUND_SLACK));
        if within == Some(false) {
            report.passed = false;
        }
        let unbounded_rows = mine.iter().filter(|r| r.ratio.is_unbounded()).count();
        report.lines.push(match bound {
            Some(b) => format!(
                "{name}: max ratio {max} (bound {b:.6}, {}), {unbounded_rows} unbounded rows",
                if within == Some(true) { "ok" } else { "VIOLATED" }
            ),
            None => format!("{name}: max ratio {max}, {unbounded_rows} unbounded rows"),
        });
        summaries.insert(
            name,
            RuleSummary {
                max_ratio: max,
                unbounded_rows,
                bound,
                within_bound: within,
            },
        );
    }
    let summary = EvalSummary {
        params: *crate::config::plan_params(&plan.instance),
        seed: plan.seed,
        instances: plan.instances,
        rules: summaries,
        metadata: Metadata::now(),
    };
    report.artifacts.add("ratios.csv", ratios_csv(&rows));
    report.artifacts.add("summary.json", json(&summary));
    Ok(report)
}

#[derive(Debug, Serialize)]
struct ReproSummary<'a> {
    #[serde(flatten)]
    report: &'a ReproReport,
    seed: u64,
    metadata: Metadata,
}

/// Runs a named reproduction. An unknown name is a configuration error.
pub fn repro(name: &str, seed: u64) -> Result<Report, CmdError> {
    if !REPRODUCTIONS.contains(&name) {
        return Err(CmdError::Config(ConfigError {
            problems: vec![(
                "name".into(),
                format!("unknown reproduction {name:?}; available: {}", REPRODUCTIONS.join(", ")),
            )],
        }));
    }
    let r = run_reproduction(name, seed)?;
    let mut report = Report {
        passed: r.passed,
        ..Default::default()
    };
    for c in &r.checks {
        report
            .lines
            .push(format!("[{}] {}", if c.passed { "pass" } else { "FAIL" }, c.detail));
    }
    report
        .lines
        .push(format!("{name}: {}", if r.passed { "PASS" } else { "FAIL" }));
    let summary = ReproSummary {
        report: &r,
        seed,
        metadata: Metadata::now(),
    };
    report.artifacts.add("summary.json", json(&summary));
    Ok(report)
}

pub fn load_dataset(data: &DataSection, seed: u64) -> byzagg::Result<Dataset> {
    match data {
        DataSection::Blobs { classes, per_class, spread } => generate_blobs(*classes, *per_class, *spread, seed),
        DataSection::Csv { path, max_value } => load_csv_dataset(path, *max_value),
    }
}

/// The learning configuration of one rule, optionally without Byzantine clients.
pub fn learning_config(plan: &LearnPlan, rule: byzagg::learning::AggregationRule, baseline: bool) -> LearningConfig {
    LearningConfig {
        n: plan.n,
        f: if baseline { 0 } else { plan.f },
        t: plan.t,
        model: plan.model,
        rule,
        architecture: plan.architecture,
        split: plan.split,
        attack: plan.attack.clone(),
        iterations: plan.iterations,
        batch_size: plan.batch_size,
        learning_rate: plan.learning_rate,
        lr_floor: plan.lr_floor,
        weiszfeld: plan.weiszfeld,
        seed: plan.seed,
    }
}

#[derive(Debug, Serialize)]
struct RuleAccuracy {
    final_accuracy: f64,
    final_min_accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline_final_accuracy: Option<f64>,
}

#[derive(Debug, Serialize)]
struct LearnSummary {
    n: usize,
    f: usize,
    t: usize,
    seed: u64,
    iterations: usize,
    rules: BTreeMap<String, RuleAccuracy>,
    metadata: Metadata,
}

pub fn learn(plan: &LearnPlan) -> Result<Report, CmdError> {
    let data = load_dataset(&plan.data, plan.seed)?;
    let mut jobs = Vec::new();
    for &rule in &plan.rules {
        jobs.push((rule, false));
        if plan.baseline {
            jobs.push((rule, true));
        }
    }
    let traces = jobs
        .par_iter()
        .map(|&(rule, baseline)| {
            let setup = LearningSetup::from_dataset(learning_config(plan, rule, baseline), &data)?;
            run_learning(&setup)
        })
        .collect::<byzagg::Result<Vec<_>>>()?;

    let single = jobs.len() == 1;
    let mut report = Report {
        passed: true,
        ..Default::default()
    };
    let mut rules: BTreeMap<String, RuleAccuracy> = BTreeMap::new();
    for (&(rule, baseline), trace) in jobs.iter().zip(&traces) {
        let name = rule.name();
        let file = match (single, baseline) {
            (true, _) => "learning.csv".to_string(),
            (false, false) => format!("learning_{name}.csv"),
            (false, true) => format!("learning_{name}_baseline.csv"),
        };
        report.artifacts.add(file, learning_csv(&trace.records));
        let acc = trace.final_accuracy().unwrap_or(0.0);
        if baseline {
            if let Some(r) = rules.get_mut(&name) {
                r.baseline_final_accuracy = Some(acc);
            }
            report.lines.push(format!("{name} (f = 0): final accuracy {acc:.4}"));
        } else {
            let min = trace.final_min_accuracy().unwrap_or(0.0);
            rules.insert(
                name.clone(),
                RuleAccuracy {
                    final_accuracy: acc,
                    final_min_accuracy: min,
                    baseline_final_accuracy: None,
                },
            );
            report.lines.push(format!("{name}: final accuracy {acc:.4} (min over clients {min:.4})"));
        }
    }
    let summary = LearnSummary {
        n: plan.n,
        f: plan.f,
        t: plan.t,
        seed: plan.seed,
        iterations: plan.iterations,
        rules,
        metadata: Metadata::now(),
    };
    report.artifacts.add("summary.json", json(&summary));
    Ok(report)
}
