//! Experiment configuration files (TOML).
//!
//! Parsing reports the key path of the first offending key; semantic checks
//! then collect every remaining problem before anything runs.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use byzagg::adversary::{AdversarySpec, Behavior, RecipientRule, ValueRule};
use byzagg::aggregation::{KrumDistance, WeiszfeldConfig};
use byzagg::agreement::{AgreementAlgo, AgreementOptions, PlainRule, TieBreak};
use byzagg::geometry::{MAX_BALL_DIM, MAX_S_GEO_INPUTS};
use byzagg::learning::{AggregationRule, Architecture, ModelKind, SplitKind};
use byzagg::{SystemParams, Vector};

/// Configuration problems, each tagged with the key it concerns.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub problems: Vec<(String, String)>,
}

impl ConfigError {
    fn one(key: impl Into<String>, msg: impl Into<String>) -> Self {
        ConfigError {
            problems: vec![(key.into(), msg.into())],
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (key, msg)) in self.problems.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{key}: {msg}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Default)]
struct Problems(Vec<(String, String)>);

impl Problems {
    fn push(&mut self, key: impl Into<String>, msg: impl Into<String>) {
        self.0.push((key.into(), msg.into()));
    }

    fn finish<T>(self, value: T) -> Result<T, ConfigError> {
        if self.0.is_empty() {
            Ok(value)
        } else {
            Err(ConfigError { problems: self.0 })
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub output: Option<OutputSection>,
    pub system: Option<SystemSection>,
    pub agreement: Option<AgreementSection>,
    pub instance: Option<InstanceSection>,
    pub adversary: Option<AdversarySection>,
    pub weiszfeld: Option<WeiszfeldConfig>,
    pub eval: Option<EvalSection>,
    pub learning: Option<LearningSection>,
    pub data: Option<DataSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub n: usize,
    pub t: usize,
    pub f: usize,
    pub d: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgreementSection {
    pub algo: String,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default)]
    pub eps: f64,
    #[serde(default)]
    pub tie_break: TieBreak,
    #[serde(default)]
    pub krum_distance: KrumDistance,
}

fn default_rounds() -> usize {
    20
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSection {
    #[serde(default)]
    pub kind: InstanceKind,
    pub honest: Option<Vec<Vec<f64>>>,
    pub byzantine: Option<Vec<Vec<f64>>>,
    pub v1: Option<Vec<f64>>,
    pub v2: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    /// Uniform draws from `[-1, 1]^d`.
    #[default]
    Random,
    Explicit,
    MdOscillation,
    /// `n − t` honest vectors reach the server, Byzantine nodes stay silent.
    KrumUnbounded,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarySection {
    pub kind: AdversaryKind,
    pub crash_round: Option<usize>,
    pub vector: Option<Vec<f64>>,
    pub value: Option<OmissionValue>,
    pub scale: Option<f64>,
    pub recipients: Option<RecipientSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    None,
    Crash,
    SignFlip,
    FixedVector,
    SelectiveOmission,
    MdOscillation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmissionValue {
    Honest,
    Flipped,
    Scaled,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum RecipientSpec {
    Named(NamedRecipients),
    Only(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedRecipients {
    All,
    Nobody,
    FirstHalf,
    SecondHalf,
    EvenIndexed,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    #[serde(default = "default_instances")]
    pub instances: usize,
    pub algo: String,
    #[serde(default = "default_krum_q")]
    pub krum_q: usize,
}

fn default_instances() -> usize {
    100
}

fn default_krum_q() -> usize {
    3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningSection {
    pub n: usize,
    pub f: usize,
    pub t: Option<usize>,
    /// One rule, or several for a comparison suite.
    pub rules: Vec<String>,
    #[serde(default)]
    pub architecture: Architecture,
    #[serde(default)]
    pub split: SplitKind,
    /// `0` selects softmax regression, otherwise a tanh network of this width.
    #[serde(default)]
    pub hidden: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default = "default_eta")]
    pub learning_rate: f64,
    #[serde(default = "default_floor")]
    pub lr_floor: f64,
    /// Also run every rule without Byzantine clients.
    #[serde(default)]
    pub baseline: bool,
}

fn default_iterations() -> usize {
    150
}
fn default_batch() -> usize {
    32
}
fn default_eta() -> f64 {
    0.5
}
fn default_floor() -> f64 {
    0.1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, tag = "source", rename_all = "snake_case")]
pub enum DataSection {
    Blobs {
        #[serde(default = "default_classes")]
        classes: usize,
        #[serde(default = "default_per_class")]
        per_class: usize,
        #[serde(default = "default_spread")]
        spread: f64,
    },
    Csv {
        path: PathBuf,
        max_value: f64,
    },
}

fn default_classes() -> usize {
    10
}
fn default_per_class() -> usize {
    200
}
fn default_spread() -> f64 {
    1.0
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection::Blobs {
            classes: default_classes(),
            per_class: default_per_class(),
            spread: default_spread(),
        }
    }
}

/// Parses a config file; unknown keys and type errors carry their key path.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::one("<file>", e.to_string().trim().to_string()))?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let key = if path == "." { "<root>".to_string() } else { path };
        ConfigError::one(key, e.into_inner().to_string().trim().to_string())
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::one("--config", format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_algo(s: &str) -> Option<AgreementAlgo> {
    Some(match s {
        "hyperbox_geo" => AgreementAlgo::HyperboxGeo,
        "hyperbox_mean" => AgreementAlgo::HyperboxMean,
        "min_diam_geo" => AgreementAlgo::MinDiamGeo,
        "min_diam_mean" => AgreementAlgo::MinDiamMean,
        "mean" => AgreementAlgo::Plain(PlainRule::Mean),
        "geo_median" => AgreementAlgo::Plain(PlainRule::GeoMedian),
        "krum" => AgreementAlgo::Plain(PlainRule::Krum),
        _ => {
            let q = s.strip_prefix("multi_krum_")?.parse().ok()?;
            AgreementAlgo::Plain(PlainRule::MultiKrum(q))
        }
    })
}

pub fn parse_rule(s: &str) -> Option<AggregationRule> {
    Some(match s {
        "mean" => AggregationRule::Mean,
        "geo_median" => AggregationRule::GeoMedian,
        "krum" => AggregationRule::Krum,
        "md_mean" => AggregationRule::MdMean,
        "md_geo" => AggregationRule::MdGeo,
        "box_mean" => AggregationRule::BoxMean,
        "box_geo" => AggregationRule::BoxGeo,
        _ => AggregationRule::MultiKrum(s.strip_prefix("multi_krum_")?.parse().ok()?),
    })
}

const ALGO_NAMES: &str = "hyperbox_geo, hyperbox_mean, min_diam_geo, min_diam_mean, mean, geo_median, krum, multi_krum_<q>";
const RULE_NAMES: &str = "mean, geo_median, krum, multi_krum_<q>, md_mean, md_geo, box_mean, box_geo";

fn vector(p: &mut Problems, key: &str, coords: &[f64], d: usize) -> Option<Vector> {
    match Vector::new(coords.to_vec()) {
        Ok(v) if v.dim() == d => Some(v),
        Ok(v) => {
            p.push(key, format!("expected {d} coordinates, got {}", v.dim()));
            None
        }
        Err(e) => {
            p.push(key, e.to_string());
            None
        }
    }
}

fn vectors(p: &mut Problems, key: &str, rows: &[Vec<f64>], d: usize) -> Vec<Vector> {
    rows.iter()
        .enumerate()
        .filter_map(|(i, r)| vector(p, &format!("{key}[{i}]"), r, d))
        .collect()
}

fn system(p: &mut Problems, cfg: &ExperimentConfig) -> Option<SystemParams> {
    let Some(s) = &cfg.system else {
        p.push("system", "missing required section");
        return None;
    };
    match SystemParams::new(s.n, s.t, s.f, s.d) {
        Ok(sp) => Some(sp),
        Err(e) => {
            p.push("system", e.to_string());
            None
        }
    }
}

fn adversary(p: &mut Problems, cfg: &ExperimentConfig, f: usize, d: usize) -> Option<AdversarySpec> {
    let Some(a) = &cfg.adversary else {
        return if f == 0 {
            Some(AdversarySpec::none())
        } else {
            p.push("adversary", "missing required section (f > 0)");
            None
        };
    };
    let recipients = |p: &mut Problems| -> Option<RecipientRule> {
        Some(match a.recipients.clone() {
            None => RecipientRule::All,
            Some(RecipientSpec::Named(NamedRecipients::All)) => RecipientRule::All,
            Some(RecipientSpec::Named(NamedRecipients::Nobody)) => RecipientRule::Nobody,
            Some(RecipientSpec::Named(NamedRecipients::FirstHalf)) => RecipientRule::FirstHalf,
            Some(RecipientSpec::Named(NamedRecipients::SecondHalf)) => RecipientRule::SecondHalf,
            Some(RecipientSpec::Named(NamedRecipients::EvenIndexed)) => RecipientRule::EvenIndexed,
            Some(RecipientSpec::Only(ids)) => {
                if ids.is_empty() {
                    p.push("adversary.recipients", "empty recipient list; use \"nobody\"");
                    return None;
                }
                RecipientRule::Only(ids)
            }
        })
    };
    let behavior = match a.kind {
        AdversaryKind::None => {
            if f > 0 {
                p.push("adversary.kind", format!("\"none\" requires f = 0, got f = {f}"));
                return None;
            }
            return Some(AdversarySpec::none());
        }
        AdversaryKind::Crash => {
            let r = a.crash_round.unwrap_or(1);
            if r == 0 {
                p.push("adversary.crash_round", "rounds are 1-based");
                return None;
            }
            Behavior::Crash { from_round: r }
        }
        AdversaryKind::SignFlip => Behavior::SignFlip,
        AdversaryKind::FixedVector => {
            let Some(v) = &a.vector else {
                p.push("adversary.vector", "missing required key for fixed_vector");
                return None;
            };
            Behavior::FixedVector(vector(p, "adversary.vector", v, d)?)
        }
        AdversaryKind::SelectiveOmission => {
            let value = match a.value.unwrap_or(OmissionValue::Honest) {
                OmissionValue::Honest => ValueRule::Honest,
                OmissionValue::Flipped => ValueRule::Flipped,
                OmissionValue::Scaled => match a.scale {
                    Some(s) if s.is_finite() => ValueRule::Scaled(s),
                    _ => {
                        p.push("adversary.scale", "missing or non-finite scale for value = \"scaled\"");
                        return None;
                    }
                },
                OmissionValue::Fixed => {
                    let Some(v) = &a.vector else {
                        p.push("adversary.vector", "missing required key for value = \"fixed\"");
                        return None;
                    };
                    ValueRule::Fixed(vector(p, "adversary.vector", v, d)?)
                }
            };
            Behavior::SelectiveOmission {
                value,
                recipients: recipients(p)?,
            }
        }
        AdversaryKind::MdOscillation => Behavior::MdOscillation,
    };
    match AdversarySpec::new(behavior, f) {
        Ok(s) => Some(s),
        Err(e) => {
            p.push("adversary", e.to_string());
            None
        }
    }
}

fn weiszfeld(p: &mut Problems, cfg: &ExperimentConfig) -> WeiszfeldConfig {
    let w = cfg.weiszfeld.unwrap_or_default();
    if let Err(e) = w.validate() {
        p.push("weiszfeld", e.to_string());
    }
    w
}

/// How instances are produced for `agree` and `eval`.
#[derive(Debug, Clone)]
pub enum InstancePlan {
    Random { params: SystemParams, adversary: AdversarySpec },
    Explicit { params: SystemParams, honest: Vec<Vector>, byzantine: Option<Vec<Vector>>, adversary: AdversarySpec },
    MdOscillation { params: SystemParams, v1: Vector, v2: Vector },
    KrumUnbounded { params: SystemParams },
}

fn instance_plan(p: &mut Problems, cfg: &ExperimentConfig) -> Option<InstancePlan> {
    let params = system(p, cfg)?;
    let section = cfg.instance.clone().unwrap_or_default();
    let d = params.d;
    match section.kind {
        InstanceKind::Random => Some(InstancePlan::Random {
            params,
            adversary: adversary(p, cfg, params.f, d)?,
        }),
        InstanceKind::Explicit => {
            let Some(rows) = &section.honest else {
                p.push("instance.honest", "missing required key for kind = \"explicit\"");
                return None;
            };
            let honest = vectors(p, "instance.honest", rows, d);
            if rows.len() != params.honest() {
                p.push(
                    "instance.honest",
                    format!("expected n − f = {} vectors, got {}", params.honest(), rows.len()),
                );
            }
            let byzantine = section.byzantine.as_ref().map(|rows| {
                if rows.len() != params.f {
                    p.push("instance.byzantine", format!("expected f = {} vectors, got {}", params.f, rows.len()));
                }
                vectors(p, "instance.byzantine", rows, d)
            });
            let adversary = adversary(p, cfg, params.f, d)?;
            Some(InstancePlan::Explicit {
                params,
                honest,
                byzantine,
                adversary,
            })
        }
        InstanceKind::MdOscillation => {
            if params.f != params.t || params.quorum() % 2 != 0 || params.t % 2 != 0 {
                p.push("system", "md_oscillation needs f = t with n − t and t even");
            }
            let v1 = section.v1.as_ref().and_then(|v| vector(p, "instance.v1", v, d));
            let v2 = section.v2.as_ref().and_then(|v| vector(p, "instance.v2", v, d));
            if section.v1.is_none() {
                p.push("instance.v1", "missing required key for kind = \"md_oscillation\"");
            }
            if section.v2.is_none() {
                p.push("instance.v2", "missing required key for kind = \"md_oscillation\"");
            }
            Some(InstancePlan::MdOscillation { params, v1: v1?, v2: v2? })
        }
        InstanceKind::KrumUnbounded => {
            if params.f != params.t {
                p.push("system.f", "krum_unbounded silences all t Byzantine nodes; set f = t");
            }
            if params.quorum() < 3 {
                p.push("system", "krum_unbounded needs n − t >= 3");
            }
            Some(InstancePlan::KrumUnbounded { params })
        }
    }
}

fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output
        .as_ref()
        .and_then(|o| o.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

#[derive(Debug, Clone)]
pub struct AgreePlan {
    pub instance: InstancePlan,
    pub algo: AgreementAlgo,
    pub rounds: usize,
    pub eps: f64,
    pub options: AgreementOptions,
    pub seed: u64,
    pub out: PathBuf,
}

fn agreement_options(p: &mut Problems, cfg: &ExperimentConfig, a: Option<&AgreementSection>) -> AgreementOptions {
    AgreementOptions {
        weiszfeld: weiszfeld(p, cfg),
        tie_break: a.map(|a| a.tie_break).unwrap_or_default(),
        krum_distance: a.map(|a| a.krum_distance).unwrap_or_default(),
    }
}

fn algo(p: &mut Problems, key: &str, name: &str) -> Option<AgreementAlgo> {
    let a = parse_algo(name);
    if a.is_none() {
        p.push(key, format!("unknown algorithm {name:?}; expected one of {ALGO_NAMES}"));
    }
    a
}

fn check_capacity(p: &mut Problems, params: &SystemParams, algo: AgreementAlgo, need_s_geo: bool) {
    if (need_s_geo || algo == AgreementAlgo::HyperboxGeo) && params.n > MAX_S_GEO_INPUTS {
        p.push("system.n", format!("subset-median enumeration supports n <= {MAX_S_GEO_INPUTS}, got {}", params.n));
    }
    if need_s_geo && params.d > MAX_BALL_DIM {
        p.push("system.d", format!("exact covering balls support d <= {MAX_BALL_DIM}, got {}", params.d));
    }
    if let AgreementAlgo::Plain(PlainRule::MultiKrum(q)) = algo {
        if q == 0 || q > params.n {
            p.push("algo", format!("multi_krum q must lie in 1..={}", params.n));
        }
    }
}

pub fn agree_plan(cfg: &ExperimentConfig) -> Result<AgreePlan, ConfigError> {
    let mut p = Problems::default();
    let section = cfg.agreement.as_ref();
    if section.is_none() {
        p.push("agreement", "missing required section");
    }
    let instance = instance_plan(&mut p, cfg);
    let options = agreement_options(&mut p, cfg, section);
    let algo = section.and_then(|a| algo(&mut p, "agreement.algo", &a.algo));
    if let Some(a) = section {
        if a.rounds == 0 {
            p.push("agreement.rounds", "must be at least 1");
        }
        if a.eps.is_nan() || a.eps < 0.0 {
            p.push("agreement.eps", format!("must be non-negative, got {}", a.eps));
        }
    }
    if let (Some(inst), Some(algo)) = (&instance, algo) {
        check_capacity(&mut p, plan_params(inst), algo, false);
    }
    let plan = match (instance, algo, section) {
        (Some(instance), Some(algo), Some(a)) => Some(AgreePlan {
            instance,
            algo,
            rounds: a.rounds,
            eps: a.eps,
            options,
            seed: cfg.seed,
            out: output_dir(cfg),
        }),
        _ => None,
    };
    p.finish(plan).map(|plan| plan.expect("no problems means every part parsed"))
}

pub fn plan_params(plan: &InstancePlan) -> &SystemParams {
    match plan {
        InstancePlan::Random { params, .. }
        | InstancePlan::Explicit { params, .. }
        | InstancePlan::MdOscillation { params, .. }
        | InstancePlan::KrumUnbounded { params } => params,
    }
}

#[derive(Debug, Clone)]
pub struct EvalPlan {
    pub instance: InstancePlan,
    pub algo: AgreementAlgo,
    pub instances: usize,
    pub krum_q: usize,
    pub options: AgreementOptions,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn eval_plan(cfg: &ExperimentConfig) -> Result<EvalPlan, ConfigError> {
    let mut p = Problems::default();
    let section = cfg.eval.as_ref();
    if section.is_none() {
        p.push("eval", "missing required section");
    }
    let instance = instance_plan(&mut p, cfg);
    let options = agreement_options(&mut p, cfg, cfg.agreement.as_ref());
    let algo = section.and_then(|e| algo(&mut p, "eval.algo", &e.algo));
    if let Some(e) = section {
        if e.instances == 0 {
            p.push("eval.instances", "must be at least 1");
        }
    }
    if let (Some(inst), Some(algo), Some(e)) = (&instance, algo, section) {
        let params = plan_params(inst);
        check_capacity(&mut p, params, algo, true);
        if e.krum_q == 0 || e.krum_q > params.quorum() {
            p.push("eval.krum_q", format!("must lie in 1..={}", params.quorum()));
        }
    }
    let plan = match (instance, algo, section) {
        (Some(instance), Some(algo), Some(e)) => Some(EvalPlan {
            instance,
            algo,
            instances: e.instances,
            krum_q: e.krum_q,
            options,
            seed: cfg.seed,
            out: output_dir(cfg),
        }),
        _ => None,
    };
    p.finish(plan).map(|plan| plan.expect("no problems means every part parsed"))
}

#[derive(Debug, Clone)]
pub struct LearnPlan {
    pub n: usize,
    pub f: usize,
    pub t: usize,
    pub rules: Vec<AggregationRule>,
    pub architecture: Architecture,
    pub split: SplitKind,
    pub model: ModelKind,
    pub attack: Behavior,
    pub iterations: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub lr_floor: f64,
    pub baseline: bool,
    pub weiszfeld: WeiszfeldConfig,
    pub data: DataSection,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn learn_plan(cfg: &ExperimentConfig) -> Result<LearnPlan, ConfigError> {
    let mut p = Problems::default();
    let Some(l) = &cfg.learning else {
        return Err(ConfigError::one("learning", "missing required section"));
    };
    let t = l.t.unwrap_or(l.f);
    if let Err(e) = SystemParams::new(l.n, t, l.f, 1) {
        p.push("learning", e.to_string());
    }
    if l.rules.is_empty() {
        p.push("learning.rules", "list at least one rule");
    }
    let mut rules = Vec::new();
    for (i, r) in l.rules.iter().enumerate() {
        match parse_rule(r) {
            Some(AggregationRule::MultiKrum(q)) if q == 0 || q > l.n => {
                p.push(format!("learning.rules[{i}]"), format!("multi_krum q must lie in 1..={}", l.n))
            }
            Some(rule) => rules.push(rule),
            None => p.push(
                format!("learning.rules[{i}]"),
                format!("unknown rule {r:?}; expected one of {RULE_NAMES}"),
            ),
        }
    }
    if rules.iter().any(|r| matches!(r, AggregationRule::BoxGeo)) && l.n > MAX_S_GEO_INPUTS {
        p.push("learning.n", format!("box_geo enumerates subsets and supports n <= {MAX_S_GEO_INPUTS}"));
    }
    if l.iterations == 0 {
        p.push("learning.iterations", "must be at least 1");
    }
    if !(l.learning_rate > 0.0 && l.learning_rate.is_finite()) {
        p.push("learning.learning_rate", "must be positive");
    }
    if !(0.0..=1.0).contains(&l.lr_floor) {
        p.push("learning.lr_floor", "must lie in [0, 1]");
    }
    if l.hidden > byzagg::learning::MAX_HIDDEN {
        p.push("learning.hidden", format!("at most {}", byzagg::learning::MAX_HIDDEN));
    }
    let model = if l.hidden == 0 {
        ModelKind::SoftmaxRegression
    } else {
        ModelKind::TwoLayerMlp { hidden: l.hidden }
    };
    let attack = match &cfg.adversary {
        None => Some(Behavior::SignFlip),
        Some(a) => match a.kind {
            AdversaryKind::SignFlip => Some(Behavior::SignFlip),
            AdversaryKind::Crash => Some(Behavior::Crash {
                from_round: a.crash_round.unwrap_or(1).max(1),
            }),
            AdversaryKind::None if l.f == 0 => Some(Behavior::SignFlip),
            other => {
                p.push(
                    "adversary.kind",
                    format!("learning supports sign_flip and crash attacks, got {other:?}"),
                );
                None
            }
        },
    };
    let data = cfg.data.clone().unwrap_or_default();
    match &data {
        DataSection::Blobs { classes, per_class, spread } => {
            if *classes < 2 {
                p.push("data.classes", "need at least 2 classes");
            }
            if *per_class == 0 {
                p.push("data.per_class", "must be positive");
            }
            if !spread.is_finite() || *spread < 0.0 {
                p.push("data.spread", "must be finite and non-negative");
            }
        }
        DataSection::Csv { path, max_value } => {
            if !path.exists() {
                p.push("data.path", format!("{} does not exist", path.display()));
            }
            if !(max_value.is_finite() && *max_value > 0.0) {
                p.push("data.max_value", "must be positive");
            }
        }
    }
    let weiszfeld = weiszfeld(&mut p, cfg);
    let plan = attack.map(|attack| LearnPlan {
        n: l.n,
        f: l.f,
        t,
        rules,
        architecture: l.architecture,
        split: l.split,
        model,
        attack,
        iterations: l.iterations,
        batch_size: l.batch_size,
        learning_rate: l.learning_rate,
        lr_floor: l.lr_floor,
        baseline: l.baseline,
        weiszfeld,
        data,
        seed: cfg.seed,
        out: output_dir(cfg),
    });
    p.finish(plan).map(|plan| plan.expect("no problems means every part parsed"))
}
