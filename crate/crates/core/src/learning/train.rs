use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{AdversarySpec, Behavior};
use crate::agreement::{node_step, run_agreement_with, AgreementAlgo, AgreementOptions, PlainRule};
use crate::aggregation::WeiszfeldConfig;
use crate::error::{Error, Result};
use crate::instance::AgreementInstance;
use crate::params::SystemParams;
use crate::vector::{diameter, Vector};

use super::dataset::{Dataset, Sample};
use super::model::{Model, ModelKind};
use super::split::{split_data, SplitKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregationRule {
    Mean,
    GeoMedian,
    Krum,
    MultiKrum(usize),
    MdMean,
    MdGeo,
    BoxMean,
    BoxGeo,
}

impl AggregationRule {
    pub fn algo(self) -> AgreementAlgo {
        match self {
            AggregationRule::Mean => AgreementAlgo::Plain(PlainRule::Mean),
            AggregationRule::GeoMedian => AgreementAlgo::Plain(PlainRule::GeoMedian),
            AggregationRule::Krum => AgreementAlgo::Plain(PlainRule::Krum),
            AggregationRule::MultiKrum(q) => AgreementAlgo::Plain(PlainRule::MultiKrum(q)),
            AggregationRule::MdMean => AgreementAlgo::MinDiamMean,
            AggregationRule::MdGeo => AgreementAlgo::MinDiamGeo,
            AggregationRule::BoxMean => AgreementAlgo::HyperboxMean,
            AggregationRule::BoxGeo => AgreementAlgo::HyperboxGeo,
        }
    }

    pub fn name(self) -> String {
        match self {
            AggregationRule::Mean => "mean".into(),
            AggregationRule::GeoMedian => "geo_median".into(),
            AggregationRule::Krum => "krum".into(),
            AggregationRule::MultiKrum(q) => format!("multi_krum_{q}"),
            AggregationRule::MdMean => "md_mean".into(),
            AggregationRule::MdGeo => "md_geo".into(),
            AggregationRule::BoxMean => "box_mean".into(),
            AggregationRule::BoxGeo => "box_geo".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    #[default]
    Centralized,
    Decentralized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningConfig {
    pub n: usize,
    pub f: usize,
    pub t: usize,
    pub model: ModelKind,
    pub rule: AggregationRule,
    pub architecture: Architecture,
    pub split: SplitKind,
    /// Behaviour of the `f` Byzantine clients.
    pub attack: Behavior,
    /// `T`.
    pub iterations: usize,
    /// Samples per gradient, drawn with replacement; `0` uses the whole shard.
    pub batch_size: usize,
    /// `η`.
    pub learning_rate: f64,
    /// The step size never drops below this fraction of `η`.
    pub lr_floor: f64,
    pub weiszfeld: WeiszfeldConfig,
    pub seed: u64,
}

impl Default for LearningConfig {
    /// Ten clients, one sign-flipping, decentralized hyperbox agreement on a
    /// softmax model.
    fn default() -> Self {
        LearningConfig {
            n: 10,
            f: 1,
            t: 1,
            model: ModelKind::SoftmaxRegression,
            rule: AggregationRule::BoxGeo,
            architecture: Architecture::Decentralized,
            split: SplitKind::MildHeterogeneous,
            attack: Behavior::SignFlip,
            iterations: 150,
            batch_size: 32,
            learning_rate: 0.5,
            lr_floor: 0.1,
            weiszfeld: WeiszfeldConfig::default(),
            seed: 0,
        }
    }
}

impl LearningConfig {
    pub fn validate(&self) -> Result<SystemParams> {
        if self.iterations == 0 {
            return Err(Error::InvalidParams("iterations must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..=1.0).contains(&self.lr_floor) {
            return Err(Error::InvalidParams(format!("lr floor must lie in [0, 1], got {}", self.lr_floor)));
        }
        self.weiszfeld.validate()?;
        // the dimension is checked once the model exists
        SystemParams::new(self.n, self.t, self.f, 1)
    }

    /// `γ_t = η·(1 − (η/T)·t)` for 1-based `t`, floored at `lr_floor·η`.
    pub fn step_size(&self, t: usize) -> f64 {
        let eta = self.learning_rate;
        let decayed = eta * (1.0 - eta / self.iterations as f64 * t as f64);
        decayed.max(self.lr_floor * eta)
    }
}

/// Agreement sub-rounds run at 1-based learning iteration `t`.
pub fn sub_rounds(t: usize) -> usize {
    ((t + 1) as f64).log2().ceil().max(1.0) as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: usize,
    /// Test accuracy of the global model, or the mean over honest local models.
    pub accuracy_mean: f64,
    /// Equal to `accuracy_mean` for centralized runs.
    pub accuracy_min: f64,
    /// Mean honest mini-batch loss before the update.
    pub loss: f64,
    pub gradient_diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LearningTrace {
    pub records: Vec<IterationRecord>,
}

impl LearningTrace {
    pub fn final_accuracy(&self) -> Option<f64> {
        self.records.last().map(|r| r.accuracy_mean)
    }

    pub fn final_min_accuracy(&self) -> Option<f64> {
        self.records.last().map(|r| r.accuracy_min)
    }
}

/// Everything a learning loop reads but never changes.
#[derive(Debug, Clone)]
pub struct LearningSetup {
    pub config: LearningConfig,
    pub params: SystemParams,
    pub adversary: AdversarySpec,
    /// One shard per client; honest clients first, Byzantine clients last.
    pub shards: Vec<Vec<Sample>>,
    pub test: Vec<Sample>,
    pub num_features: usize,
    pub num_classes: usize,
}

impl LearningSetup {
    pub fn new(config: LearningConfig, shards: Vec<Vec<Sample>>, test: Vec<Sample>, num_features: usize, num_classes: usize) -> Result<Self> {
        let p = config.validate()?;
        if shards.len() != config.n {
            return Err(Error::InvalidParams(format!("{} shards for {} clients", shards.len(), config.n)));
        }
        if shards.iter().any(Vec::is_empty) {
            return Err(Error::Dataset("empty client shard".into()));
        }
        let d = super::model::param_count(config.model, num_features, num_classes);
        let params = SystemParams::new(p.n, p.t, p.f, d)?;
        let adversary = AdversarySpec::new(config.attack.clone(), config.f)?;
        Ok(LearningSetup {
            config,
            params,
            adversary,
            shards,
            test,
            num_features,
            num_classes,
        })
    }

    /// Holds out a tenth of `data` for testing and splits the rest across the
    /// clients with the configured split.
    pub fn from_dataset(config: LearningConfig, data: &Dataset) -> Result<Self> {
        let (train, test) = data.train_test_split(0.9, mix(config.seed ^ 0x7465_7374))?;
        let shards = split_data(&train, config.n, config.split, mix(config.seed ^ 0x7370_6c69))?;
        LearningSetup::new(config, shards, test, data.num_features, data.num_classes)
    }

    fn honest(&self) -> usize {
        self.params.honest()
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the mini-batch drawn by `client` at `iteration`.
pub fn batch_seed(seed: u64, client: usize, iteration: usize) -> u64 {
    mix(mix(mix(seed) ^ client as u64) ^ iteration as u64)
}

fn draw_batch(shard: &[Sample], size: usize, seed: u64) -> Vec<Sample> {
    if size == 0 {
        return shard.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size).map(|_| shard[rng.random_range(0..shard.len())].clone()).collect()
}

/// Loss and gradient of every client (honest first) at iteration `t`.
fn client_gradients(setup: &LearningSetup, models: &[&Model], t: usize) -> Result<Vec<(f64, Vector)>> {
    use rayon::prelude::*;
    let cfg = &setup.config;
    (0..cfg.n)
        .into_par_iter()
        .map(|c| {
            let batch = draw_batch(&setup.shards[c], cfg.batch_size, batch_seed(cfg.seed, c, t));
            models[c].loss_and_gradient(&batch)
        })
        .collect()
}

fn split_honest(grads: Vec<(f64, Vector)>, h: usize) -> (f64, Vec<Vector>, Vec<Vector>) {
    let loss = grads[..h].iter().map(|(l, _)| l).sum::<f64>() / h as f64;
    let mut honest: Vec<Vector> = grads.into_iter().map(|(_, g)| g).collect();
    let byzantine = honest.split_off(h);
    (loss, honest, byzantine)
}

fn options(cfg: &LearningConfig) -> AgreementOptions {
    AgreementOptions {
        weiszfeld: cfg.weiszfeld,
        ..Default::default()
    }
}

/// A single global model shared by all clients.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralizedState {
    pub model: Model,
    /// Iterations completed so far.
    pub iteration: usize,
}

/// One local model per client, honest first.
#[derive(Debug, Clone, PartialEq)]
pub struct DecentralizedState {
    pub models: Vec<Model>,
    pub iteration: usize,
}

/// One server step: every client computes a gradient at the global model,
/// Byzantine clients transform theirs, the server aggregates what it receives
/// with one application of the configured rule and takes a step.
pub fn centralized_round(state: &CentralizedState, setup: &LearningSetup) -> Result<(CentralizedState, IterationRecord)> {
    let cfg = &setup.config;
    let t = state.iteration + 1;
    let h = setup.honest();
    let models = vec![&state.model; cfg.n];
    let (loss, honest, byzantine) = split_honest(client_gradients(setup, &models, t)?, h);
    let mut received = honest.clone();
    for (k, own) in byzantine.iter().enumerate() {
        if let Some(b) = setup.adversary.broadcast(k, t, own, &honest) {
            // the server is the only recipient
            if b.recipients.reaches(1, 0) {
                b.value.ensure_dim(setup.params.d)?;
                b.value.ensure_finite()?;
                received.push(b.value);
            }
        }
    }
    let agg = node_step(cfg.rule.algo(), &received, &setup.params, &options(cfg), None)?.chosen;
    let mut model = state.model.clone();
    model.apply_update(&agg, cfg.step_size(t))?;
    let acc = model.accuracy(&setup.test);
    let record = IterationRecord {
        iteration: t,
        accuracy_mean: acc,
        accuracy_min: acc,
        loss,
        gradient_diameter: diameter(&honest)?,
    };
    Ok((CentralizedState { model, iteration: t }, record))
}

/// One decentralized step: clients agree on a gradient over
/// `sub_rounds(t)` agreement rounds and each takes a step with its own agreed
/// vector. Byzantine clients step with their protocol-following value.
pub fn decentralized_round(state: &DecentralizedState, setup: &LearningSetup) -> Result<(DecentralizedState, IterationRecord)> {
    let cfg = &setup.config;
    let t = state.iteration + 1;
    let h = setup.honest();
    let models: Vec<&Model> = state.models.iter().collect();
    let (loss, honest, byzantine) = split_honest(client_gradients(setup, &models, t)?, h);
    let gradient_diameter = diameter(&honest)?;
    let instance = AgreementInstance {
        params: setup.params,
        honest_inputs: honest,
        byzantine_inputs: byzantine,
        adversary: setup.adversary.clone(),
        seed: batch_seed(cfg.seed, usize::MAX, t),
    };
    let run = run_agreement_with(&instance, cfg.rule.algo(), sub_rounds(t), 0.0, &options(cfg))?;
    let step = cfg.step_size(t);
    let mut next = state.models.clone();
    for (m, g) in next.iter_mut().zip(run.honest_outputs.iter().chain(&run.byzantine_states)) {
        m.apply_update(g, step)?;
    }
    let accs: Vec<f64> = next[..h].iter().map(|m| m.accuracy(&setup.test)).collect();
    let record = IterationRecord {
        iteration: t,
        accuracy_mean: accs.iter().sum::<f64>() / h as f64,
        accuracy_min: accs.iter().copied().fold(f64::INFINITY, f64::min),
        loss,
        gradient_diameter,
    };
    Ok((DecentralizedState { models: next, iteration: t }, record))
}

/// Runs `T` iterations from freshly initialized models.
pub fn run_learning(setup: &LearningSetup) -> Result<LearningTrace> {
    let cfg = &setup.config;
    let init = Model::new(cfg.model, setup.num_features, setup.num_classes, mix(cfg.seed ^ 0x6d6f_64656c))?;
    let mut records = Vec::with_capacity(cfg.iterations);
    match cfg.architecture {
        Architecture::Centralized => {
            let mut state = CentralizedState { model: init, iteration: 0 };
            for _ in 0..cfg.iterations {
                let (next, rec) = centralized_round(&state, setup)?;
                state = next;
                records.push(rec);
            }
        }
        Architecture::Decentralized => {
            let mut state = DecentralizedState {
                models: vec![init; cfg.n],
                iteration: 0,
            };
            for _ in 0..cfg.iterations {
                let (next, rec) = decentralized_round(&state, setup)?;
                state = next;
                records.push(rec);
            }
        }
    }
    Ok(LearningTrace { records })
}
