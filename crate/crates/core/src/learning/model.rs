use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

use super::dataset::Sample;

/// Largest hidden layer accepted for the two-layer network.
pub const MAX_HIDDEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    SoftmaxRegression,
    /// One `tanh` hidden layer followed by a softmax output.
    TwoLayerMlp { hidden: usize },
}

/// A classifier with flattened parameters.
///
/// Softmax regression stores `W (k × p)` row-major followed by `b (k)`. The
/// two-layer network stores `W1 (h × p)`, `b1 (h)`, `W2 (k × h)`, `b2 (k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub kind: ModelKind,
    pub input_dim: usize,
    pub num_classes: usize,
    pub params: Vec<f64>,
}

pub fn param_count(kind: ModelKind, input_dim: usize, num_classes: usize) -> usize {
    match kind {
        ModelKind::SoftmaxRegression => num_classes * input_dim + num_classes,
        ModelKind::TwoLayerMlp { hidden } => hidden * input_dim + hidden + num_classes * hidden + num_classes,
    }
}

fn log_softmax_into(logits: &[f64], out: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
    for (o, z) in out.iter_mut().zip(logits) {
        *o = z - lse;
    }
}

fn affine(w: &[f64], b: &[f64], x: &[f64], out: &mut [f64]) {
    let cols = x.len();
    for (r, o) in out.iter_mut().enumerate() {
        let row = &w[r * cols..(r + 1) * cols];
        *o = b[r] + row.iter().zip(x).map(|(a, c)| a * c).sum::<f64>();
    }
}

impl Model {
    /// Softmax regression starts at zero (uniform predictions); the
    /// two-layer network draws weights from `N(0, 1/fan_in)` and zero biases.
    pub fn new(kind: ModelKind, input_dim: usize, num_classes: usize, seed: u64) -> Result<Self> {
        if input_dim == 0 || num_classes < 2 {
            return Err(Error::InvalidParams(format!(
                "model needs input_dim >= 1 and at least 2 classes (got {input_dim}, {num_classes})"
            )));
        }
        let len = param_count(kind, input_dim, num_classes);
        let params = match kind {
            ModelKind::SoftmaxRegression => vec![0.0; len],
            ModelKind::TwoLayerMlp { hidden } => {
                if hidden == 0 || hidden > MAX_HIDDEN {
                    return Err(Error::InvalidParams(format!(
                        "hidden width must lie in 1..={MAX_HIDDEN}, got {hidden}"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let w1 = Normal::new(0.0, (1.0 / input_dim as f64).sqrt()).expect("positive std");
                let w2 = Normal::new(0.0, (1.0 / hidden as f64).sqrt()).expect("positive std");
                let mut p = Vec::with_capacity(len);
                p.extend((0..hidden * input_dim).map(|_| w1.sample(&mut rng)));
                p.extend(std::iter::repeat_n(0.0, hidden));
                p.extend((0..num_classes * hidden).map(|_| w2.sample(&mut rng)));
                p.extend(std::iter::repeat_n(0.0, num_classes));
                p
            }
        };
        Ok(Model {
            kind,
            input_dim,
            num_classes,
            params,
        })
    }

    pub fn with_params(&self, params: Vec<f64>) -> Result<Self> {
        if params.len() != self.params.len() {
            return Err(Error::DimensionMismatch {
                expected: self.params.len(),
                actual: params.len(),
            });
        }
        Ok(Model { params, ..self.clone() })
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    /// `θ ← θ − step · g`.
    pub fn apply_update(&mut self, g: &Vector, step: f64) -> Result<()> {
        g.ensure_dim(self.params.len())?;
        for (p, gi) in self.params.iter_mut().zip(g.iter()) {
            *p -= step * gi;
        }
        if let Some(index) = self.params.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite {
                index,
                value: self.params[index],
            });
        }
        Ok(())
    }

    fn check_sample(&self, s: &Sample) -> Result<()> {
        if s.features.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                actual: s.features.len(),
            });
        }
        if s.label >= self.num_classes {
            return Err(Error::Dataset(format!(
                "label {} outside 0..{}",
                s.label, self.num_classes
            )));
        }
        Ok(())
    }

    /// Class log-probabilities of one sample.
    pub fn log_probs(&self, x: &[f64]) -> Vec<f64> {
        let k = self.num_classes;
        let p = self.input_dim;
        let mut logits = vec![0.0; k];
        match self.kind {
            ModelKind::SoftmaxRegression => {
                let (w, b) = self.params.split_at(k * p);
                affine(w, b, x, &mut logits);
            }
            ModelKind::TwoLayerMlp { hidden } => {
                let (w1, rest) = self.params.split_at(hidden * p);
                let (b1, rest) = rest.split_at(hidden);
                let (w2, b2) = rest.split_at(k * hidden);
                let mut a = vec![0.0; hidden];
                affine(w1, b1, x, &mut a);
                a.iter_mut().for_each(|z| *z = z.tanh());
                affine(w2, b2, &a, &mut logits);
            }
        }
        let mut out = vec![0.0; k];
        log_softmax_into(&logits, &mut out);
        out
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let lp = self.log_probs(x);
        // first maximum wins
        let mut best = 0;
        for (c, &v) in lp.iter().enumerate() {
            if v > lp[best] {
                best = c;
            }
        }
        best
    }

    /// Fraction of correctly classified samples.
    pub fn accuracy(&self, data: &[Sample]) -> f64 {
        if data.is_empty() {
            return 0.0;
        }
        let hits = data.iter().filter(|s| self.predict(&s.features) == s.label).count();
        hits as f64 / data.len() as f64
    }

    /// Mean cross-entropy over `batch` and its gradient with respect to the
    /// flattened parameters.
    pub fn loss_and_gradient(&self, batch: &[Sample]) -> Result<(f64, Vector)> {
        if batch.is_empty() {
            return Err(Error::Empty("loss_and_gradient"));
        }
        for s in batch {
            self.check_sample(s)?;
            if let Some(index) = s.features.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    index,
                    value: s.features[index],
                });
            }
        }
        let k = self.num_classes;
        let p = self.input_dim;
        let mut grad = vec![0.0; self.params.len()];
        let mut loss = 0.0;
        let mut delta = vec![0.0; k];
        match self.kind {
            ModelKind::SoftmaxRegression => {
                let (w, b) = self.params.split_at(k * p);
                let mut logits = vec![0.0; k];
                for s in batch {
                    affine(w, b, &s.features, &mut logits);
                    log_softmax_into(&logits, &mut delta);
                    loss -= delta[s.label];
                    for d in delta.iter_mut() {
                        *d = d.exp();
                    }
                    delta[s.label] -= 1.0;
                    let (gw, gb) = grad.split_at_mut(k * p);
                    for c in 0..k {
                        let row = &mut gw[c * p..(c + 1) * p];
                        for (g, x) in row.iter_mut().zip(&s.features) {
                            *g += delta[c] * x;
                        }
                        gb[c] += delta[c];
                    }
                }
            }
            ModelKind::TwoLayerMlp { hidden } => {
                let (w1, rest) = self.params.split_at(hidden * p);
                let (b1, rest) = rest.split_at(hidden);
                let (w2, b2) = rest.split_at(k * hidden);
                let mut a = vec![0.0; hidden];
                let mut logits = vec![0.0; k];
                let mut back = vec![0.0; hidden];
                for s in batch {
                    affine(w1, b1, &s.features, &mut a);
                    a.iter_mut().for_each(|z| *z = z.tanh());
                    affine(w2, b2, &a, &mut logits);
                    log_softmax_into(&logits, &mut delta);
                    loss -= delta[s.label];
                    for d in delta.iter_mut() {
                        *d = d.exp();
                    }
                    delta[s.label] -= 1.0;

                    let (gw1, rest) = grad.split_at_mut(hidden * p);
                    let (gb1, rest) = rest.split_at_mut(hidden);
                    let (gw2, gb2) = rest.split_at_mut(k * hidden);
                    back.iter_mut().for_each(|x| *x = 0.0);
                    for c in 0..k {
                        let row = &mut gw2[c * hidden..(c + 1) * hidden];
                        let wrow = &w2[c * hidden..(c + 1) * hidden];
                        for j in 0..hidden {
                            row[j] += delta[c] * a[j];
                            back[j] += delta[c] * wrow[j];
                        }
                        gb2[c] += delta[c];
                    }
                    for j in 0..hidden {
                        let dz = back[j] * (1.0 - a[j] * a[j]);
                        let row = &mut gw1[j * p..(j + 1) * p];
                        for (g, x) in row.iter_mut().zip(&s.features) {
                            *g += dz * x;
                        }
                        gb1[j] += dz;
                    }
                }
            }
        }
        let m = batch.len() as f64;
        grad.iter_mut().for_each(|g| *g /= m);
        Ok((loss / m, Vector::new(grad)?))
    }

    /// Mean cross-entropy without the gradient.
    pub fn loss(&self, data: &[Sample]) -> f64 {
        if data.is_empty() {
            return 0.0;
        }
        data.iter().map(|s| -self.log_probs(&s.features)[s.label]).sum::<f64>() / data.len() as f64
    }
}
