//! Probabilistic classifier abstraction, entropy scoring, and the F1 metric.
//!
//! The reference classifier is an L2-regularized multinomial logistic
//! regression trained by fixed-iteration gradient descent with step halving,
//! so training is deterministic and the loss never increases. The AL engine
//! only needs `fit` and `predict_proba`, so swapping in another probabilistic
//! classifier is a local change.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{seeded_rng, Error, Result};

/// Training settings for the reference classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierSettings {
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_l2")]
    pub l2: f64,
}

fn default_iterations() -> usize {
    500
}

fn default_learning_rate() -> f64 {
    0.1
}

fn default_l2() -> f64 {
    1e-3
}

impl Default for ClassifierSettings {
    fn default() -> Self {
        ClassifierSettings {
            iterations: default_iterations(),
            learning_rate: default_learning_rate(),
            l2: default_l2(),
        }
    }
}

/// Trained multinomial logistic model.
///
/// `weights` is one row per class; each row is `[intercept, w_1, ..., w_d]`
/// over raw (unstandardized) features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub weights: Vec<Vec<f64>>,
    pub num_classes: usize,
    pub feature_dim: usize,
}

/// A probability distribution over classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    /// Validate non-negativity and normalization within 1e-9.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::invalid("empty probability vector"));
        }
        let mut sum = 0.0;
        for &v in &p {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!("invalid probability {v}")));
            }
            sum += v;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("probabilities sum to {sum}")));
        }
        Ok(ProbVector(p))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the largest component; first index wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.0.iter().enumerate() {
            if v > self.0[best] {
                best = i;
            }
        }
        best
    }
}

/// Mean cross-entropy loss plus L2 penalty (intercepts unpenalized), and its
/// gradient, for flat row-major parameters of shape `num_classes x (dim+1)`.
pub fn loss_and_gradient(
    params: &[f64],
    xs: &[Vec<f64>],
    ys: &[usize],
    num_classes: usize,
    l2: f64,
) -> (f64, Vec<f64>) {
    let dim = xs[0].len();
    let stride = dim + 1;
    debug_assert_eq!(params.len(), num_classes * stride);
    let n = xs.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; params.len()];
    let mut logits = vec![0.0; num_classes];
    for (x, &y) in xs.iter().zip(ys) {
        for c in 0..num_classes {
            let row = &params[c * stride..(c + 1) * stride];
            let mut t = row[0];
            for (j, &xj) in x.iter().enumerate() {
                t += row[j + 1] * xj;
            }
            logits[c] = t;
        }
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for &t in &logits {
            z += (t - max).exp();
        }
        let log_z = max + z.ln();
        loss += (log_z - logits[y]) / n;
        for c in 0..num_classes {
            let p = (logits[c] - log_z).exp();
            let delta = (p - if c == y { 1.0 } else { 0.0 }) / n;
            let row = &mut grad[c * stride..(c + 1) * stride];
            row[0] += delta;
            for (j, &xj) in x.iter().enumerate() {
                row[j + 1] += delta * xj;
            }
        }
    }
    for c in 0..num_classes {
        for j in 1..stride {
            let w = params[c * stride + j];
            loss += 0.5 * l2 * w * w;
            grad[c * stride + j] += l2 * w;
        }
    }
    (loss, grad)
}

fn loss_only(params: &[f64], xs: &[Vec<f64>], ys: &[usize], num_classes: usize, l2: f64) -> f64 {
    let dim = xs[0].len();
    let stride = dim + 1;
    let n = xs.len() as f64;
    let mut loss = 0.0;
    let mut logits = vec![0.0; num_classes];
    for (x, &y) in xs.iter().zip(ys) {
        for c in 0..num_classes {
            let row = &params[c * stride..(c + 1) * stride];
            let mut t = row[0];
            for (j, &xj) in x.iter().enumerate() {
                t += row[j + 1] * xj;
            }
            logits[c] = t;
        }
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for &t in &logits {
            z += (t - max).exp();
        }
        loss += (max + z.ln() - logits[y]) / n;
    }
    for c in 0..num_classes {
        for j in 1..stride {
            let w = params[c * stride + j];
            loss += 0.5 * l2 * w * w;
        }
    }
    loss
}

/// Fit the reference classifier on observed labels.
///
/// Deterministic given identical inputs and seed. Requires at least two
/// distinct observed classes and consistent feature dimensions.
pub fn fit(
    xs: &[Vec<f64>],
    ys: &[usize],
    num_classes: usize,
    settings: &ClassifierSettings,
    seed: u64,
) -> Result<ClassifierModel> {
    fit_with_trace(xs, ys, num_classes, settings, seed).map(|(m, _)| m)
}

/// As [`fit`], also returning the per-iteration training-loss trace.
pub fn fit_with_trace(
    xs: &[Vec<f64>],
    ys: &[usize],
    num_classes: usize,
    settings: &ClassifierSettings,
    seed: u64,
) -> Result<(ClassifierModel, Vec<f64>)> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::invalid(format!(
            "need matching non-empty features/labels, got {}/{}",
            xs.len(),
            ys.len()
        )));
    }
    let dim = xs[0].len();
    if dim == 0 {
        return Err(Error::invalid("zero-dimensional features"));
    }
    for x in xs {
        if x.len() != dim {
            return Err(Error::invalid(format!(
                "feature dimension mismatch: {} vs {dim}",
                x.len()
            )));
        }
    }
    let mut seen = vec![false; num_classes];
    for &y in ys {
        if y >= num_classes {
            return Err(Error::invalid(format!(
                "label {y} outside [0, {num_classes})"
            )));
        }
        seen[y] = true;
    }
    if seen.iter().filter(|&&s| s).count() < 2 {
        return Err(Error::invalid(
            "training set must contain at least 2 distinct classes",
        ));
    }

    // standardize; constant features pass through unscaled
    let n = xs.len() as f64;
    let mut mean = vec![0.0; dim];
    let mut sd = vec![0.0; dim];
    for x in xs {
        for (j, &v) in x.iter().enumerate() {
            mean[j] += v / n;
        }
    }
    for x in xs {
        for (j, &v) in x.iter().enumerate() {
            sd[j] += (v - mean[j]) * (v - mean[j]) / n;
        }
    }
    for s in sd.iter_mut() {
        *s = s.sqrt();
        if *s < 1e-12 {
            *s = 1.0;
        }
    }
    let zs: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| (v - mean[j]) / sd[j])
                .collect()
        })
        .collect();

    let stride = dim + 1;
    let mut rng = seeded_rng(seed);
    let mut params: Vec<f64> = (0..num_classes * stride)
        .map(|_| rng.random_range(-0.01..0.01))
        .collect();

    let mut lr = settings.learning_rate;
    let mut trace = Vec::with_capacity(settings.iterations + 1);
    let (mut loss, mut grad) = loss_and_gradient(&params, &zs, ys, num_classes, settings.l2);
    trace.push(loss);
    for _ in 0..settings.iterations {
        let mut accepted = false;
        for _ in 0..60 {
            let candidate: Vec<f64> = params
                .iter()
                .zip(&grad)
                .map(|(p, g)| p - lr * g)
                .collect();
            let cand_loss = loss_only(&candidate, &zs, ys, num_classes, settings.l2);
            if cand_loss <= loss {
                params = candidate;
                loss = cand_loss;
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        trace.push(loss);
        if !accepted {
            break;
        }
        let (l, g) = loss_and_gradient(&params, &zs, ys, num_classes, settings.l2);
        loss = l;
        grad = g;
    }

    // fold standardization into the stored weights so prediction sees raw
    // features: w'_j = w_j / sd_j, b' = b - sum_j w_j * mean_j / sd_j
    let mut weights = Vec::with_capacity(num_classes);
    for c in 0..num_classes {
        let row = &params[c * stride..(c + 1) * stride];
        let mut folded = vec![0.0; stride];
        folded[0] = row[0];
        for j in 0..dim {
            folded[j + 1] = row[j + 1] / sd[j];
            folded[0] -= row[j + 1] * mean[j] / sd[j];
        }
        weights.push(folded);
    }
    Ok((
        ClassifierModel {
            weights,
            num_classes,
            feature_dim: dim,
        },
        trace,
    ))
}

/// Class-membership probabilities for one sample.
pub fn predict_proba(model: &ClassifierModel, features: &[f64]) -> Result<ProbVector> {
    if features.len() != model.feature_dim {
        return Err(Error::invalid(format!(
            "feature dimension mismatch: {} vs {}",
            features.len(),
            model.feature_dim
        )));
    }
    let mut logits = Vec::with_capacity(model.num_classes);
    for row in &model.weights {
        let mut t = row[0];
        for (j, &x) in features.iter().enumerate() {
            t += row[j + 1] * x;
        }
        logits.push(t);
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for t in logits.iter_mut() {
        *t = (*t - max).exp();
        z += *t;
    }
    let p: Vec<f64> = logits.into_iter().map(|t| t / z).collect();
    ProbVector::new(p)
}

/// Predicted class label (argmax probability, first index on ties).
pub fn predict_label(model: &ClassifierModel, features: &[f64]) -> Result<usize> {
    Ok(predict_proba(model, features)?.argmax())
}

/// Shannon entropy `-sum p_i ln p_i`, with `0 ln 0 := 0`.
///
/// Probabilities are clamped to `[1e-12, 1]` before the log. The result lies
/// in `[0, ln num_classes]`.
pub fn raw_entropy(p: &ProbVector) -> f64 {
    let mut h = 0.0;
    for &v in p.values() {
        if v > 0.0 {
            h -= v * v.max(1e-12).ln();
        }
    }
    h.max(0.0)
}

/// Entropy normalized to `[0, 1]` by dividing by `ln num_classes`.
pub fn normalized_entropy(p: &ProbVector, num_classes: usize) -> Result<f64> {
    if num_classes < 2 {
        return Err(Error::invalid("normalized entropy needs >= 2 classes"));
    }
    let e = raw_entropy(p) / (num_classes as f64).ln();
    Ok(e.clamp(0.0, 1.0))
}

/// F1 averaging choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum F1Averaging {
    /// F1 of a single designated positive class.
    Binary { positive: usize },
    /// Unweighted mean of per-class F1 over all `num_classes` classes;
    /// a class absent from both predictions and truths contributes 0.
    Macro,
}

/// F1 score of predictions against truths.
pub fn f1_score(
    predicted: &[usize],
    truth: &[usize],
    num_classes: usize,
    averaging: F1Averaging,
) -> Result<f64> {
    if predicted.is_empty() || predicted.len() != truth.len() {
        return Err(Error::invalid(format!(
            "need matching non-empty label vectors, got {}/{}",
            predicted.len(),
            truth.len()
        )));
    }
    let class_f1 = |positive: usize| -> f64 {
        let mut tp = 0usize;
        let mut fp = 0usize;
        let mut fn_ = 0usize;
        for (&p, &t) in predicted.iter().zip(truth) {
            match (p == positive, t == positive) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
        let denom = 2 * tp + fp + fn_;
        if denom == 0 {
            0.0
        } else {
            2.0 * tp as f64 / denom as f64
        }
    };
    match averaging {
        F1Averaging::Binary { positive } => {
            if positive >= num_classes {
                return Err(Error::invalid(format!(
                    "positive class {positive} outside [0, {num_classes})"
                )));
            }
            Ok(class_f1(positive))
        }
        F1Averaging::Macro => {
            let total: f64 = (0..num_classes).map(class_f1).sum();
            Ok(total / num_classes as f64)
        }
    }
}
