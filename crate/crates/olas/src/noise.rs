//! Noise functions and the label-corruption simulator.
//!
//! A noise function `eps(a, e)` maps labeler accuracy `a` and sample entropy
//! `e` (both in `[0, 1]`) to the label-noise level in `[0, 1]`. A valid noise
//! function is non-increasing in `a` and non-decreasing in `e`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which noise function to use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpec {
    /// `eps(a, e) = e * (1 - a)`.
    Model1,
    /// Piecewise power-law function, steep near the entropy extremes.
    Model2,
    /// Logistic fit from golden-labeled data: `sigmoid(w0 + w_e*e + w_a*a)`.
    Estimated { w0: f64, w_e: f64, w_a: f64 },
}

impl NoiseSpec {
    /// Evaluate the noise level for accuracy `a` and entropy `e`.
    ///
    /// Errors if either argument falls outside `[0, 1]` (Model 1 / Model 2;
    /// the estimated form is defined everywhere).
    pub fn eval(&self, a: f64, e: f64) -> Result<f64> {
        match self {
            NoiseSpec::Model1 => noise_model1(a, e),
            NoiseSpec::Model2 => noise_model2(a, e),
            NoiseSpec::Estimated { w0, w_e, w_a } => Ok(estimated_noise((*w0, *w_e, *w_a), a, e)),
        }
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

/// Noise model 1: `eps(a, e) = e * (1 - a)`.
pub fn noise_model1(a: f64, e: f64) -> Result<f64> {
    check_unit("accuracy", a)?;
    check_unit("entropy", e)?;
    Ok(e * (1.0 - a))
}

/// `(1 - a^p)^(1/p)` for `p` in (0, 1], computed in log space.
///
/// The `p == 1` shortcut keeps the branch boundary value `1 - a` exact.
fn one_minus_pow_root(a: f64, p: f64) -> f64 {
    if p == 1.0 {
        return 1.0 - a;
    }
    let x = -(p * a.ln()).exp_m1(); // 1 - a^p, without cancellation
    (x.ln() / p).exp()
}

/// Noise model 2: a piecewise power-law in entropy.
///
/// For `e <= 0.5` the value is `(1 - a^(2e))^(1/(2e))`; for `e > 0.5` it is
/// `1 - (1 - (1-a)^(2(1-e)))^(1/(2(1-e)))`. The limits at the entropy
/// endpoints (0 at `e = 0`, 1 at `e = 1`) and at the accuracy endpoints are
/// returned exactly rather than evaluated through the formula, which is
/// indeterminate there.
pub fn noise_model2(a: f64, e: f64) -> Result<f64> {
    check_unit("accuracy", a)?;
    check_unit("entropy", e)?;
    if a == 1.0 {
        return Ok(0.0);
    }
    if e == 0.0 {
        return Ok(0.0);
    }
    if e == 1.0 {
        return Ok(1.0);
    }
    if a == 0.0 {
        return Ok(1.0);
    }
    if e <= 0.5 {
        Ok(one_minus_pow_root(a, 2.0 * e))
    } else {
        Ok(1.0 - one_minus_pow_root(1.0 - a, 2.0 * (1.0 - e)))
    }
}

/// Numerically stable logistic function.
fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let et = t.exp();
        et / (1.0 + et)
    }
}

/// Estimated noise function: probability that a label is incorrect,
/// `sigmoid(w0 + w_e*e + w_a*a)`.
pub fn estimated_noise(coeffs: (f64, f64, f64), a: f64, e: f64) -> f64 {
    let (w0, w_e, w_a) = coeffs;
    sigmoid(w0 + w_e * e + w_a * a)
}

/// One violation found by [`validate_noise_function`].
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseViolation {
    /// Value outside `[0, 1]` at `(a, e)`.
    Range { a: f64, e: f64, value: f64 },
    /// Value increased when accuracy increased.
    IncreasingInAccuracy { a: f64, e: f64 },
    /// Value decreased when entropy increased.
    DecreasingInEntropy { a: f64, e: f64 },
}

/// Grid-sweep report for a candidate noise function.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseValidityReport {
    pub is_valid: bool,
    pub violations: Vec<NoiseViolation>,
}

const MONOTONE_TOL: f64 = 1e-9;

/// Sweep a function over the `[0, 1]^2` grid with the given step and check
/// the noise-function contract: range within `[0, 1]`, non-increasing in
/// accuracy, non-decreasing in entropy.
pub fn validate_noise_function<F>(f: F, step: f64) -> NoiseValidityReport
where
    F: Fn(f64, f64) -> f64,
{
    let n = (1.0 / step).round() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(1.0)).collect();
    let mut violations = Vec::new();
    for &e in &grid {
        for &a in &grid {
            let v = f(a, e);
            if !v.is_finite() || v < -MONOTONE_TOL || v > 1.0 + MONOTONE_TOL {
                violations.push(NoiseViolation::Range { a, e, value: v });
            }
        }
    }
    for &e in &grid {
        for w in grid.windows(2) {
            let (a0, a1) = (w[0], w[1]);
            if f(a1, e) > f(a0, e) + MONOTONE_TOL {
                violations.push(NoiseViolation::IncreasingInAccuracy { a: a1, e });
            }
        }
    }
    for &a in &grid {
        for w in grid.windows(2) {
            let (e0, e1) = (w[0], w[1]);
            if f(a, e1) < f(a, e0) - MONOTONE_TOL {
                violations.push(NoiseViolation::DecreasingInEntropy { a, e: e1 });
            }
        }
    }
    NoiseValidityReport {
        is_valid: violations.is_empty(),
        violations,
    }
}

/// How a noise value turns into an actual wrong label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionMode {
    /// The label is wrong iff `eps >= alpha`.
    Threshold,
    /// The label is wrong with probability `eps`.
    Bernoulli,
}

/// Corruption rule: mode plus the threshold used in threshold mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorruptionRule {
    pub mode: CorruptionMode,
    pub alpha: f64,
}

impl CorruptionRule {
    pub fn threshold(alpha: f64) -> Result<Self> {
        check_unit("alpha", alpha)?;
        Ok(CorruptionRule {
            mode: CorruptionMode::Threshold,
            alpha,
        })
    }

    pub fn bernoulli() -> Self {
        CorruptionRule {
            mode: CorruptionMode::Bernoulli,
            alpha: 0.0,
        }
    }
}

/// Simulate one oracle response for a query with noise level `eps`.
///
/// In threshold mode the label is corrupted iff `eps >= alpha`; the rng is
/// never consulted for the decision. In bernoulli mode the label is corrupted
/// with probability `eps`. A corrupted label is drawn uniformly from the
/// `num_classes - 1` other classes.
pub fn corrupt_label<R: Rng + ?Sized>(
    true_label: usize,
    eps: f64,
    rule: &CorruptionRule,
    num_classes: usize,
    rng: &mut R,
) -> (usize, bool) {
    debug_assert!(num_classes >= 2 && true_label < num_classes);
    debug_assert!((0.0..=1.0).contains(&eps));
    let corrupted = match rule.mode {
        CorruptionMode::Threshold => eps >= rule.alpha,
        CorruptionMode::Bernoulli => rng.random::<f64>() < eps,
    };
    if !corrupted {
        return (true_label, false);
    }
    let k = rng.random_range(0..num_classes - 1);
    let observed = if k >= true_label { k + 1 } else { k };
    (observed, true)
}
