//! Noise-function estimation from golden-labeled data, and beta tuning.
//!
//! Every (sample, labeler) pair in a golden set yields a record
//! `(e, a, correct)`. Fitting a logistic regression of `incorrect` on
//! `(e, a)` gives an estimate of the noise function; the noise bound beta is
//! then chosen by holdout search: for each candidate the joint selector picks
//! queries from one part of the golden set, a classifier is trained on the
//! resulting (noisy) labels, and the remaining part scores it.
//!
//! Calibration simulations use bernoulli corruption: under a hard threshold,
//! correctness is a deterministic step function of `(e, a)` and the logistic
//! fit degenerates.

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::ClassifierModel;
use crate::domain::{ALConfig, Dataset, EntropyTable, LabelerPanel};
use crate::engine::{evaluate_f1, initial_split, resolve_panel};
use crate::noise::{corrupt_label, CorruptionRule, NoiseSpec};
use crate::sampling::olas_select;
use crate::{derive_seed, seeded_rng, Error, Result};

/// One golden-set observation: sample entropy, labeler accuracy, and whether
/// the labeler's answer matched the true label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoldenRecord {
    pub e: f64,
    pub a: f64,
    pub correct: bool,
}

/// Fitted logistic noise model with its training loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseFit {
    /// `(w0, w_e, w_a)` of `P(incorrect) = sigmoid(w0 + w_e*e + w_a*a)`.
    pub coefficients: (f64, f64, f64),
    /// Mean negative log-likelihood at the fitted coefficients.
    pub log_loss: f64,
}

/// Mean F1 achieved by one candidate beta in the holdout search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaCell {
    pub beta: f64,
    pub mean_f1: f64,
}

/// Outcome of the full calibration pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub coefficients: (f64, f64, f64),
    pub train_log_loss: f64,
    pub beta_star: f64,
    pub per_beta_f1: Vec<BetaCell>,
}

/// Simulate every (sample, labeler) pair of the golden set once.
///
/// Entropies come from the supplied classifier; correctness comes from
/// corrupting the true label under `noise` and `rule`.
pub fn build_golden_records<R: Rng + ?Sized>(
    golden: &Dataset,
    panel: &LabelerPanel,
    model: &ClassifierModel,
    noise: &NoiseSpec,
    rule: &CorruptionRule,
    rng: &mut R,
) -> Result<Vec<GoldenRecord>> {
    let mut records = Vec::with_capacity(golden.len() * panel.len());
    for sample in &golden.samples {
        let true_label = sample.true_label.ok_or_else(|| {
            Error::invalid(format!("golden sample {} has no true label", sample.id))
        })?;
        let p = crate::classifier::predict_proba(model, &sample.features)?;
        let e = crate::classifier::normalized_entropy(&p, golden.num_classes)?;
        for i in 0..panel.len() {
            let a = panel.accuracy(i);
            let eps = noise.eval(a, e)?;
            let (observed, _) = corrupt_label(true_label, eps, rule, golden.num_classes, rng);
            records.push(GoldenRecord {
                e,
                a,
                correct: observed == true_label,
            });
        }
    }
    Ok(records)
}

/// Mean negative log-likelihood of `incorrect ~ sigmoid(w . (1, e, a))` and
/// its gradient.
pub fn logistic_nll_and_grad(coeffs: &[f64; 3], records: &[GoldenRecord]) -> (f64, [f64; 3]) {
    let n = records.len() as f64;
    let mut nll = 0.0;
    let mut grad = [0.0; 3];
    for r in records {
        let t = coeffs[0] + coeffs[1] * r.e + coeffs[2] * r.a;
        let y = if r.correct { 0.0 } else { 1.0 };
        // ln(1 + e^t) computed stably
        let softplus = t.max(0.0) + (-t.abs()).exp().ln_1p();
        nll += (softplus - y * t) / n;
        let p = if t >= 0.0 {
            1.0 / (1.0 + (-t).exp())
        } else {
            let et = t.exp();
            et / (1.0 + et)
        };
        let delta = (p - y) / n;
        grad[0] += delta;
        grad[1] += delta * r.e;
        grad[2] += delta * r.a;
    }
    (nll, grad)
}

const LOGISTIC_ITERATIONS: usize = 2000;
const LOGISTIC_LEARNING_RATE: f64 = 1.0;

/// Maximum-likelihood logistic fit of the noise function.
///
/// Deterministic (zero initialization, fixed iteration count with step
/// halving). Errors when every record has the same outcome, which happens
/// with threshold-mode data; generate records in bernoulli mode instead.
pub fn fit_noise_logistic(records: &[GoldenRecord]) -> Result<NoiseFit> {
    if records.is_empty() {
        return Err(Error::invalid("no golden records"));
    }
    let incorrect = records.iter().filter(|r| !r.correct).count();
    if incorrect == 0 || incorrect == records.len() {
        return Err(Error::invalid(
            "all golden records share one outcome; the logistic fit is degenerate \
             (generate records with bernoulli corruption)",
        ));
    }
    let mut coeffs = [0.0f64; 3];
    let mut lr = LOGISTIC_LEARNING_RATE;
    let (mut nll, mut grad) = logistic_nll_and_grad(&coeffs, records);
    for _ in 0..LOGISTIC_ITERATIONS {
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = [
                coeffs[0] - lr * grad[0],
                coeffs[1] - lr * grad[1],
                coeffs[2] - lr * grad[2],
            ];
            let (cand_nll, cand_grad) = logistic_nll_and_grad(&candidate, records);
            if cand_nll <= nll {
                coeffs = candidate;
                nll = cand_nll;
                grad = cand_grad;
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(NoiseFit {
        coefficients: (coeffs[0], coeffs[1], coeffs[2]),
        log_loss: nll,
    })
}

/// Holdout fraction of the golden set used to score each beta candidate.
const TUNE_HOLDOUT_FRACTION: f64 = 0.3;

/// Evaluate one (beta, replication) cell of the tuning grid.
fn tune_cell(
    golden: &Dataset,
    template: &ALConfig,
    sim_noise: &NoiseSpec,
    beta: f64,
    cell_seed: u64,
) -> Result<f64> {
    let mut rng = seeded_rng(cell_seed);
    let panel = resolve_panel(&template.panel, &mut rng)?;
    let effective =
        panel.truncate_to_budget(template.budget.unwrap_or(panel.total_capacity()))?;
    let state = initial_split(
        golden,
        TUNE_HOLDOUT_FRACTION,
        template.initial_fraction,
        rng.next_u64(),
    )?;
    let mut xs: Vec<Vec<f64>> = Vec::new();
    let mut ys: Vec<usize> = Vec::new();
    for (&id, &y) in &state.labeled {
        xs.push(golden.sample(id).unwrap().features.clone());
        ys.push(y);
    }
    let model = crate::classifier::fit(
        &xs,
        &ys,
        golden.num_classes,
        &template.classifier,
        rng.next_u64(),
    )?;

    let mut scores = Vec::with_capacity(state.unlabeled.len());
    for &id in &state.unlabeled {
        let s = golden.sample(id).unwrap();
        let p = crate::classifier::predict_proba(&model, &s.features)?;
        scores.push((
            id,
            crate::classifier::normalized_entropy(&p, golden.num_classes)?,
        ));
    }
    let table = EntropyTable::from_scores(scores)?;
    let plan = olas_select(&table, &effective, &template.noise, beta)?;

    let rule = match template.corruption {
        crate::noise::CorruptionMode::Threshold => CorruptionRule::threshold(template.alpha)?,
        crate::noise::CorruptionMode::Bernoulli => CorruptionRule::bernoulli(),
    };
    for qa in &plan.assignments {
        let sample = golden.sample(qa.sample_id).unwrap();
        let eps = sim_noise.eval(effective.accuracy(qa.labeler), qa.entropy)?;
        let (observed, _) = corrupt_label(
            sample.true_label.unwrap(),
            eps,
            &rule,
            golden.num_classes,
            &mut rng,
        );
        xs.push(sample.features.clone());
        ys.push(observed);
    }
    let final_model = crate::classifier::fit(
        &xs,
        &ys,
        golden.num_classes,
        &template.classifier,
        rng.next_u64(),
    )?;
    evaluate_f1(golden, &final_model, &state.test)
}

/// Holdout search for the noise bound.
///
/// For each grid value, the joint selector runs on 70% of the golden set
/// (using `template.noise` for admissibility), labels are simulated with
/// `sim_noise`, a classifier is trained on the result, and mean F1 over
/// `replications` seeded runs on the remaining 30% scores the candidate.
/// Ties go to the smaller beta, which admits less noise.
pub fn tune_beta(
    golden: &Dataset,
    grid: &[f64],
    template: &ALConfig,
    sim_noise: &NoiseSpec,
    replications: usize,
    seed: u64,
) -> Result<(f64, Vec<BetaCell>)> {
    if grid.is_empty() {
        return Err(Error::invalid("empty beta grid"));
    }
    for &b in grid {
        if !(0.0..=1.0).contains(&b) || !b.is_finite() {
            return Err(Error::invalid(format!("beta {b} outside [0, 1]")));
        }
    }
    if golden.len() < 30 {
        return Err(Error::invalid(format!(
            "golden set has {} samples; need at least 30",
            golden.len()
        )));
    }
    if replications < 1 {
        return Err(Error::invalid("need at least one replication"));
    }
    let cells: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|bi| (0..replications).map(move |r| (bi, r)))
        .collect();
    let f1s: Result<Vec<(usize, f64)>> = cells
        .par_iter()
        .map(|&(bi, r)| {
            let cell_seed = derive_seed(derive_seed(seed, bi as u64), r as u64);
            tune_cell(golden, template, sim_noise, grid[bi], cell_seed).map(|f1| (bi, f1))
        })
        .collect();
    let mut sums = vec![0.0; grid.len()];
    for (bi, f1) in f1s? {
        sums[bi] += f1;
    }
    let table: Vec<BetaCell> = grid
        .iter()
        .zip(&sums)
        .map(|(&beta, &s)| BetaCell {
            beta,
            mean_f1: s / replications as f64,
        })
        .collect();
    let mut best = 0usize;
    for (i, cell) in table.iter().enumerate() {
        if cell.mean_f1 > table[best].mean_f1
            || (cell.mean_f1 == table[best].mean_f1 && cell.beta < table[best].beta)
        {
            best = i;
        }
    }
    Ok((table[best].beta, table))
}

/// Full calibration pipeline: simulate golden records under the true noise
/// (bernoulli corruption), fit the logistic noise estimate, then tune beta
/// with the estimate driving selection and the true noise driving the
/// simulated oracles.
pub fn calibrate(
    golden: &Dataset,
    template: &ALConfig,
    true_noise: &NoiseSpec,
    grid: &[f64],
    replications: usize,
    seed: u64,
) -> Result<CalibrationResult> {
    let mut rng = seeded_rng(derive_seed(seed, 0xCA11));
    let panel = resolve_panel(&template.panel, &mut rng)?;
    let state = initial_split(
        golden,
        template.test_fraction,
        template.initial_fraction,
        rng.next_u64(),
    )?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&id, &y) in &state.labeled {
        xs.push(golden.sample(id).unwrap().features.clone());
        ys.push(y);
    }
    let model = crate::classifier::fit(
        &xs,
        &ys,
        golden.num_classes,
        &template.classifier,
        rng.next_u64(),
    )?;
    let records = build_golden_records(
        golden,
        &panel,
        &model,
        true_noise,
        &CorruptionRule::bernoulli(),
        &mut rng,
    )?;
    let fit = fit_noise_logistic(&records)?;
    let (w0, w_e, w_a) = fit.coefficients;
    let mut tuned = template.clone();
    tuned.noise = NoiseSpec::Estimated { w0, w_e, w_a };
    let (beta_star, per_beta_f1) =
        tune_beta(golden, grid, &tuned, true_noise, replications, seed)?;
    Ok(CalibrationResult {
        coefficients: fit.coefficients,
        train_log_loss: fit.log_loss,
        beta_star,
        per_beta_f1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::ClassifierSettings;
    use crate::data::synth_dataset;
    use crate::domain::{validate_panel, LabelerProfile, PanelSpec, Sample, SampleId, Strategy};
    use crate::noise::{noise_model1, validate_noise_function, CorruptionMode};
    use crate::seeded_rng;

    fn panel(accs: &[f64]) -> LabelerPanel {
        let profiles: Vec<LabelerProfile> = accs
            .iter()
            .map(|&accuracy| LabelerProfile {
                accuracy,
                capacity: 1,
            })
            .collect();
        validate_panel(&profiles).unwrap()
    }

    fn golden_blobs(seed: u64, per_class: usize) -> Dataset {
        synth_dataset(2, per_class, 2, 1.0, &mut seeded_rng(seed)).unwrap()
    }

    fn fitted_model(ds: &Dataset) -> ClassifierModel {
        let xs: Vec<Vec<f64>> = ds.samples.iter().map(|s| s.features.clone()).collect();
        let ys: Vec<usize> = ds.samples.iter().map(|s| s.true_label.unwrap()).collect();
        crate::classifier::fit(&xs, &ys, 2, &ClassifierSettings::default(), 0).unwrap()
    }

    #[test]
    fn record_count_is_cartesian() {
        let ds = golden_blobs(1, 5);
        let model = fitted_model(&ds);
        let records = build_golden_records(
            &ds,
            &panel(&[0.9, 0.7, 0.5]),
            &model,
            &NoiseSpec::Model1,
            &CorruptionRule::bernoulli(),
            &mut seeded_rng(2),
        )
        .unwrap();
        assert_eq!(records.len(), 10 * 3);
    }

    #[test]
    fn perfect_labeler_records_are_always_correct() {
        let ds = golden_blobs(3, 25);
        let model = fitted_model(&ds);
        let records = build_golden_records(
            &ds,
            &panel(&[1.0, 0.5]),
            &model,
            &NoiseSpec::Model2,
            &CorruptionRule::bernoulli(),
            &mut seeded_rng(4),
        )
        .unwrap();
        // records come in (labeler 0, labeler 1) pairs per sample
        assert!(records.iter().step_by(2).all(|r| r.correct));
        assert!(records.iter().skip(1).step_by(2).any(|r| !r.correct));
    }

    #[test]
    fn missing_true_label_is_rejected() {
        let mut ds = golden_blobs(5, 5);
        ds.samples[3].true_label = None;
        let model = fitted_model(&golden_blobs(5, 5));
        let err = build_golden_records(
            &ds,
            &panel(&[0.8]),
            &model,
            &NoiseSpec::Model1,
            &CorruptionRule::bernoulli(),
            &mut seeded_rng(6),
        )
        .unwrap_err();
        assert!(err.to_string().contains("no true label"));
    }

    #[test]
    fn bucketed_incorrect_rates_match_the_noise_model() {
        // three fixed feature vectors -> three entropy levels; the per-bucket
        // incorrect rate is binomial with mean e * (1 - a)
        let reps = 2000;
        let mut samples = Vec::new();
        for i in 0..(3 * reps) as u64 {
            let x = match i % 3 {
                0 => 0.2,
                1 => 1.0,
                _ => 3.0,
            };
            samples.push(Sample {
                id: SampleId(i),
                features: vec![x],
                true_label: Some(0),
            });
        }
        let ds = Dataset::new(samples, 2, 1, None).unwrap();
        let model = ClassifierModel {
            weights: vec![vec![0.0, 0.0], vec![-2.0, 1.0]],
            num_classes: 2,
            feature_dim: 1,
        };
        let labelers = panel(&[1.0, 0.8, 0.6]);
        let records = build_golden_records(
            &ds,
            &labelers,
            &model,
            &NoiseSpec::Model1,
            &CorruptionRule::bernoulli(),
            &mut seeded_rng(7),
        )
        .unwrap();
        let mut groups: std::collections::BTreeMap<(u64, u64), (usize, usize)> =
            std::collections::BTreeMap::new();
        for r in &records {
            let key = ((r.e * 1e9) as u64, (r.a * 1e9) as u64);
            let entry = groups.entry(key).or_insert((0, 0));
            entry.0 += 1;
            entry.1 += usize::from(!r.correct);
        }
        assert_eq!(groups.len(), 9);
        for (&(e_key, a_key), &(n, wrong)) in &groups {
            let e = e_key as f64 / 1e9;
            let a = a_key as f64 / 1e9;
            let eps = noise_model1(a, e).unwrap();
            let rate = wrong as f64 / n as f64;
            let tol = 3.0 * (eps * (1.0 - eps) / n as f64).sqrt() + 1e-9;
            assert!(
                (rate - eps).abs() <= tol,
                "bucket (e={e:.3}, a={a:.3}): rate {rate:.4} vs eps {eps:.4}"
            );
        }
    }

    fn synthetic_records(n: usize, seed: u64) -> Vec<GoldenRecord> {
        // e, a uniform; incorrect with probability e * (1 - a)
        let mut rng = seeded_rng(seed);
        (0..n)
            .map(|_| {
                let e: f64 = rng.random_range(0.0..=1.0);
                let a: f64 = rng.random_range(0.0..=1.0);
                let wrong = rng.random::<f64>() < e * (1.0 - a);
                GoldenRecord {
                    e,
                    a,
                    correct: !wrong,
                }
            })
            .collect()
    }

    #[test]
    fn fitted_signs_match_the_generator() {
        let records = synthetic_records(5000, 8);
        let fit = fit_noise_logistic(&records).unwrap();
        let (_, w_e, w_a) = fit.coefficients;
        assert!(w_e > 0.0, "w_e = {w_e}");
        assert!(w_a < 0.0, "w_a = {w_a}");
        assert!(fit.log_loss.is_finite());
    }

    #[test]
    fn coin_labels_give_near_zero_slopes() {
        let mut rng = seeded_rng(9);
        let records: Vec<GoldenRecord> = (0..5000)
            .map(|_| GoldenRecord {
                e: rng.random_range(0.0..=1.0),
                a: rng.random_range(0.0..=1.0),
                correct: rng.random::<bool>(),
            })
            .collect();
        let fit = fit_noise_logistic(&records).unwrap();
        let (_, w_e, w_a) = fit.coefficients;
        assert!(w_e.abs() <= 0.1, "w_e = {w_e}");
        assert!(w_a.abs() <= 0.1, "w_a = {w_a}");
    }

    #[test]
    fn duplicated_records_leave_coefficients_unchanged() {
        let records = synthetic_records(500, 10);
        let doubled: Vec<GoldenRecord> = records.iter().chain(records.iter()).copied().collect();
        let a = fit_noise_logistic(&records).unwrap();
        let b = fit_noise_logistic(&doubled).unwrap();
        assert_eq!(a.coefficients, b.coefficients);
    }

    #[test]
    fn single_outcome_records_are_rejected() {
        let all_correct: Vec<GoldenRecord> = (0..50)
            .map(|i| GoldenRecord {
                e: i as f64 / 50.0,
                a: 0.9,
                correct: true,
            })
            .collect();
        let err = fit_noise_logistic(&all_correct).unwrap_err();
        assert!(err.to_string().contains("bernoulli"), "{err}");
    }

    #[test]
    fn logistic_gradient_matches_finite_differences() {
        let records = synthetic_records(200, 11);
        let h = 1e-5;
        let mut rng = seeded_rng(12);
        for _ in 0..10 {
            let coeffs = [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ];
            let (_, grad) = logistic_nll_and_grad(&coeffs, &records);
            for k in 0..3 {
                let mut up = coeffs;
                up[k] += h;
                let mut down = coeffs;
                down[k] -= h;
                let (nll_up, _) = logistic_nll_and_grad(&up, &records);
                let (nll_down, _) = logistic_nll_and_grad(&down, &records);
                let fd = (nll_up - nll_down) / (2.0 * h);
                assert!(
                    (fd - grad[k]).abs() <= 1e-6,
                    "coeff {k}: fd {fd} vs grad {}",
                    grad[k]
                );
            }
        }
    }

    #[test]
    fn estimated_noise_rmse_against_the_generator() {
        let records = synthetic_records(10_000, 13);
        let fit = fit_noise_logistic(&records).unwrap();
        let (w0, w_e, w_a) = fit.coefficients;
        let mut sq = 0.0;
        let mut count = 0;
        for i in 0..=10 {
            for j in 0..=10 {
                let e = i as f64 / 10.0;
                let a = j as f64 / 10.0;
                let est = crate::noise::estimated_noise((w0, w_e, w_a), a, e);
                let truth = e * (1.0 - a);
                sq += (est - truth) * (est - truth);
                count += 1;
            }
        }
        let rmse = (sq / count as f64).sqrt();
        assert!(rmse <= 0.12, "rmse {rmse}");
        // monotone fit also passes the validity sweep
        assert!(w_e >= 0.0 && w_a <= 0.0);
        let report = validate_noise_function(
            |a, e| crate::noise::estimated_noise((w0, w_e, w_a), a, e),
            0.01,
        );
        assert!(report.is_valid);
    }

    fn template() -> ALConfig {
        ALConfig {
            cycles: 1,
            budget: None,
            beta: 0.2,
            alpha: 0.2,
            noise: NoiseSpec::Model1,
            corruption: CorruptionMode::Bernoulli,
            strategy: Strategy::Olas,
            panel: PanelSpec::Uniform {
                labelers: 4,
                capacity: 4,
                accuracy_low: 0.5,
                accuracy_high: 0.95,
            },
            seed: 0,
            test_fraction: 0.2,
            initial_fraction: 0.16,
            classifier: ClassifierSettings::default(),
        }
    }

    #[test]
    fn singleton_grid_is_forced() {
        let golden = golden_blobs(14, 40);
        let (beta, table) =
            tune_beta(&golden, &[0.2], &template(), &NoiseSpec::Model1, 2, 99).unwrap();
        assert_eq!(beta, 0.2);
        assert_eq!(table.len(), 1);
    }

    #[test]
    fn degenerate_beta_zero_loses_to_beta_one() {
        // all noise values are positive (no perfect labeler), so beta = 0
        // selects nothing and trains on the initial set alone
        let golden = golden_blobs(15, 60);
        let mut cfg = template();
        cfg.panel = PanelSpec::Explicit(vec![
            LabelerProfile {
                accuracy: 0.9,
                capacity: 15,
            },
            LabelerProfile {
                accuracy: 0.85,
                capacity: 15,
            },
        ]);
        let (beta, table) =
            tune_beta(&golden, &[0.0, 1.0], &cfg, &NoiseSpec::Model1, 4, 7).unwrap();
        assert_eq!(beta, 1.0, "{table:?}");
    }

    #[test]
    fn tuning_is_deterministic() {
        let golden = golden_blobs(16, 40);
        let grid = [0.1, 0.3];
        let a = tune_beta(&golden, &grid, &template(), &NoiseSpec::Model1, 3, 5).unwrap();
        let b = tune_beta(&golden, &grid, &template(), &NoiseSpec::Model1, 3, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tune_beta_rejects_bad_inputs() {
        let golden = golden_blobs(17, 40);
        assert!(tune_beta(&golden, &[], &template(), &NoiseSpec::Model1, 2, 0).is_err());
        assert!(tune_beta(&golden, &[1.5], &template(), &NoiseSpec::Model1, 2, 0).is_err());
        let tiny = golden_blobs(18, 10);
        assert!(tune_beta(&tiny, &[0.2], &template(), &NoiseSpec::Model1, 2, 0).is_err());
    }

    #[test]
    fn calibrate_pipeline_returns_argmax_beta() {
        let golden = golden_blobs(19, 60);
        let grid: Vec<f64> = (1..=5).map(|i| i as f64 * 0.1).collect();
        let result = calibrate(&golden, &template(), &NoiseSpec::Model1, &grid, 2, 77).unwrap();
        assert_eq!(result.per_beta_f1.len(), grid.len());
        let best = result
            .per_beta_f1
            .iter()
            .map(|c| c.mean_f1)
            .fold(f64::NEG_INFINITY, f64::max);
        let chosen = result
            .per_beta_f1
            .iter()
            .find(|c| c.beta == result.beta_star)
            .unwrap();
        assert!(chosen.mean_f1 >= best - 1e-12);
        let (_, w_e, w_a) = result.coefficients;
        assert!(w_e > 0.0 && w_a < 0.0, "w_e={w_e}, w_a={w_a}");
    }
}
