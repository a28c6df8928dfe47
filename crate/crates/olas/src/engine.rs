//! The cyclic active-learning loop: split, train, score, select, assign,
//! corrupt, update, measure.
//!
//! One experiment is sequential (each cycle depends on the previous model);
//! distinct replications run in parallel in the benchmark harness, each with
//! its own derived RNG stream.

use std::collections::BTreeMap;

use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;

use crate::assignment::{optimal_assignment, random_assignment};
use crate::classifier::{
    self, ClassifierModel, F1Averaging, fit, normalized_entropy, predict_proba,
};
use crate::domain::{
    ALConfig, CycleRecord, Dataset, EntropyTable, LabelerPanel, PanelSpec, PoolState,
    QueryOutcome, SampleId, Strategy, validate_panel,
};
use crate::noise::{corrupt_label, CorruptionMode, CorruptionRule};
use crate::sampling::{entropy_sampling, olas_select, random_sampling};
use crate::{seeded_rng, Error, Result};

/// Seeded stratified split into test / initially-labeled / unlabeled pools.
///
/// Both fractions apply to the whole dataset; per-class counts follow
/// largest-remainder allocation so the global counts are exact. The initial
/// labeled set carries true (uncorrupted) labels. Errors if some class is
/// still absent from the initial labeled set after 10 reshuffles.
pub fn initial_split(
    dataset: &Dataset,
    test_fraction: f64,
    initial_fraction: f64,
    seed: u64,
) -> Result<PoolState> {
    if !(0.0..1.0).contains(&test_fraction)
        || !(0.0..1.0).contains(&initial_fraction)
        || test_fraction <= 0.0
        || initial_fraction <= 0.0
        || test_fraction + initial_fraction >= 1.0
    {
        return Err(Error::invalid(format!(
            "fractions test={test_fraction}, initial={initial_fraction} must be in (0, 1) and sum below 1"
        )));
    }
    for s in &dataset.samples {
        if s.true_label.is_none() {
            return Err(Error::invalid(format!(
                "sample {} has no true label; the split needs a fully labeled dataset",
                s.id
            )));
        }
    }
    let n = dataset.len();
    let test_target = (test_fraction * n as f64).round() as usize;
    let initial_target = (initial_fraction * n as f64).round() as usize;
    if test_target == 0 || initial_target == 0 {
        return Err(Error::invalid(
            "dataset too small: empty test or initial split",
        ));
    }

    for attempt in 0..10 {
        let mut rng = seeded_rng(crate::derive_seed(seed, attempt));
        let mut by_class: Vec<Vec<SampleId>> = vec![Vec::new(); dataset.num_classes];
        for s in &dataset.samples {
            by_class[s.true_label.unwrap()].push(s.id);
        }
        for ids in by_class.iter_mut() {
            shuffle_ids(ids, &mut rng);
        }
        let class_sizes: Vec<usize> = by_class.iter().map(|v| v.len()).collect();
        let test_quota = largest_remainder(&class_sizes, test_target);
        let mut test = Vec::new();
        let mut train_by_class: Vec<Vec<SampleId>> = Vec::with_capacity(by_class.len());
        for (ids, &q) in by_class.iter().zip(&test_quota) {
            test.extend_from_slice(&ids[..q]);
            train_by_class.push(ids[q..].to_vec());
        }
        let train_sizes: Vec<usize> = train_by_class.iter().map(|v| v.len()).collect();
        let initial_quota = largest_remainder(&train_sizes, initial_target);
        if initial_quota.iter().any(|&q| q == 0) {
            continue; // a class missing from the initial labeled set; reshuffle
        }
        let mut labeled = BTreeMap::new();
        let mut unlabeled = std::collections::BTreeSet::new();
        for (ids, &q) in train_by_class.iter().zip(&initial_quota) {
            for &id in &ids[..q] {
                labeled.insert(id, dataset.sample(id).unwrap().true_label.unwrap());
            }
            for &id in &ids[q..] {
                unlabeled.insert(id);
            }
        }
        let state = PoolState {
            labeled,
            unlabeled,
            test: test.into_iter().collect(),
            cycle: 0,
        };
        state.validate(dataset)?;
        return Ok(state);
    }
    Err(Error::invalid(
        "some class is absent from the initial labeled set; raise the initial fraction",
    ))
}

fn shuffle_ids<R: Rng + ?Sized>(ids: &mut [SampleId], rng: &mut R) {
    use rand::seq::SliceRandom;
    ids.shuffle(rng);
}

/// Proportional integer allocation reaching `target` exactly: floors first,
/// leftovers to the largest fractional parts (ties to the lower index).
fn largest_remainder(sizes: &[usize], target: usize) -> Vec<usize> {
    let total: usize = sizes.iter().sum();
    debug_assert!(target <= total);
    let mut quota: Vec<usize> = Vec::with_capacity(sizes.len());
    let mut fractions: Vec<(f64, usize)> = Vec::with_capacity(sizes.len());
    let mut assigned = 0usize;
    for (i, &s) in sizes.iter().enumerate() {
        let exact = target as f64 * s as f64 / total as f64;
        let floor = exact.floor() as usize;
        let floor = floor.min(s);
        quota.push(floor);
        assigned += floor;
        fractions.push((exact - floor as f64, i));
    }
    fractions.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut left = target - assigned;
    for &(_, i) in fractions.iter().cycle() {
        if left == 0 {
            break;
        }
        if quota[i] < sizes[i] {
            quota[i] += 1;
            left -= 1;
        }
    }
    quota
}

/// Draw `m` labeler accuracies i.i.d. uniform from `[low, high)`.
pub fn sample_labeler_accuracies<R: Rng + ?Sized>(
    m: usize,
    low: f64,
    high: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if m < 1 {
        return Err(Error::invalid("need at least one labeler"));
    }
    if !(0.0..=1.0).contains(&low) || !(0.0..=1.0).contains(&high) || low >= high {
        return Err(Error::invalid(format!(
            "accuracy range [{low}, {high}) invalid"
        )));
    }
    Ok((0..m).map(|_| rng.random_range(low..high)).collect())
}

/// Materialize a panel from its spec, drawing accuracies when required.
pub fn resolve_panel<R: Rng + ?Sized>(spec: &PanelSpec, rng: &mut R) -> Result<LabelerPanel> {
    match spec {
        PanelSpec::Explicit(profiles) => validate_panel(profiles),
        PanelSpec::Uniform {
            labelers,
            capacity,
            accuracy_low,
            accuracy_high,
        } => {
            if *capacity < 1 {
                return Err(Error::Config("labeler capacity must be >= 1".into()));
            }
            let accs = sample_labeler_accuracies(*labelers, *accuracy_low, *accuracy_high, rng)?;
            let profiles: Vec<crate::domain::LabelerProfile> = accs
                .into_iter()
                .map(|accuracy| crate::domain::LabelerProfile {
                    accuracy,
                    capacity: *capacity,
                })
                .collect();
            validate_panel(&profiles)
        }
    }
}

/// Default F1 averaging: the positive class for binary problems, macro
/// otherwise.
pub fn f1_averaging_for(num_classes: usize) -> F1Averaging {
    if num_classes == 2 {
        F1Averaging::Binary { positive: 1 }
    } else {
        F1Averaging::Macro
    }
}

/// Test-set F1 of a model over the given ids (ascending order).
pub fn evaluate_f1<'a, I>(dataset: &Dataset, model: &ClassifierModel, test_ids: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a SampleId>,
{
    let mut predicted = Vec::new();
    let mut truth = Vec::new();
    for id in test_ids {
        let s = dataset
            .sample(*id)
            .ok_or_else(|| Error::invalid(format!("unknown sample {id}")))?;
        predicted.push(classifier::predict_label(model, &s.features)?);
        truth.push(
            s.true_label
                .ok_or_else(|| Error::invalid(format!("sample {id} has no true label")))?,
        );
    }
    classifier::f1_score(
        &predicted,
        &truth,
        dataset.num_classes,
        f1_averaging_for(dataset.num_classes),
    )
}

fn corruption_rule(config: &ALConfig) -> Result<CorruptionRule> {
    match config.corruption {
        CorruptionMode::Threshold => CorruptionRule::threshold(config.alpha),
        CorruptionMode::Bernoulli => Ok(CorruptionRule::bernoulli()),
    }
}

fn refit(
    dataset: &Dataset,
    labeled: &BTreeMap<SampleId, usize>,
    config: &ALConfig,
    seed: u64,
) -> Result<ClassifierModel> {
    let mut xs = Vec::with_capacity(labeled.len());
    let mut ys = Vec::with_capacity(labeled.len());
    for (&id, &y) in labeled {
        xs.push(dataset.sample(id).unwrap().features.clone());
        ys.push(y);
    }
    fit(&xs, &ys, dataset.num_classes, &config.classifier, seed)
}

/// Selected queries for one cycle, in the deterministic labeling order:
/// `(sample id, entropy, labeler index)`.
fn plan_queries(
    table: &EntropyTable,
    panel: &LabelerPanel,
    config: &ALConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(SampleId, f64, usize)>> {
    let budget = panel.total_capacity();
    match config.strategy {
        Strategy::Olas => {
            let plan = olas_select(table, panel, &config.noise, config.beta)?;
            Ok(plan
                .assignments
                .into_iter()
                .map(|a| (a.sample_id, a.entropy, a.labeler))
                .collect())
        }
        Strategy::EsRla | Strategy::EsOla => {
            let ids = entropy_sampling(table, budget)?;
            let entropies: Vec<f64> = table
                .entries()
                .iter()
                .take(ids.len())
                .map(|(_, e)| *e)
                .collect();
            let labelers = match config.strategy {
                Strategy::EsRla => random_assignment(ids.len(), panel, rng)?,
                _ => optimal_assignment(&entropies, panel, &config.noise)?.pairs,
            };
            Ok(ids
                .into_iter()
                .zip(entropies)
                .zip(labelers)
                .map(|((id, e), l)| (id, e, l))
                .collect())
        }
        Strategy::RsRla | Strategy::RsOla => {
            let by_id: BTreeMap<SampleId, f64> = table.entries().iter().copied().collect();
            let pool: Vec<SampleId> = by_id.keys().copied().collect();
            let ids = random_sampling(&pool, budget, rng)?;
            match config.strategy {
                Strategy::RsRla => {
                    let labelers = random_assignment(ids.len(), panel, rng)?;
                    Ok(ids
                        .into_iter()
                        .zip(labelers)
                        .map(|(id, l)| (id, by_id[&id], l))
                        .collect())
                }
                _ => {
                    // optimal assignment wants the selected queries in
                    // descending entropy order (ties by ascending id)
                    let mut picked: Vec<(SampleId, f64)> =
                        ids.into_iter().map(|id| (id, by_id[&id])).collect();
                    picked.sort_by(|(ia, ea), (ib, eb)| {
                        eb.partial_cmp(ea).unwrap().then(ia.cmp(ib))
                    });
                    let entropies: Vec<f64> = picked.iter().map(|(_, e)| *e).collect();
                    let labelers = optimal_assignment(&entropies, panel, &config.noise)?.pairs;
                    Ok(picked
                        .into_iter()
                        .zip(labelers)
                        .map(|((id, e), l)| (id, e, l))
                        .collect())
                }
            }
        }
    }
}

/// Run one AL cycle: score the pool, select and assign queries, simulate the
/// oracles, move the queried ids into the labeled pool, refit, and measure
/// test F1.
pub fn run_cycle(
    dataset: &Dataset,
    state: &PoolState,
    model: &ClassifierModel,
    config: &ALConfig,
    panel: &LabelerPanel,
    rng: &mut ChaCha8Rng,
) -> Result<(PoolState, ClassifierModel, CycleRecord)> {
    let budget = config.budget.unwrap_or(panel.total_capacity());
    let effective = panel.truncate_to_budget(budget)?;
    let rule = corruption_rule(config)?;

    let queries = if state.unlabeled.is_empty() {
        Vec::new()
    } else {
        let mut scores = Vec::with_capacity(state.unlabeled.len());
        for &id in &state.unlabeled {
            let s = dataset.sample(id).unwrap();
            let p = predict_proba(model, &s.features)?;
            scores.push((id, normalized_entropy(&p, dataset.num_classes)?));
        }
        let table = EntropyTable::from_scores(scores)?;
        plan_queries(&table, &effective, config, rng)?
    };
    debug_assert!(queries.len() <= effective.total_capacity());

    let mut outcomes = Vec::with_capacity(queries.len());
    let mut new_state = state.clone();
    for (id, entropy, labeler) in queries {
        let eps = config.noise.eval(effective.accuracy(labeler), entropy)?;
        let true_label = dataset.sample(id).unwrap().true_label.unwrap();
        let (observed, corrupted) =
            corrupt_label(true_label, eps, &rule, dataset.num_classes, rng);
        if !new_state.unlabeled.remove(&id) {
            return Err(Error::invalid(format!("query {id} not in unlabeled pool")));
        }
        new_state.labeled.insert(id, observed);
        outcomes.push(QueryOutcome {
            sample_id: id,
            labeler,
            noise: eps,
            corrupted,
            observed_label: observed,
        });
    }
    new_state.cycle += 1;
    debug_assert!(new_state.validate(dataset).is_ok());

    let new_model = refit(dataset, &new_state.labeled, config, rng.next_u64())?;
    let test_f1 = evaluate_f1(dataset, &new_model, &new_state.test)?;
    let record = CycleRecord {
        cycle: new_state.cycle,
        queries: outcomes,
        test_f1,
    };
    Ok((new_state, new_model, record))
}

/// Run a full experiment: split, initial fit, then `cycles` sequential
/// [`run_cycle`] calls. Deterministic given the dataset, config, and rng
/// state.
pub fn run_experiment(
    dataset: &Dataset,
    config: &ALConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<CycleRecord>> {
    config.validate()?;
    let panel = resolve_panel(&config.panel, rng)?;
    if let Some(budget) = config.budget {
        if budget > panel.total_capacity() {
            return Err(Error::Config(format!(
                "budget {budget} exceeds total panel capacity {}",
                panel.total_capacity()
            )));
        }
    }
    let state = initial_split(
        dataset,
        config.test_fraction,
        config.initial_fraction,
        rng.next_u64(),
    )?;
    let mut model = refit(dataset, &state.labeled, config, rng.next_u64())?;
    let mut state = state;
    let mut records = Vec::with_capacity(config.cycles);
    for _ in 0..config.cycles {
        let (next_state, next_model, record) =
            run_cycle(dataset, &state, &model, config, &panel, rng)?;
        state = next_state;
        model = next_model;
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synth_dataset;
    use crate::domain::LabelerProfile;
    use crate::noise::NoiseSpec;
    use crate::seeded_rng;
    use std::collections::BTreeSet;

    fn blob_dataset(seed: u64) -> Dataset {
        synth_dataset(2, 50, 2, 1.0, &mut seeded_rng(seed)).unwrap()
    }

    fn base_config(strategy: Strategy) -> ALConfig {
        ALConfig {
            cycles: 3,
            budget: None,
            beta: 0.15,
            alpha: 0.2,
            noise: NoiseSpec::Model1,
            corruption: CorruptionMode::Threshold,
            strategy,
            panel: PanelSpec::Uniform {
                labelers: 3,
                capacity: 2,
                accuracy_low: 0.5,
                accuracy_high: 0.95,
            },
            seed: 1,
            test_fraction: 0.2,
            initial_fraction: 0.16,
            classifier: Default::default(),
        }
    }

    #[test]
    fn split_counts_match_fractions() {
        let ds = blob_dataset(1);
        let state = initial_split(&ds, 0.2, 0.16, 7).unwrap();
        assert_eq!(state.test.len(), 20);
        assert_eq!(state.labeled.len(), 16);
        assert_eq!(state.unlabeled.len(), 64);
        state.validate(&ds).unwrap();
        // initial labels are the true labels
        for (&id, &y) in &state.labeled {
            assert_eq!(ds.sample(id).unwrap().true_label, Some(y));
        }
    }

    #[test]
    fn split_rejects_bad_fractions() {
        let ds = blob_dataset(2);
        assert!(initial_split(&ds, 0.5, 0.5, 0).is_err());
        assert!(initial_split(&ds, 0.0, 0.2, 0).is_err());
        assert!(initial_split(&ds, 1.2, 0.2, 0).is_err());
    }

    #[test]
    fn split_is_deterministic_per_seed() {
        let ds = blob_dataset(3);
        let a = initial_split(&ds, 0.2, 0.16, 11).unwrap();
        let b = initial_split(&ds, 0.2, 0.16, 11).unwrap();
        assert_eq!(a, b);
        let c = initial_split(&ds, 0.2, 0.16, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn split_is_stratified() {
        let ds = blob_dataset(4);
        let state = initial_split(&ds, 0.2, 0.16, 5).unwrap();
        let class_of = |id: &SampleId| ds.sample(*id).unwrap().true_label.unwrap();
        let test_ones = state.test.iter().filter(|id| class_of(id) == 1).count();
        assert_eq!(test_ones, 10);
        let labeled_ones = state.labeled.keys().filter(|id| class_of(id) == 1).count();
        assert_eq!(labeled_ones, 8);
    }

    #[test]
    fn split_errors_when_a_class_cannot_appear() {
        // 98 / 2 class sizes: the tiny class gets no initial quota
        let mut samples = Vec::new();
        for i in 0..100u64 {
            samples.push(crate::domain::Sample {
                id: SampleId(i),
                features: vec![i as f64],
                true_label: Some(if i < 98 { 0 } else { 1 }),
            });
        }
        let ds = Dataset::new(samples, 2, 1, None).unwrap();
        assert!(initial_split(&ds, 0.2, 0.16, 0).is_err());
    }

    #[test]
    fn accuracies_are_in_range_with_correct_mean() {
        let mut rng = seeded_rng(6);
        let draws = sample_labeler_accuracies(10_000, 0.5, 0.95, &mut rng).unwrap();
        assert!(draws.iter().all(|&a| (0.5..0.95).contains(&a)));
        let mean: f64 = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!((mean - 0.725).abs() < 0.005, "mean {mean}");
        let again = sample_labeler_accuracies(10_000, 0.5, 0.95, &mut seeded_rng(6)).unwrap();
        assert_eq!(draws, again);
        assert!(sample_labeler_accuracies(0, 0.5, 0.95, &mut rng).is_err());
        assert!(sample_labeler_accuracies(3, 0.9, 0.5, &mut rng).is_err());
    }

    #[test]
    fn olas_below_minimum_noise_leaves_pools_unchanged() {
        let ds = blob_dataset(7);
        let mut config = base_config(Strategy::Olas);
        config.beta = 0.0; // no perfect labeler in the panel, so nothing qualifies
        let mut rng = seeded_rng(config.seed);
        let panel = resolve_panel(&config.panel, &mut rng).unwrap();
        let state = initial_split(&ds, 0.2, 0.16, rng.next_u64()).unwrap();
        let model = refit(&ds, &state.labeled, &config, rng.next_u64()).unwrap();
        let (next, _, record) =
            run_cycle(&ds, &state, &model, &config, &panel, &mut rng).unwrap();
        assert!(record.queries.is_empty());
        assert_eq!(next.labeled, state.labeled);
        assert_eq!(next.unlabeled, state.unlabeled);
        assert_eq!(next.cycle, state.cycle + 1);
        assert!(record.test_f1.is_finite());
    }

    #[test]
    fn perfect_panel_never_corrupts_under_threshold() {
        let ds = blob_dataset(8);
        let mut config = base_config(Strategy::EsOla);
        config.panel = PanelSpec::Explicit(vec![
            LabelerProfile {
                accuracy: 1.0,
                capacity: 3,
            };
            2
        ]);
        let records = run_experiment(&ds, &config, &mut seeded_rng(9)).unwrap();
        for r in &records {
            assert!(!r.queries.is_empty());
            assert!(r.queries.iter().all(|q| !q.corrupted && q.noise == 0.0));
        }
    }

    #[test]
    fn pools_stay_disjoint_and_labeled_grows_by_query_count() {
        let ds = blob_dataset(9);
        for strategy in Strategy::ALL {
            let config = base_config(strategy);
            let mut rng = seeded_rng(31);
            let panel = resolve_panel(&config.panel, &mut rng).unwrap();
            let mut state = initial_split(&ds, 0.2, 0.16, rng.next_u64()).unwrap();
            let mut model = refit(&ds, &state.labeled, &config, rng.next_u64()).unwrap();
            let mut seen: BTreeSet<SampleId> = BTreeSet::new();
            for _ in 0..3 {
                let before = state.labeled.len();
                let (next, m, record) =
                    run_cycle(&ds, &state, &model, &config, &panel, &mut rng).unwrap();
                next.validate(&ds).unwrap();
                assert_eq!(next.labeled.len(), before + record.queries.len());
                assert!(record.queries.len() <= panel.total_capacity());
                for q in &record.queries {
                    assert!(seen.insert(q.sample_id), "{} queried twice", q.sample_id);
                }
                // capacity per labeler
                let mut counts = vec![0usize; panel.len()];
                for q in &record.queries {
                    counts[q.labeler] += 1;
                }
                for (i, &c) in counts.iter().enumerate() {
                    assert!(c <= panel.capacity(i));
                }
                state = next;
                model = m;
            }
        }
    }

    #[test]
    fn threshold_flags_are_recomputable_from_the_record() {
        let ds = blob_dataset(10);
        let config = base_config(Strategy::EsRla);
        let records = run_experiment(&ds, &config, &mut seeded_rng(12)).unwrap();
        let mut any_corrupted = false;
        for r in &records {
            for q in &r.queries {
                assert_eq!(q.corrupted, q.noise >= config.alpha);
                any_corrupted |= q.corrupted;
            }
        }
        assert!(any_corrupted, "expected some corruption in this setup");
    }

    #[test]
    fn experiment_is_deterministic_and_respects_budget() {
        let ds = blob_dataset(11);
        let mut config = base_config(Strategy::RsOla);
        config.cycles = 4;
        config.budget = Some(5);
        let a = run_experiment(&ds, &config, &mut seeded_rng(13)).unwrap();
        let b = run_experiment(&ds, &config, &mut seeded_rng(13)).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let total: usize = a.iter().map(|r| r.queries.len()).sum();
        assert!(total <= 4 * 5);
        for r in &a {
            assert!(r.queries.len() <= 5);
        }
    }

    #[test]
    fn single_cycle_experiment_matches_manual_composition() {
        let ds = blob_dataset(12);
        let mut config = base_config(Strategy::EsOla);
        config.cycles = 1;
        let records = run_experiment(&ds, &config, &mut seeded_rng(21)).unwrap();
        assert_eq!(records.len(), 1);

        let mut rng = seeded_rng(21);
        let panel = resolve_panel(&config.panel, &mut rng).unwrap();
        let state = initial_split(&ds, 0.2, 0.16, rng.next_u64()).unwrap();
        let model = refit(&ds, &state.labeled, &config, rng.next_u64()).unwrap();
        let (_, _, record) = run_cycle(&ds, &state, &model, &config, &panel, &mut rng).unwrap();
        assert_eq!(records[0], record);
    }

    #[test]
    fn es_ola_equals_olas_with_beta_one() {
        let ds = blob_dataset(13);
        let mut es = base_config(Strategy::EsOla);
        es.cycles = 4;
        let mut olas = es.clone();
        olas.strategy = Strategy::Olas;
        olas.beta = 1.0;
        for seed in [100, 200, 300] {
            let a = run_experiment(&ds, &es, &mut seeded_rng(seed)).unwrap();
            let b = run_experiment(&ds, &olas, &mut seeded_rng(seed)).unwrap();
            assert_eq!(a, b);
        }
    }
}
