//! Core data types shared by all modules.
//!
//! Everything here is an immutable value type; mutation happens only through
//! engine-owned state transitions. Ties (equal entropies, equal accuracies)
//! are always broken by ascending original index so every solver downstream
//! is deterministic.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::classifier::ClassifierSettings;
use crate::noise::{CorruptionMode, NoiseSpec};
use crate::{Error, Result};

/// Stable integer identity of a sample, assigned at ingestion.
///
/// Plans and pool state reference ids, never positions.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct SampleId(pub u64);

impl std::fmt::Display for SampleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A single data point: feature vector plus optional ground-truth class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub id: SampleId,
    pub features: Vec<f64>,
    pub true_label: Option<usize>,
}

/// A classification dataset with a fixed feature dimension and class count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub num_classes: usize,
    pub feature_dim: usize,
    pub class_names: Option<Vec<String>>,
}

impl Dataset {
    /// Build a dataset, validating shape invariants.
    pub fn new(
        samples: Vec<Sample>,
        num_classes: usize,
        feature_dim: usize,
        class_names: Option<Vec<String>>,
    ) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::invalid(format!(
                "a dataset needs at least 2 classes, got {num_classes}"
            )));
        }
        for s in &samples {
            if s.features.len() != feature_dim {
                return Err(Error::invalid(format!(
                    "sample {} has {} features, expected {feature_dim}",
                    s.id,
                    s.features.len()
                )));
            }
            if let Some(y) = s.true_label {
                if y >= num_classes {
                    return Err(Error::invalid(format!(
                        "sample {} has label {y} outside [0, {num_classes})",
                        s.id
                    )));
                }
            }
        }
        if let Some(names) = &class_names {
            if names.len() != num_classes {
                return Err(Error::invalid(format!(
                    "{} class names for {num_classes} classes",
                    names.len()
                )));
            }
        }
        Ok(Dataset {
            samples,
            num_classes,
            feature_dim,
            class_names,
        })
    }

    /// Look up a sample by id. Ids are assigned densely at ingestion, so this
    /// is an index access with a consistency check.
    pub fn sample(&self, id: SampleId) -> Option<&Sample> {
        let s = self.samples.get(id.0 as usize)?;
        debug_assert_eq!(s.id, id);
        Some(s)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// One labeler: probability of a correct label and per-cycle capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelerProfile {
    pub accuracy: f64,
    pub capacity: usize,
}

/// Labelers sorted non-increasing by accuracy, with their total capacity.
///
/// Ties in accuracy keep the original input order (stable sort).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelerPanel {
    labelers: Vec<LabelerProfile>,
    total_capacity: usize,
}

impl LabelerPanel {
    pub fn labelers(&self) -> &[LabelerProfile] {
        &self.labelers
    }

    pub fn len(&self) -> usize {
        self.labelers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labelers.is_empty()
    }

    /// Sum of all capacities.
    pub fn total_capacity(&self) -> usize {
        self.total_capacity
    }

    pub fn accuracy(&self, i: usize) -> f64 {
        self.labelers[i].accuracy
    }

    pub fn capacity(&self, i: usize) -> usize {
        self.labelers[i].capacity
    }

    /// Restrict the panel to a per-cycle budget smaller than the total
    /// capacity: the most accurate labelers participate until their
    /// cumulative capacity reaches `budget`; the last one is truncated.
    pub fn truncate_to_budget(&self, budget: usize) -> Result<LabelerPanel> {
        if budget == 0 {
            return Err(Error::invalid("budget must be at least 1"));
        }
        if budget > self.total_capacity {
            return Err(Error::invalid(format!(
                "budget {budget} exceeds total capacity {}",
                self.total_capacity
            )));
        }
        if budget == self.total_capacity {
            return Ok(self.clone());
        }
        let mut kept = Vec::new();
        let mut remaining = budget;
        for l in &self.labelers {
            if remaining == 0 {
                break;
            }
            let c = l.capacity.min(remaining);
            kept.push(LabelerProfile {
                accuracy: l.accuracy,
                capacity: c,
            });
            remaining -= c;
        }
        Ok(LabelerPanel {
            labelers: kept,
            total_capacity: budget,
        })
    }
}

/// Validate labeler profiles and build a sorted panel.
///
/// Sorting is non-increasing by accuracy; equal accuracies keep input order.
pub fn validate_panel(labelers: &[LabelerProfile]) -> Result<LabelerPanel> {
    if labelers.is_empty() {
        return Err(Error::invalid("labeler panel must not be empty"));
    }
    for (i, l) in labelers.iter().enumerate() {
        if !(0.0..=1.0).contains(&l.accuracy) || !l.accuracy.is_finite() {
            return Err(Error::invalid(format!(
                "labeler {i} accuracy {} outside [0, 1]",
                l.accuracy
            )));
        }
        if l.capacity < 1 {
            return Err(Error::invalid(format!("labeler {i} capacity must be >= 1")));
        }
    }
    let mut sorted: Vec<LabelerProfile> = labelers.to_vec();
    // stable: ties keep original input index order
    sorted.sort_by(|a, b| b.accuracy.partial_cmp(&a.accuracy).unwrap());
    let total_capacity = sorted.iter().map(|l| l.capacity).sum();
    Ok(LabelerPanel {
        labelers: sorted,
        total_capacity,
    })
}

/// Labeled / unlabeled / test partition of a dataset during an AL run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolState {
    /// Observed (possibly corrupted) labels, keyed by sample id.
    pub labeled: BTreeMap<SampleId, usize>,
    /// Ids still available for querying.
    pub unlabeled: BTreeSet<SampleId>,
    /// Held-out ids used only for evaluation.
    pub test: BTreeSet<SampleId>,
    /// Completed cycle count.
    pub cycle: usize,
}

impl PoolState {
    /// Check pairwise disjointness and containment in the dataset's ids.
    pub fn validate(&self, dataset: &Dataset) -> Result<()> {
        for id in self.labeled.keys() {
            if self.unlabeled.contains(id) || self.test.contains(id) {
                return Err(Error::invalid(format!("id {id} in more than one pool")));
            }
        }
        for id in &self.unlabeled {
            if self.test.contains(id) {
                return Err(Error::invalid(format!("id {id} in more than one pool")));
            }
        }
        let n = dataset.len() as u64;
        let all = self
            .labeled
            .keys()
            .chain(self.unlabeled.iter())
            .chain(self.test.iter());
        for id in all {
            if id.0 >= n {
                return Err(Error::invalid(format!("id {id} outside dataset")));
            }
        }
        Ok(())
    }
}

/// Per-sample normalized entropies, sorted non-increasing.
///
/// Ties break by ascending sample id, so downstream rank-based solvers are
/// deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyTable {
    entries: Vec<(SampleId, f64)>,
}

impl EntropyTable {
    /// Sort raw `(id, entropy)` scores into a table. Entropies must lie in
    /// `[0, 1]`.
    pub fn from_scores(mut scores: Vec<(SampleId, f64)>) -> Result<Self> {
        for (id, e) in &scores {
            if !e.is_finite() || *e < 0.0 || *e > 1.0 {
                return Err(Error::invalid(format!(
                    "entropy {e} for sample {id} outside [0, 1]"
                )));
            }
        }
        scores.sort_by(|(ia, ea), (ib, eb)| eb.partial_cmp(ea).unwrap().then(ia.cmp(ib)));
        Ok(EntropyTable { entries: scores })
    }

    pub fn entries(&self) -> &[(SampleId, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entropy values in table (descending) order.
    pub fn entropies(&self) -> Vec<f64> {
        self.entries.iter().map(|(_, e)| *e).collect()
    }
}

/// Query-selection / assignment strategy for one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    /// Random sampling, random labeler assignment.
    #[serde(rename = "RS+RLA")]
    RsRla,
    /// Random sampling, optimal (min-max-noise) assignment.
    #[serde(rename = "RS+OLA")]
    RsOla,
    /// Entropy sampling, random assignment.
    #[serde(rename = "ES+RLA")]
    EsRla,
    /// Entropy sampling, optimal assignment.
    #[serde(rename = "ES+OLA")]
    EsOla,
    /// Joint noise-bounded selection and assignment.
    #[serde(rename = "OLAS")]
    Olas,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::RsRla,
        Strategy::RsOla,
        Strategy::EsRla,
        Strategy::EsOla,
        Strategy::Olas,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::RsRla => "RS+RLA",
            Strategy::RsOla => "RS+OLA",
            Strategy::EsRla => "ES+RLA",
            Strategy::EsOla => "ES+OLA",
            Strategy::Olas => "OLAS",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "RS+RLA" => Ok(Strategy::RsRla),
            "RS+OLA" => Ok(Strategy::RsOla),
            "ES+RLA" => Ok(Strategy::EsRla),
            "ES+OLA" => Ok(Strategy::EsOla),
            "OLAS" => Ok(Strategy::Olas),
            other => Err(Error::Config(format!(
                "unknown strategy {other:?}; expected one of RS+RLA, RS+OLA, ES+RLA, ES+OLA, OLAS"
            ))),
        }
    }
}

/// How the labeler panel for an experiment is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum PanelSpec {
    /// Use these profiles as given (validated and sorted at run start).
    Explicit(Vec<LabelerProfile>),
    /// Draw accuracies uniformly at run start; capacity is shared.
    Uniform {
        labelers: usize,
        capacity: usize,
        #[serde(default = "default_accuracy_low")]
        accuracy_low: f64,
        #[serde(default = "default_accuracy_high")]
        accuracy_high: f64,
    },
}

fn default_accuracy_low() -> f64 {
    0.5
}

fn default_accuracy_high() -> f64 {
    0.95
}

/// Settings for one active-learning experiment (a single replication).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ALConfig {
    /// Number of AL cycles T.
    pub cycles: usize,
    /// Per-cycle labeling budget B. `None` means the panel's total capacity.
    #[serde(default)]
    pub budget: Option<usize>,
    /// Noise bound for OLAS selection.
    pub beta: f64,
    /// Corruption threshold for threshold-mode experiments.
    pub alpha: f64,
    pub noise: NoiseSpec,
    pub corruption: CorruptionMode,
    pub strategy: Strategy,
    pub panel: PanelSpec,
    pub seed: u64,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_initial_fraction")]
    pub initial_fraction: f64,
    #[serde(default)]
    pub classifier: ClassifierSettings,
}

fn default_test_fraction() -> f64 {
    0.2
}

fn default_initial_fraction() -> f64 {
    0.16
}

impl ALConfig {
    /// Validate value ranges that do not depend on the resolved panel.
    pub fn validate(&self) -> Result<()> {
        if self.cycles < 1 {
            return Err(Error::Config("cycles must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::Config(format!("beta {} outside [0, 1]", self.beta)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        if !(0.0..1.0).contains(&self.test_fraction)
            || !(0.0..1.0).contains(&self.initial_fraction)
            || self.test_fraction <= 0.0
            || self.initial_fraction <= 0.0
            || self.test_fraction + self.initial_fraction >= 1.0
        {
            return Err(Error::Config(format!(
                "test fraction {} and initial fraction {} must be in (0, 1) and sum below 1",
                self.test_fraction, self.initial_fraction
            )));
        }
        Ok(())
    }
}

/// Outcome of labeling one query in a cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryOutcome {
    pub sample_id: SampleId,
    /// Index into the sorted panel.
    pub labeler: usize,
    /// Noise value eps(a, e) for this pair.
    pub noise: f64,
    pub corrupted: bool,
    pub observed_label: usize,
}

/// Ledger for one AL cycle: what was queried, how it was assigned and
/// corrupted, and the resulting test-set F1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycle: usize,
    pub queries: Vec<QueryOutcome>,
    pub test_f1: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profiles(v: &[(f64, usize)]) -> Vec<LabelerProfile> {
        v.iter()
            .map(|&(accuracy, capacity)| LabelerProfile { accuracy, capacity })
            .collect()
    }

    #[test]
    fn validate_panel_sorts_by_accuracy() {
        let panel = validate_panel(&profiles(&[(0.6, 2), (0.9, 1)])).unwrap();
        assert_eq!(panel.accuracy(0), 0.9);
        assert_eq!(panel.capacity(0), 1);
        assert_eq!(panel.accuracy(1), 0.6);
        assert_eq!(panel.capacity(1), 2);
        assert_eq!(panel.total_capacity(), 3);
    }

    #[test]
    fn validate_panel_tie_break_is_stable() {
        let panel = validate_panel(&profiles(&[(0.7, 1), (0.7, 2)])).unwrap();
        assert_eq!(panel.capacity(0), 1);
        assert_eq!(panel.capacity(1), 2);
        assert_eq!(panel.total_capacity(), 3);
    }

    #[test]
    fn validate_panel_rejects_bad_inputs() {
        assert!(validate_panel(&[]).is_err());
        assert!(validate_panel(&profiles(&[(1.2, 1)])).is_err());
        assert!(validate_panel(&profiles(&[(-0.1, 1)])).is_err());
        assert!(validate_panel(&profiles(&[(0.5, 0)])).is_err());
    }

    #[test]
    fn validate_panel_is_idempotent() {
        let once = validate_panel(&profiles(&[(0.6, 2), (0.9, 1), (0.9, 3)])).unwrap();
        let twice = validate_panel(once.labelers()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn truncate_to_budget_keeps_top_labelers() {
        let panel = validate_panel(&profiles(&[(0.9, 3), (0.8, 3), (0.7, 3)])).unwrap();
        let cut = panel.truncate_to_budget(4).unwrap();
        assert_eq!(cut.len(), 2);
        assert_eq!(cut.capacity(0), 3);
        assert_eq!(cut.capacity(1), 1);
        assert_eq!(cut.total_capacity(), 4);
        assert!(panel.truncate_to_budget(10).is_err());
        assert_eq!(panel.truncate_to_budget(9).unwrap(), panel);
    }

    #[test]
    fn entropy_table_sorts_and_breaks_ties_by_id() {
        let t = EntropyTable::from_scores(vec![
            (SampleId(3), 0.5),
            (SampleId(1), 0.5),
            (SampleId(2), 0.9),
        ])
        .unwrap();
        let ids: Vec<u64> = t.entries().iter().map(|(id, _)| id.0).collect();
        assert_eq!(ids, vec![2, 1, 3]);
    }

    #[test]
    fn entropy_table_rejects_out_of_range() {
        assert!(EntropyTable::from_scores(vec![(SampleId(0), 1.2)]).is_err());
        assert!(EntropyTable::from_scores(vec![(SampleId(0), f64::NAN)]).is_err());
    }

    #[test]
    fn dataset_rejects_shape_violations() {
        let s = Sample {
            id: SampleId(0),
            features: vec![1.0, 2.0],
            true_label: Some(0),
        };
        assert!(Dataset::new(vec![s.clone()], 1, 2, None).is_err());
        assert!(Dataset::new(vec![s.clone()], 2, 3, None).is_err());
        let bad_label = Sample {
            true_label: Some(5),
            ..s.clone()
        };
        assert!(Dataset::new(vec![bad_label], 2, 2, None).is_err());
        assert!(Dataset::new(vec![s], 2, 2, None).is_ok());
    }

    #[test]
    fn pool_state_detects_overlap() {
        let ds = Dataset::new(
            (0..4)
                .map(|i| Sample {
                    id: SampleId(i),
                    features: vec![0.0],
                    true_label: Some(0),
                })
                .collect(),
            2,
            1,
            None,
        )
        .unwrap();
        let mut state = PoolState {
            labeled: BTreeMap::from([(SampleId(0), 0)]),
            unlabeled: BTreeSet::from([SampleId(1)]),
            test: BTreeSet::from([SampleId(2)]),
            cycle: 0,
        };
        assert!(state.validate(&ds).is_ok());
        state.unlabeled.insert(SampleId(0));
        assert!(state.validate(&ds).is_err());
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("ES".parse::<Strategy>().is_err());
    }
}
