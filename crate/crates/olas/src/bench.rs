//! Benchmark harness: multi-strategy comparison with seeded replications,
//! result files, and plot-ready data.
//!
//! Replication `r` of every strategy runs from the same derived seed, so
//! strategies are paired: they see identical panels, splits, and corruption
//! streams wherever their selection paths coincide. All output files are a
//! pure function of (dataset, settings, master seed).

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::ClassifierSettings;
use crate::data::{load_csv_dataset, synth_dataset, CsvSchema};
use crate::domain::{ALConfig, Dataset, PanelSpec, Strategy};
use crate::engine::{evaluate_f1, initial_split, resolve_panel, run_experiment};
use crate::noise::{CorruptionMode, NoiseSpec};
use crate::{derive_seed, seeded_rng, Error, Result};

/// A named experimental setting: per-cycle budget, panel size, and shared
/// per-labeler capacity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preset {
    pub name: String,
    pub budget: usize,
    pub labelers: usize,
    pub capacity: usize,
}

/// Built-in presets for the four reference datasets.
pub fn presets() -> Vec<Preset> {
    let mk = |name: &str, budget, labelers, capacity| Preset {
        name: name.to_string(),
        budget,
        labelers,
        capacity,
    };
    vec![
        mk("statlog", 15, 5, 3),
        mk("ionosphere", 20, 5, 4),
        mk("connectionist", 12, 4, 3),
        mk("spambase", 258, 17, 16),
    ]
}

pub fn preset_by_name(name: &str) -> Result<Preset> {
    presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| {
            Error::Config(format!(
                "unknown preset {name:?}; available: statlog, ionosphere, connectionist, spambase"
            ))
        })
}

/// Benchmark-level settings on top of a single-experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSettings {
    pub strategies: Vec<Strategy>,
    pub replications: usize,
    pub master_seed: u64,
}

/// Mean and sample standard deviation of the final-cycle F1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub mean_final_f1: f64,
    pub std_final_f1: f64,
}

/// Per-cycle F1 values for every strategy and replication, plus the
/// full-data upper bound per replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleMatrix {
    pub strategies: Vec<Strategy>,
    /// `f1[strategy][replication][cycle]`
    pub f1: Vec<Vec<Vec<f64>>>,
    pub upper_bounds: Vec<f64>,
}

/// Everything a benchmark run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResults {
    pub template: ALConfig,
    pub replications: usize,
    pub master_seed: u64,
    pub summaries: Vec<StrategySummary>,
    pub upper_bound_mean: f64,
    pub upper_bound_std: f64,
    pub matrix: CycleMatrix,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// F1 of the reference classifier trained on the entire training partition
/// with true labels, evaluated on the test partition. Consumes the RNG
/// stream exactly like [`run_experiment`] up to the split, so the same seed
/// yields the same partition.
pub fn upper_bound_f1(dataset: &Dataset, config: &ALConfig, seed: u64) -> Result<f64> {
    let mut rng = seeded_rng(seed);
    let _panel = resolve_panel(&config.panel, &mut rng)?;
    let state = initial_split(
        dataset,
        config.test_fraction,
        config.initial_fraction,
        rng.next_u64(),
    )?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in &dataset.samples {
        if !state.test.contains(&s.id) {
            xs.push(s.features.clone());
            ys.push(s.true_label.unwrap());
        }
    }
    let model = crate::classifier::fit(
        &xs,
        &ys,
        dataset.num_classes,
        &config.classifier,
        rng.next_u64(),
    )?;
    evaluate_f1(dataset, &model, &state.test)
}

/// Run `replications` seeded experiments per strategy plus the per-split
/// upper bound. Replications fan out across worker threads; results merge
/// by index, so the outcome is independent of scheduling.
pub fn run_benchmark(
    dataset: &Dataset,
    template: &ALConfig,
    settings: &BenchSettings,
) -> Result<BenchmarkResults> {
    if settings.strategies.is_empty() {
        return Err(Error::Config("no strategies selected".into()));
    }
    if settings.replications < 1 {
        return Err(Error::Config("need at least one replication".into()));
    }
    let seeds: Vec<u64> = (0..settings.replications)
        .map(|r| derive_seed(settings.master_seed, r as u64))
        .collect();

    let cells: Vec<(usize, usize)> = (0..settings.strategies.len())
        .flat_map(|s| (0..settings.replications).map(move |r| (s, r)))
        .collect();
    let runs: Result<Vec<((usize, usize), Vec<f64>)>> = cells
        .par_iter()
        .map(|&(s, r)| {
            let mut config = template.clone();
            config.strategy = settings.strategies[s];
            config.seed = seeds[r];
            let records = run_experiment(dataset, &config, &mut seeded_rng(seeds[r]))?;
            Ok(((s, r), records.into_iter().map(|rec| rec.test_f1).collect()))
        })
        .collect();
    let mut f1 =
        vec![vec![Vec::new(); settings.replications]; settings.strategies.len()];
    for ((s, r), curve) in runs? {
        f1[s][r] = curve;
    }

    let upper_bounds: Result<Vec<f64>> = seeds
        .par_iter()
        .map(|&seed| upper_bound_f1(dataset, template, seed))
        .collect();
    let upper_bounds = upper_bounds?;

    let summaries: Vec<StrategySummary> = settings
        .strategies
        .iter()
        .enumerate()
        .map(|(s, &strategy)| {
            let finals: Vec<f64> = f1[s].iter().map(|curve| *curve.last().unwrap()).collect();
            let (mean_final_f1, std_final_f1) = mean_std(&finals);
            StrategySummary {
                strategy,
                mean_final_f1,
                std_final_f1,
            }
        })
        .collect();
    let (upper_bound_mean, upper_bound_std) = mean_std(&upper_bounds);

    Ok(BenchmarkResults {
        template: template.clone(),
        replications: settings.replications,
        master_seed: settings.master_seed,
        summaries,
        upper_bound_mean,
        upper_bound_std,
        matrix: CycleMatrix {
            strategies: settings.strategies.clone(),
            f1,
            upper_bounds,
        },
    })
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Write plot-ready files from a cycle matrix:
///
/// - `median_f1.csv` — header `cycle,<strategy...>,upper_bound`; one row per
///   cycle with the median F1 over replications, plus the constant median
///   upper bound.
/// - `final_f1.csv` — header `strategy,replication,f1`; final-cycle F1 per
///   replication per strategy (box-plot data).
pub fn emit_plot_data(matrix: &CycleMatrix, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    if matrix.f1.is_empty() || matrix.f1[0].is_empty() {
        return Err(Error::invalid("empty cycle matrix"));
    }
    let cycles = matrix.f1[0][0].len();
    let ub_median = median(&matrix.upper_bounds);

    let median_path = out_dir.join("median_f1.csv");
    let mut out = std::io::BufWriter::new(std::fs::File::create(&median_path)?);
    write!(out, "cycle")?;
    for s in &matrix.strategies {
        write!(out, ",{s}")?;
    }
    writeln!(out, ",upper_bound")?;
    for t in 0..cycles {
        write!(out, "{}", t + 1)?;
        for curves in &matrix.f1 {
            let at_t: Vec<f64> = curves.iter().map(|c| c[t]).collect();
            write!(out, ",{}", median(&at_t))?;
        }
        writeln!(out, ",{ub_median}")?;
    }
    out.flush()?;

    let final_path = out_dir.join("final_f1.csv");
    let mut out = std::io::BufWriter::new(std::fs::File::create(&final_path)?);
    writeln!(out, "strategy,replication,f1")?;
    for (s, curves) in matrix.strategies.iter().zip(&matrix.f1) {
        for (r, curve) in curves.iter().enumerate() {
            writeln!(out, "{s},{r},{}", curve.last().unwrap())?;
        }
    }
    out.flush()?;
    Ok(vec![median_path, final_path])
}

/// Write `summary.json`, `matrix.csv`, `upper_bound.csv`, and the plot files
/// into `out_dir`. Byte-identical for identical inputs.
pub fn write_results(results: &BenchmarkResults, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    let summary_path = out_dir.join("summary.json");
    let summary = serde_json::json!({
        "template": results.template,
        "replications": results.replications,
        "master_seed": results.master_seed,
        "strategies": results.summaries,
        "upper_bound_mean": results.upper_bound_mean,
        "upper_bound_std": results.upper_bound_std,
    });
    std::fs::write(&summary_path, serde_json::to_string_pretty(&summary).unwrap() + "\n")?;
    written.push(summary_path);

    let matrix_path = out_dir.join("matrix.csv");
    let mut out = std::io::BufWriter::new(std::fs::File::create(&matrix_path)?);
    writeln!(out, "strategy,replication,cycle,f1")?;
    for (s, curves) in results.matrix.strategies.iter().zip(&results.matrix.f1) {
        for (r, curve) in curves.iter().enumerate() {
            for (t, f1) in curve.iter().enumerate() {
                writeln!(out, "{s},{r},{},{f1}", t + 1)?;
            }
        }
    }
    out.flush()?;
    written.push(matrix_path);

    let ub_path = out_dir.join("upper_bound.csv");
    let mut out = std::io::BufWriter::new(std::fs::File::create(&ub_path)?);
    writeln!(out, "replication,f1")?;
    for (r, f1) in results.matrix.upper_bounds.iter().enumerate() {
        writeln!(out, "{r},{f1}")?;
    }
    out.flush()?;
    written.push(ub_path);

    written.extend(emit_plot_data(&results.matrix, out_dir)?);
    Ok(written)
}

/// Parse `matrix.csv` and `upper_bound.csv` back into a [`CycleMatrix`].
/// Values round-trip exactly (floats are written in shortest round-trip
/// form).
pub fn parse_matrix(matrix_path: &Path, upper_bound_path: &Path) -> Result<CycleMatrix> {
    let mut strategies: Vec<Strategy> = Vec::new();
    let mut f1: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(matrix_path)
        .map_err(|e| Error::Data(format!("{}: {e}", matrix_path.display())))?;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Data(format!("row {}: {e}", idx + 2)))?;
        if record.len() != 4 {
            return Err(Error::Data(format!(
                "row {}: expected 4 columns, got {}",
                idx + 2,
                record.len()
            )));
        }
        let strategy: Strategy = record[0].parse()?;
        let rep: usize = record[1]
            .parse()
            .map_err(|_| Error::Data(format!("row {}: bad replication", idx + 2)))?;
        let cycle: usize = record[2]
            .parse()
            .map_err(|_| Error::Data(format!("row {}: bad cycle", idx + 2)))?;
        let value: f64 = record[3]
            .parse()
            .map_err(|_| Error::Data(format!("row {}: bad f1", idx + 2)))?;
        let s = match strategies.iter().position(|&x| x == strategy) {
            Some(s) => s,
            None => {
                strategies.push(strategy);
                f1.push(Vec::new());
                strategies.len() - 1
            }
        };
        if f1[s].len() < rep + 1 {
            f1[s].resize(rep + 1, Vec::new());
        }
        if f1[s][rep].len() != cycle - 1 {
            return Err(Error::Data(format!(
                "row {}: cycle {cycle} out of order for {strategy} replication {rep}",
                idx + 2
            )));
        }
        f1[s][rep].push(value);
    }
    if strategies.is_empty() {
        return Err(Error::Data(format!(
            "{}: no data rows",
            matrix_path.display()
        )));
    }

    let mut upper_bounds = Vec::new();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(upper_bound_path)
        .map_err(|e| Error::Data(format!("{}: {e}", upper_bound_path.display())))?;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Data(format!("row {}: {e}", idx + 2)))?;
        let value: f64 = record[1]
            .parse()
            .map_err(|_| Error::Data(format!("row {}: bad f1", idx + 2)))?;
        upper_bounds.push(value);
    }
    Ok(CycleMatrix {
        strategies,
        f1,
        upper_bounds,
    })
}

/// Where the dataset for a run comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum DatasetSpec {
    Csv {
        path: String,
        schema: CsvSchema,
    },
    Synthetic {
        classes: usize,
        per_class: usize,
        feature_dim: usize,
        spread: f64,
        seed: u64,
    },
}

impl DatasetSpec {
    pub fn load(&self) -> Result<Dataset> {
        match self {
            DatasetSpec::Csv { path, schema } => load_csv_dataset(Path::new(path), schema),
            DatasetSpec::Synthetic {
                classes,
                per_class,
                feature_dim,
                spread,
                seed,
            } => synth_dataset(
                *classes,
                *per_class,
                *feature_dim,
                *spread,
                &mut seeded_rng(*seed),
            ),
        }
    }
}

/// Top-level configuration file for the CLI. Unknown keys are an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub dataset: DatasetSpec,
    #[serde(default)]
    pub preset: Option<String>,
    /// Explicit panel; defaults to the preset's uniform panel.
    #[serde(default)]
    pub panel: Option<PanelSpec>,
    /// Per-cycle budget; defaults to the preset's budget, then to the
    /// panel's total capacity.
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default = "default_cycles")]
    pub cycles: usize,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_noise")]
    pub noise: NoiseSpec,
    #[serde(default = "default_corruption")]
    pub corruption: CorruptionMode,
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    /// Strategies compared by `bench`; defaults to all five.
    #[serde(default)]
    pub strategies: Option<Vec<Strategy>>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub seed: u64,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_initial_fraction")]
    pub initial_fraction: f64,
    #[serde(default)]
    pub classifier: ClassifierSettings,
    /// Candidate betas for `calibrate`; defaults to 0.05..=0.5 step 0.05.
    #[serde(default)]
    pub beta_grid: Option<Vec<f64>>,
}

fn default_cycles() -> usize {
    10
}

fn default_beta() -> f64 {
    0.15
}

fn default_alpha() -> f64 {
    0.2
}

fn default_noise() -> NoiseSpec {
    NoiseSpec::Model1
}

fn default_corruption() -> CorruptionMode {
    CorruptionMode::Threshold
}

fn default_strategy() -> Strategy {
    Strategy::Olas
}

fn default_replications() -> usize {
    20
}

fn default_test_fraction() -> f64 {
    0.2
}

fn default_initial_fraction() -> f64 {
    0.16
}

impl RunSpec {
    pub fn parse_file(path: &Path) -> Result<RunSpec> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Resolve the experiment config and benchmark settings.
    pub fn resolve(&self) -> Result<(ALConfig, BenchSettings)> {
        let preset = match &self.preset {
            Some(name) => Some(preset_by_name(name)?),
            None => None,
        };
        let panel = match (&self.panel, &preset) {
            (Some(p), _) => p.clone(),
            (None, Some(p)) => PanelSpec::Uniform {
                labelers: p.labelers,
                capacity: p.capacity,
                accuracy_low: 0.5,
                accuracy_high: 0.95,
            },
            (None, None) => {
                return Err(Error::Config(
                    "set either `panel` or `preset` to define the labelers".into(),
                ))
            }
        };
        let budget = self.budget.or(preset.as_ref().map(|p| p.budget));
        let config = ALConfig {
            cycles: self.cycles,
            budget,
            beta: self.beta,
            alpha: self.alpha,
            noise: self.noise,
            corruption: self.corruption,
            strategy: self.strategy,
            panel,
            seed: self.seed,
            test_fraction: self.test_fraction,
            initial_fraction: self.initial_fraction,
            classifier: self.classifier,
        };
        config.validate()?;
        let settings = BenchSettings {
            strategies: self
                .strategies
                .clone()
                .unwrap_or_else(|| Strategy::ALL.to_vec()),
            replications: self.replications,
            master_seed: self.seed,
        };
        Ok((config, settings))
    }

    pub fn beta_grid(&self) -> Vec<f64> {
        self.beta_grid
            .clone()
            .unwrap_or_else(|| (1..=10).map(|i| i as f64 * 0.05).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    fn tiny_dataset() -> Dataset {
        synth_dataset(2, 40, 2, 1.0, &mut seeded_rng(5)).unwrap()
    }

    fn tiny_template() -> ALConfig {
        ALConfig {
            cycles: 3,
            budget: None,
            beta: 0.15,
            alpha: 0.2,
            noise: NoiseSpec::Model1,
            corruption: CorruptionMode::Threshold,
            strategy: Strategy::Olas,
            panel: PanelSpec::Uniform {
                labelers: 3,
                capacity: 2,
                accuracy_low: 0.5,
                accuracy_high: 0.95,
            },
            seed: 0,
            test_fraction: 0.2,
            initial_fraction: 0.16,
            classifier: ClassifierSettings {
                iterations: 120,
                ..Default::default()
            },
        }
    }

    #[test]
    fn preset_values_match_the_reference_settings() {
        let expect = [
            ("statlog", 15, 5, 3),
            ("ionosphere", 20, 5, 4),
            ("connectionist", 12, 4, 3),
            ("spambase", 258, 17, 16),
        ];
        for (name, budget, labelers, capacity) in expect {
            let p = preset_by_name(name).unwrap();
            assert_eq!((p.budget, p.labelers, p.capacity), (budget, labelers, capacity));
        }
        assert!(preset_by_name("nope").is_err());
    }

    #[test]
    fn presets_round_trip_through_serialization() {
        for p in presets() {
            let json = serde_json::to_string(&p).unwrap();
            let back: Preset = serde_json::from_str(&json).unwrap();
            assert_eq!(p, back);
        }
    }

    #[test]
    fn benchmark_is_deterministic() {
        let ds = tiny_dataset();
        let template = tiny_template();
        let settings = BenchSettings {
            strategies: vec![Strategy::EsOla, Strategy::Olas],
            replications: 2,
            master_seed: 99,
        };
        let a = run_benchmark(&ds, &template, &settings).unwrap();
        let b = run_benchmark(&ds, &template, &settings).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn olas_beta_one_matches_es_ola_under_paired_seeds() {
        let ds = tiny_dataset();
        let mut template = tiny_template();
        template.beta = 1.0;
        let settings = BenchSettings {
            strategies: vec![Strategy::EsOla, Strategy::Olas],
            replications: 3,
            master_seed: 7,
        };
        let results = run_benchmark(&ds, &template, &settings).unwrap();
        assert_eq!(results.matrix.f1[0], results.matrix.f1[1]);
    }

    #[test]
    fn upper_bound_is_deterministic_and_perfect_on_separable_data() {
        let ds = synth_dataset(2, 30, 2, 1e-6, &mut seeded_rng(6)).unwrap();
        let template = tiny_template();
        let a = upper_bound_f1(&ds, &template, 42).unwrap();
        let b = upper_bound_f1(&ds, &template, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, 1.0);
    }

    #[test]
    fn result_files_are_byte_identical_across_runs() {
        let ds = tiny_dataset();
        let template = tiny_template();
        let settings = BenchSettings {
            strategies: vec![Strategy::RsRla, Strategy::Olas],
            replications: 2,
            master_seed: 3,
        };
        let results = run_benchmark(&ds, &template, &settings).unwrap();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let files_a = write_results(&results, dir_a.path()).unwrap();
        let results_again = run_benchmark(&ds, &template, &settings).unwrap();
        let files_b = write_results(&results_again, dir_b.path()).unwrap();
        assert_eq!(files_a.len(), files_b.len());
        for (fa, fb) in files_a.iter().zip(&files_b) {
            let a = std::fs::read(fa).unwrap();
            let b = std::fs::read(fb).unwrap();
            assert_eq!(a, b, "{} differs", fa.display());
        }
    }

    #[test]
    fn plot_files_have_documented_shapes() {
        let ds = tiny_dataset();
        let template = tiny_template();
        let settings = BenchSettings {
            strategies: Strategy::ALL.to_vec(),
            replications: 3,
            master_seed: 11,
        };
        let results = run_benchmark(&ds, &template, &settings).unwrap();
        let dir = tempfile::tempdir().unwrap();
        emit_plot_data(&results.matrix, dir.path()).unwrap();

        let median = std::fs::read_to_string(dir.path().join("median_f1.csv")).unwrap();
        let lines: Vec<&str> = median.lines().collect();
        assert_eq!(
            lines[0],
            "cycle,RS+RLA,RS+OLA,ES+RLA,ES+OLA,OLAS,upper_bound"
        );
        assert_eq!(lines.len(), 1 + template.cycles);
        for line in &lines[1..] {
            assert_eq!(line.split(',').count(), 7);
        }

        let final_f1 = std::fs::read_to_string(dir.path().join("final_f1.csv")).unwrap();
        let lines: Vec<&str> = final_f1.lines().collect();
        assert_eq!(lines[0], "strategy,replication,f1");
        assert_eq!(lines.len(), 1 + 5 * settings.replications);
    }

    #[test]
    fn matrix_round_trips_exactly() {
        let ds = tiny_dataset();
        let template = tiny_template();
        let settings = BenchSettings {
            strategies: vec![Strategy::EsRla, Strategy::Olas],
            replications: 2,
            master_seed: 21,
        };
        let results = run_benchmark(&ds, &template, &settings).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_results(&results, dir.path()).unwrap();
        let parsed = parse_matrix(
            &dir.path().join("matrix.csv"),
            &dir.path().join("upper_bound.csv"),
        )
        .unwrap();
        assert_eq!(parsed, results.matrix);
    }

    #[test]
    fn run_spec_resolves_presets_and_rejects_unknown_keys() {
        let json = r#"{
            "dataset": {"synthetic": {"classes": 2, "per_class": 20, "feature_dim": 3, "spread": 1.0, "seed": 1}},
            "preset": "statlog",
            "seed": 5
        }"#;
        let spec: RunSpec = serde_json::from_str(json).unwrap();
        let (config, settings) = spec.resolve().unwrap();
        assert_eq!(config.budget, Some(15));
        match config.panel {
            PanelSpec::Uniform {
                labelers, capacity, ..
            } => {
                assert_eq!((labelers, capacity), (5, 3));
            }
            _ => panic!("expected uniform panel"),
        }
        assert_eq!(settings.strategies.len(), 5);
        assert_eq!(settings.master_seed, 5);

        let bad = r#"{
            "dataset": {"synthetic": {"classes": 2, "per_class": 20, "feature_dim": 3, "spread": 1.0, "seed": 1}},
            "preset": "statlog",
            "seed": 5,
            "typo_key": 1
        }"#;
        assert!(serde_json::from_str::<RunSpec>(bad).is_err());

        let no_panel = r#"{
            "dataset": {"synthetic": {"classes": 2, "per_class": 20, "feature_dim": 3, "spread": 1.0, "seed": 1}},
            "seed": 5
        }"#;
        let spec: RunSpec = serde_json::from_str(no_panel).unwrap();
        assert!(spec.resolve().is_err());
    }

    #[test]
    fn run_spec_round_trips() {
        let json = r#"{
            "dataset": {"csv": {"path": "data/heart.csv", "schema": {"label_column": 13, "delimiter": " "}}},
            "preset": "statlog",
            "beta": 0.15,
            "seed": 42
        }"#;
        let spec: RunSpec = serde_json::from_str(json).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        let back: RunSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
    }
}
