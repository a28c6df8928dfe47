//! Dataset ingestion: delimited files and synthetic Gaussian blobs.

use std::collections::HashMap;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::domain::{Dataset, Sample, SampleId};
use crate::{Error, Result};

/// How to interpret a delimited dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSchema {
    /// Zero-based column holding the class label.
    pub label_column: usize,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    #[serde(default)]
    pub has_header: bool,
    /// Fixed label-string -> class-index mapping (by position). Without it,
    /// labels are mapped in first-appearance order.
    #[serde(default)]
    pub class_names: Option<Vec<String>>,
    /// Columns to parse as numeric features; everything except the label
    /// column when omitted.
    #[serde(default)]
    pub feature_columns: Option<Vec<usize>>,
    #[serde(default)]
    pub expected_rows: Option<usize>,
    #[serde(default)]
    pub expected_features: Option<usize>,
}

fn default_delimiter() -> char {
    ','
}

impl CsvSchema {
    pub fn new(label_column: usize) -> Self {
        CsvSchema {
            label_column,
            delimiter: ',',
            has_header: false,
            class_names: None,
            feature_columns: None,
            expected_rows: None,
            expected_features: None,
        }
    }
}

/// Load a delimited dataset file.
///
/// Features parse as reals; labels map to `0..num_classes` in
/// first-appearance order unless `class_names` pins the mapping. Parse
/// failures report the offending row and column.
pub fn load_csv_dataset(path: &Path, schema: &CsvSchema) -> Result<Dataset> {
    if !schema.delimiter.is_ascii() {
        return Err(Error::Config(format!(
            "delimiter {:?} is not an ASCII character",
            schema.delimiter
        )));
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter as u8)
        .has_headers(schema.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;

    let mut class_map: HashMap<String, usize> = HashMap::new();
    let mut class_names: Vec<String> = Vec::new();
    if let Some(names) = &schema.class_names {
        for (i, name) in names.iter().enumerate() {
            if class_map.insert(name.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate class name {name:?}")));
            }
            class_names.push(name.clone());
        }
    }
    let fixed_classes = schema.class_names.is_some();

    let mut samples = Vec::new();
    let mut feature_dim: Option<usize> = None;
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1 + usize::from(schema.has_header);
        let record = record.map_err(|e| Error::Data(format!("row {row}: {e}")))?;
        if record.len() <= schema.label_column {
            return Err(Error::Data(format!(
                "row {row}: {} columns, label column {} missing",
                record.len(),
                schema.label_column
            )));
        }
        let label_str = record.get(schema.label_column).unwrap().to_string();
        let label = match class_map.get(&label_str) {
            Some(&c) => c,
            None if fixed_classes => {
                return Err(Error::Data(format!(
                    "row {row}: unknown class label {label_str:?}"
                )))
            }
            None => {
                let c = class_names.len();
                class_map.insert(label_str.clone(), c);
                class_names.push(label_str);
                c
            }
        };
        let columns: Vec<usize> = match &schema.feature_columns {
            Some(cols) => cols.clone(),
            None => (0..record.len())
                .filter(|&c| c != schema.label_column)
                .collect(),
        };
        let mut features = Vec::with_capacity(columns.len());
        for col in columns {
            let raw = record
                .get(col)
                .ok_or_else(|| Error::Data(format!("row {row}: missing feature column {col}")))?;
            let v: f64 = raw.parse().map_err(|_| {
                Error::Data(format!(
                    "row {row}, column {col}: cannot parse {raw:?} as a number"
                ))
            })?;
            features.push(v);
        }
        match feature_dim {
            None => feature_dim = Some(features.len()),
            Some(d) if d != features.len() => {
                return Err(Error::Data(format!(
                    "row {row}: {} features, expected {d} (ragged rows)",
                    features.len()
                )))
            }
            _ => {}
        }
        samples.push(Sample {
            id: SampleId(samples.len() as u64),
            features,
            true_label: Some(label),
        });
    }
    if samples.is_empty() {
        return Err(Error::Data(format!("{}: no data rows", path.display())));
    }
    let num_classes = class_names.len();
    if num_classes < 2 {
        return Err(Error::Data(format!(
            "{}: found {num_classes} class(es), need at least 2",
            path.display()
        )));
    }
    if let Some(expected) = schema.expected_rows {
        if samples.len() != expected {
            return Err(Error::Data(format!(
                "{}: {} rows, expected {expected}",
                path.display(),
                samples.len()
            )));
        }
    }
    let dim = feature_dim.unwrap();
    if let Some(expected) = schema.expected_features {
        if dim != expected {
            return Err(Error::Data(format!(
                "{}: {dim} features, expected {expected}",
                path.display()
            )));
        }
    }
    Dataset::new(samples, num_classes, dim, Some(class_names))
}

/// Synthetic dataset: one isotropic Gaussian blob per class around seeded
/// random centers. Labels are the blob index.
pub fn synth_dataset<R: Rng + ?Sized>(
    num_classes: usize,
    per_class: usize,
    feature_dim: usize,
    spread: f64,
    rng: &mut R,
) -> Result<Dataset> {
    if num_classes < 2 || per_class < 1 || feature_dim < 1 {
        return Err(Error::invalid(format!(
            "need >= 2 classes, >= 1 per class, dim >= 1; got {num_classes}/{per_class}/{feature_dim}"
        )));
    }
    if !(spread >= 0.0) {
        return Err(Error::invalid(format!("spread {spread} must be >= 0")));
    }
    let unit = Normal::new(0.0, 1.0).unwrap();
    let centers: Vec<Vec<f64>> = (0..num_classes)
        .map(|_| (0..feature_dim).map(|_| unit.sample(rng)).collect())
        .collect();
    let mut samples = Vec::with_capacity(num_classes * per_class);
    for (label, center) in centers.iter().enumerate() {
        for _ in 0..per_class {
            let features = center
                .iter()
                .map(|&c| c + spread * unit.sample(rng))
                .collect();
            samples.push(Sample {
                id: SampleId(samples.len() as u64),
                features,
                true_label: Some(label),
            });
        }
    }
    Dataset::new(samples, num_classes, feature_dim, None)
}
