//! End-to-end stages over a flow table on disk: clean, select, compare.
//!
//! Every statistic that shapes the data (imputation fills, selected columns,
//! count shifts, binarisation thresholds) is fitted on the training partition
//! and stored in a [`TransformManifest`]. Both partitions are then produced by
//! applying that manifest to the raw rows, so a saved manifest reproduces them.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::{RunConfig, SelectMethod};
use crate::dataset::{CleanDataset, Transform};
use crate::error::Error;
use crate::eval::{compare_variants, ComparisonReport, SplitPair, VariantDatasets};
use crate::model::serialize_model;
use crate::preprocess::{
    compute_column_stats, impute, load_csv_from_reader, split_indices, to_dataset, Binarizer, ClampPolicy, ColumnStats,
    CountTransform, LabelMap, LoadOptions, PreprocessError, RawTable,
};
use crate::report::{emit_csv, emit_figures};
use crate::select::{select_by_correlation, select_top_k_chi2, SelectionReport};

pub const MANIFEST_VERSION: u32 = 1;

/// Training statistics of one kept input column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputedColumn {
    pub name: String,
    pub stats: ColumnStats,
    /// Negative values (observed or filled) are raised to zero.
    pub clamp_negative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformManifest {
    pub version: u32,
    pub input_digest: String,
    pub config: RunConfig,
    pub label_column: String,
    pub class_names: Vec<String>,
    pub train_rows: usize,
    pub test_rows: usize,
    /// Columns with no finite value in the training partition.
    pub dropped_columns: Vec<String>,
    pub imputation: Vec<ImputedColumn>,
    pub selection: Option<SelectionReport>,
    /// Selection kept nothing, so every imputed column was retained.
    pub selection_fallback: bool,
    pub feature_columns: Vec<String>,
    pub count_shifts: Vec<f64>,
    pub binarize_thresholds: Vec<f64>,
}

/// The same rows under the three transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformed {
    pub continuous: CleanDataset,
    pub counts: CleanDataset,
    pub binary: CleanDataset,
}

impl TransformManifest {
    /// Replays imputation, column selection, label encoding, and both
    /// discrete transforms on raw rows.
    pub fn apply(&self, table: &RawTable) -> Result<Transformed, Error> {
        let names: Vec<String> = self.imputation.iter().map(|c| c.name.clone()).collect();
        let idx = table
            .column_indices(&names)
            .map_err(|name| Error::Preprocess(PreprocessError::MissingLabelColumn { name }))?;
        let stats: Vec<ColumnStats> = self.imputation.iter().map(|c| c.stats.clone()).collect();
        let policy = ClampPolicy::new(
            self.imputation
                .iter()
                .filter(|c| !c.clamp_negative)
                .map(|c| c.name.clone()),
        );
        let filled = impute(&table.select_columns(&idx), &stats, &policy);
        let keep = filled
            .column_indices(&self.feature_columns)
            .map_err(|name| Error::Config(format!("manifest feature {name:?} is not an imputed column")))?;
        let map = LabelMap::from_class_names(self.class_names.clone());
        let continuous = to_dataset(&filled.select_columns(&keep), &map)?;
        let counts = CountTransform {
            shifts: self.count_shifts.clone(),
        }
        .apply(&continuous)?;
        let binary = Binarizer {
            thresholds: self.binarize_thresholds.clone(),
        }
        .apply(&continuous)?;
        Ok(Transformed {
            continuous,
            counts,
            binary,
        })
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn digest(&self) -> String {
        sha256_hex(self.to_json().as_bytes())
    }
}

/// Whole-file defect counts for one input column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnAudit {
    pub column: String,
    pub missing: usize,
    pub negative: usize,
    pub present: usize,
}

pub fn audit(table: &RawTable) -> Vec<ColumnAudit> {
    table
        .column_names()
        .iter()
        .zip(compute_column_stats(table))
        .map(|(name, s)| ColumnAudit {
            column: name.clone(),
            missing: s.missing_count,
            negative: s.negative_count,
            present: s.present_count,
        })
        .collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable document");
    s.push('\n');
    s
}

/// Reads the configured input and returns it with the SHA-256 of its bytes.
pub fn load_input(config: &RunConfig) -> Result<(RawTable, String), Error> {
    let path = config
        .input
        .as_ref()
        .ok_or_else(|| Error::Config("no input file given".into()))?;
    let bytes = fs::read(path).map_err(|source| PreprocessError::Io {
        path: path.clone(),
        source,
    })?;
    let options = LoadOptions {
        label_column: config.label_column.clone(),
        drop_columns: config.drop_columns.clone(),
    };
    let table = load_csv_from_reader(bytes.as_slice(), &options)?;
    Ok((table, sha256_hex(&bytes)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub manifest: TransformManifest,
    pub datasets: VariantDatasets,
}

/// Splits, fits every transform on the training rows, and applies the result
/// to both partitions. `select = false` keeps every usable column.
pub fn prepare(config: &RunConfig, raw: &RawTable, input_digest: &str, select: bool) -> Result<Prepared, Error> {
    if raw.n_rows() == 0 {
        return Err(Error::Config("input has no data rows".into()));
    }
    config.fit.validate()?;
    let label_map = LabelMap::fit(raw.labels(), config.class_order.as_deref())?;
    let labels = label_map.encode(raw.labels())?;
    let (train_idx, test_idx) = split_indices(&labels, label_map.class_names(), &config.split)?;
    let train_raw = raw.select_rows(&train_idx);
    let test_raw = raw.select_rows(&test_idx);

    let policy = ClampPolicy::new(config.signed_columns.iter().cloned());
    let mut dropped_columns = Vec::new();
    let mut imputation = Vec::new();
    for (name, stats) in train_raw.column_names().iter().zip(compute_column_stats(&train_raw)) {
        if stats.is_all_missing() {
            dropped_columns.push(name.clone());
        } else {
            imputation.push(ImputedColumn {
                name: name.clone(),
                stats,
                clamp_negative: policy.is_non_negative(name),
            });
        }
    }
    if imputation.is_empty() {
        return Err(Error::Config("no feature column has a finite training value".into()));
    }
    if !dropped_columns.is_empty() {
        log::warn!(
            "dropping columns with no training values: {}",
            dropped_columns.join(", ")
        );
    }

    let mut manifest = TransformManifest {
        version: MANIFEST_VERSION,
        input_digest: input_digest.to_string(),
        config: config.clone(),
        label_column: raw.label_column().to_string(),
        class_names: label_map.class_names().to_vec(),
        train_rows: train_idx.len(),
        test_rows: test_idx.len(),
        dropped_columns,
        feature_columns: imputation.iter().map(|c| c.name.clone()).collect(),
        imputation,
        selection: None,
        selection_fallback: false,
        count_shifts: Vec::new(),
        binarize_thresholds: Vec::new(),
    };
    // Provisional shapes so the full continuous training set can be built.
    let width = manifest.feature_columns.len();
    manifest.count_shifts = vec![0.0; width];
    manifest.binarize_thresholds = vec![0.0; width];
    let full_train = manifest.apply(&train_raw)?.continuous;

    if select {
        let s = &config.selection;
        let report = match s.method {
            SelectMethod::Chi2 => Some(select_top_k_chi2(&full_train, s.k, s.bins)?),
            SelectMethod::Corr => Some(select_by_correlation(&full_train, s.corr_threshold)?),
            SelectMethod::None => None,
        };
        if let Some(report) = report {
            if report.empty_selection {
                log::warn!("feature selection kept no columns; using all {width}");
                manifest.selection_fallback = true;
            } else {
                let names = full_train.column_names();
                manifest.feature_columns = report.selected_sorted().iter().map(|&j| names[j].clone()).collect();
            }
            manifest.selection = Some(report);
        }
    }

    let keep = full_train
        .column_names()
        .iter()
        .enumerate()
        .filter(|(_, n)| manifest.feature_columns.contains(n))
        .map(|(j, _)| j)
        .collect::<Vec<_>>();
    let train = full_train.select_columns(&keep);
    manifest.count_shifts = CountTransform::fit(&train).shifts;
    manifest.binarize_thresholds = Binarizer::fit(&train).thresholds;

    let train = manifest.apply(&train_raw)?;
    let test = manifest.apply(&test_raw)?;
    let datasets = VariantDatasets {
        continuous: SplitPair {
            train: train.continuous,
            test: test.continuous,
        },
        counts: SplitPair {
            train: train.counts,
            test: test.counts,
        },
        binary: SplitPair {
            train: train.binary,
            test: test.binary,
        },
    };
    Ok(Prepared { manifest, datasets })
}

/// Files written by a stage, in write order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Written {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl Written {
    fn text(&mut self, path: PathBuf, contents: &str) -> Result<(), Error> {
        fs::write(&path, contents).map_err(|source| Error::Write {
            path: path.clone(),
            source,
        })?;
        self.files.push(path);
        Ok(())
    }

    fn dataset(&mut self, path: PathBuf, data: &CleanDataset, label_column: &str) -> Result<(), Error> {
        let text = dataset_csv(data, label_column).map_err(|e| Error::Write {
            path: path.clone(),
            source: std::io::Error::other(e),
        })?;
        self.text(path, &text)
    }
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|source| Error::Write {
        path: dir.to_path_buf(),
        source,
    })
}

/// Renders a dataset as CSV with a trailing label column holding class names.
pub fn dataset_csv(data: &CleanDataset, label_column: &str) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = data.column_names().iter().map(String::as_str).collect();
    header.push(label_column);
    w.write_record(&header)?;
    let names = data.class_names();
    for (row, &label) in data.features().iter_rows().zip(data.labels()) {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(names[label].clone());
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn transform_prefix(t: Transform) -> &'static str {
    match t {
        Transform::Continuous => "continuous",
        Transform::Counts => "counts",
        Transform::Binary => "binary",
    }
}

fn write_datasets(out: &mut Written, dir: &Path, prepared: &Prepared) -> Result<(), Error> {
    let label = prepared.manifest.label_column.as_str();
    let d = &prepared.datasets;
    for pair in [&d.continuous, &d.counts, &d.binary] {
        let prefix = transform_prefix(pair.train.transform());
        out.dataset(dir.join(format!("{prefix}_train.csv")), &pair.train, label)?;
        out.dataset(dir.join(format!("{prefix}_test.csv")), &pair.test, label)?;
    }
    Ok(())
}

fn audit_csv(rows: &[ColumnAudit]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CleanOutcome {
    pub prepared: Prepared,
    pub audit: Vec<ColumnAudit>,
    pub written: Written,
}

/// Cleans the input without feature selection and writes the three
/// transformed train/test pairs, the manifest, and a defect summary.
pub fn run_clean(config: &RunConfig) -> Result<CleanOutcome, Error> {
    let (raw, digest) = load_input(config)?;
    let audit = audit(&raw);
    let prepared = prepare(config, &raw, &digest, false)?;
    let dir = &config.out;
    ensure_dir(dir)?;
    let mut written = Written::default();
    write_datasets(&mut written, dir, &prepared)?;
    written.text(dir.join("manifest.json"), &prepared.manifest.to_json())?;
    written.text(dir.join("defect_summary.csv"), &audit_csv(&audit))?;
    Ok(CleanOutcome {
        prepared,
        audit,
        written,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionDocument {
    pub input_digest: String,
    pub config: RunConfig,
    pub selection: Option<SelectionReport>,
    pub selection_fallback: bool,
    pub feature_columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectOutcome {
    pub document: SelectionDocument,
    pub written: Written,
}

/// Scores features on the cleaned training partition and writes the selection
/// with its manifest.
pub fn run_select(config: &RunConfig) -> Result<SelectOutcome, Error> {
    let (raw, digest) = load_input(config)?;
    let prepared = prepare(config, &raw, &digest, true)?;
    let m = &prepared.manifest;
    let document = SelectionDocument {
        input_digest: digest,
        config: config.clone(),
        selection: m.selection.clone(),
        selection_fallback: m.selection_fallback,
        feature_columns: m.feature_columns.clone(),
    };
    let dir = &config.out;
    ensure_dir(dir)?;
    let mut written = Written::default();
    written.text(dir.join("selection.json"), &to_json(&document))?;
    written.text(dir.join("manifest.json"), &m.to_json())?;
    Ok(SelectOutcome { document, written })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub config: RunConfig,
    pub comparison: ComparisonReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOutcome {
    pub prepared: Prepared,
    pub report: ComparisonReport,
    pub written: Written,
}

/// Runs clean, select, fit, and evaluate for all three variants and writes
/// every artefact of the run.
pub fn run_compare(config: &RunConfig) -> Result<CompareOutcome, Error> {
    let (raw, digest) = load_input(config)?;
    let prepared = prepare(config, &raw, &digest, true)?;
    let manifest_json = prepared.manifest.to_json();
    let (mut report, models) = compare_variants(&prepared.datasets, &config.fit)?;
    report.provenance.seed = Some(config.split.seed);
    report.provenance.input_digest = Some(digest);
    report.provenance.manifest_digest = Some(sha256_hex(manifest_json.as_bytes()));

    let dir = &config.out;
    ensure_dir(dir)?;
    let mut written = Written::default();
    write_datasets(&mut written, dir, &prepared)?;
    written.text(dir.join("manifest.json"), &manifest_json)?;
    for model in &models {
        let bytes = serialize_model(model);
        written.text(
            dir.join(format!("model_{}.json", model.variant())),
            std::str::from_utf8(&bytes).expect("model json is utf-8"),
        )?;
    }
    let doc = ReportDocument {
        config: config.clone(),
        comparison: report.clone(),
    };
    written.text(dir.join("report.json"), &to_json(&doc))?;
    for emitted in [emit_csv(&report, dir)?, emit_figures(&report, dir)?] {
        written.files.extend(emitted.files);
        written.warnings.extend(emitted.warnings);
    }
    for w in &written.warnings {
        log::warn!("{w}");
    }
    Ok(CompareOutcome {
        prepared,
        report,
        written,
    })
}
