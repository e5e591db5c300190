use std::fs;
use std::path::{Path, PathBuf};

use super::{io_err, ReportError};
use crate::eval::ComparisonReport;

/// Files written by one emission plus any non-fatal notes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Emitted {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_io = |e: csv::Error| io_err(path)(std::io::Error::other(e));
    w.write_record(header).map_err(to_io)?;
    for r in rows {
        w.write_record(r).map_err(to_io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| io_err(path)(std::io::Error::other(e.to_string())))?;
    fs::write(path, bytes).map_err(io_err(path))
}

/// Writes `accuracy_table.csv`, `confusion_<variant>.csv` per variant, and
/// `per_class_metrics.csv`. Floats use shortest round-trip formatting, so every
/// number re-parses to the identical `f64`.
///
/// With fewer than two classes only the accuracy table is written.
pub fn emit_csv(report: &ComparisonReport, out_dir: &Path) -> Result<Emitted, ReportError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut emitted = Emitted::default();

    let path = out_dir.join("accuracy_table.csv");
    let header: Vec<String> = ["variant", "train_accuracy", "test_accuracy", "overfit_gap", "rank"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = report
        .variants
        .iter()
        .map(|r| {
            let rank = report.ranking.iter().position(|v| *v == r.variant).map_or(0, |p| p + 1);
            vec![
                r.variant.to_string(),
                r.train_accuracy.to_string(),
                r.test_accuracy.to_string(),
                r.overfit_gap.to_string(),
                rank.to_string(),
            ]
        })
        .collect();
    write_table(&path, &header, &rows)?;
    emitted.files.push(path);

    if report.provenance.class_names.len() < 2 {
        emitted
            .warnings
            .push("fewer than two classes: per-class tables skipped".to_string());
        return Ok(emitted);
    }

    for r in &report.variants {
        let path = out_dir.join(format!("confusion_{}.csv", r.variant));
        let mut header = vec!["true\\predicted".to_string()];
        header.extend(r.confusion.class_names.iter().cloned());
        let rows: Vec<Vec<String>> = r
            .confusion
            .counts
            .iter()
            .zip(&r.confusion.class_names)
            .map(|(counts, name)| {
                let mut row = vec![name.clone()];
                row.extend(counts.iter().map(u64::to_string));
                row
            })
            .collect();
        write_table(&path, &header, &rows)?;
        emitted.files.push(path);
    }

    let path = out_dir.join("per_class_metrics.csv");
    let header: Vec<String> = ["variant", "class", "precision", "recall", "support"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = report
        .variants
        .iter()
        .flat_map(|r| {
            r.per_class.iter().map(move |m| {
                vec![
                    r.variant.to_string(),
                    m.class.clone(),
                    m.precision.to_string(),
                    m.recall.to_string(),
                    m.support.to_string(),
                ]
            })
        })
        .collect();
    write_table(&path, &header, &rows)?;
    emitted.files.push(path);

    Ok(emitted)
}
