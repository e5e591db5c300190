//! Figure output: CSV data tables and self-contained SVG charts for a
//! [`ComparisonReport`](crate::eval::ComparisonReport).

mod csv_tables;
mod svg;

pub use csv_tables::{emit_csv, Emitted};
pub use svg::{emit_figures, emit_svg, figure_specs, write_svg, ChartKind, ChartSpec, Series};

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid chart spec: {0}")]
    InvalidSpec(String),
}

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}
