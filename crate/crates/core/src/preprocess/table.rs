use std::fs::File;
use std::io::Read;
use std::path::Path;

use super::PreprocessError;

pub const DEFAULT_LABEL_COLUMN: &str = "Label";

#[derive(Debug, Clone, PartialEq)]
pub struct LoadOptions {
    pub label_column: String,
    /// Columns ignored entirely (identifiers, timestamps, ...).
    pub drop_columns: Vec<String>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            label_column: DEFAULT_LABEL_COLUMN.to_string(),
            drop_columns: Vec::new(),
        }
    }
}

/// A parsed flow table before cleaning. Feature cells are `None` where the
/// source held `NaN`, `Infinity`, `-Infinity`, or nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    column_names: Vec<String>,
    cells: Vec<Option<f64>>,
    labels: Vec<String>,
    label_column: String,
}

impl RawTable {
    pub fn new(
        column_names: Vec<String>,
        cells: Vec<Option<f64>>,
        labels: Vec<String>,
        label_column: impl Into<String>,
    ) -> Result<Self, PreprocessError> {
        if cells.len() != labels.len() * column_names.len() {
            return Err(PreprocessError::DimensionMismatch {
                expected: labels.len() * column_names.len(),
                found: cells.len(),
            });
        }
        Ok(Self {
            column_names,
            cells,
            labels,
            label_column: label_column.into(),
        })
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_column(&self) -> &str {
        &self.label_column
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.column_names.len()
    }

    pub fn row(&self, r: usize) -> &[Option<f64>] {
        let w = self.n_cols();
        &self.cells[r * w..(r + 1) * w]
    }

    pub fn cell(&self, r: usize, c: usize) -> Option<f64> {
        self.cells[r * self.n_cols() + c]
    }

    pub(crate) fn cells_mut(&mut self) -> &mut [Option<f64>] {
        &mut self.cells
    }

    pub fn column(&self, c: usize) -> impl Iterator<Item = Option<f64>> + Clone + '_ {
        (0..self.n_rows()).map(move |r| self.cell(r, c))
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn missing_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_none()).count()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut cells = Vec::with_capacity(rows.len() * self.n_cols());
        for &r in rows {
            cells.extend_from_slice(self.row(r));
        }
        Self {
            column_names: self.column_names.clone(),
            cells,
            labels: rows.iter().map(|&r| self.labels[r].clone()).collect(),
            label_column: self.label_column.clone(),
        }
    }

    /// Keeps the given columns in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Self {
        let mut cells = Vec::with_capacity(self.n_rows() * columns.len());
        for r in 0..self.n_rows() {
            let row = self.row(r);
            cells.extend(columns.iter().map(|&c| row[c]));
        }
        Self {
            column_names: columns.iter().map(|&c| self.column_names[c].clone()).collect(),
            cells,
            labels: self.labels.clone(),
            label_column: self.label_column.clone(),
        }
    }

    /// Index of each named column. Errors on the first name that is missing.
    pub fn column_indices(&self, names: &[String]) -> Result<Vec<usize>, String> {
        names
            .iter()
            .map(|n| self.column_names.iter().position(|c| c == n).ok_or_else(|| n.clone()))
            .collect()
    }
}

fn parse_cell(raw: &str) -> Result<Option<f64>, ()> {
    let t = raw.trim();
    if t.is_empty() {
        return Ok(None);
    }
    match t.parse::<f64>() {
        // NaN, inf, Infinity, -Infinity all parse; they are treated as absent
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) => Ok(None),
        Err(_) => Err(()),
    }
}

/// Reads an RFC-4180 CSV with a header row. Header names are trimmed, which
/// matters for CIC-style exports that pad names with a leading space.
pub fn load_csv(path: impl AsRef<Path>, options: &LoadOptions) -> Result<RawTable, PreprocessError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| PreprocessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_csv_from_reader(file, options)
}

pub fn load_csv_from_reader<R: Read>(reader: R, options: &LoadOptions) -> Result<RawTable, PreprocessError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(h) => h.map_err(|e| PreprocessError::Csv(e.to_string()))?,
        None => return Err(PreprocessError::MissingHeader),
    };
    let header: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
    let label_index =
        header
            .iter()
            .position(|h| *h == options.label_column)
            .ok_or_else(|| PreprocessError::MissingLabelColumn {
                name: options.label_column.clone(),
            })?;
    let feature_indices: Vec<usize> = (0..header.len())
        .filter(|&i| i != label_index && !options.drop_columns.contains(&header[i]))
        .collect();
    let column_names: Vec<String> = feature_indices.iter().map(|&i| header[i].clone()).collect();

    let mut cells = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in records.enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| PreprocessError::Csv(e.to_string()))?;
        if record.len() == 1 && record.get(0).is_some_and(|s| s.trim().is_empty()) && header.len() > 1 {
            // blank line
            continue;
        }
        if record.len() != header.len() {
            return Err(PreprocessError::RaggedRow {
                row,
                expected: header.len(),
                found: record.len(),
            });
        }
        let label = record[label_index].trim();
        if label.is_empty() {
            return Err(PreprocessError::MissingLabel { row });
        }
        labels.push(label.to_string());
        for &c in &feature_indices {
            let raw = &record[c];
            let v = parse_cell(raw).map_err(|_| PreprocessError::UnparseableNumeric {
                row,
                column: header[c].clone(),
                value: raw.to_string(),
            })?;
            cells.push(v);
        }
    }
    RawTable::new(column_names, cells, labels, options.label_column.clone())
}
