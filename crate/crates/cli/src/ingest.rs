//! CSV ingestion into a dense price series.
//!
//! Rows must be in chronological order. The header row is auto-detected: if
//! the selected cell of the first row does not parse as a number, the row is
//! treated as a header. Any row with a missing or non-numeric value in the
//! selected column is rejected with its 1-based row number.

use std::path::Path;

use chaincast_core::PriceSeries;

use crate::error::CliError;

/// Which column holds the value series.
#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    /// Column index (as digits) or header name; the last column when unset.
    pub column: Option<String>,
    pub delimiter: u8,
}

impl IngestOptions {
    pub fn new(column: Option<String>, delimiter: u8) -> Self {
        Self { column, delimiter }
    }
}

enum Selector {
    Index(usize),
    Last,
    Name(String),
}

fn selector(column: &Option<String>) -> Selector {
    match column {
        None => Selector::Last,
        Some(text) => match text.parse::<usize>() {
            Ok(i) => Selector::Index(i),
            Err(_) => Selector::Name(text.clone()),
        },
    }
}

pub fn ingest_csv(path: &Path, opts: &IngestOptions) -> Result<PriceSeries, CliError> {
    let raw = std::fs::read_to_string(path).map_err(|_| CliError::InputNotFound {
        path: path.to_path_buf(),
    })?;
    let delimiter = if opts.delimiter == 0 { b',' } else { opts.delimiter };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(delimiter)
        .from_reader(raw.as_bytes());

    let mut records = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            row: Some(i + 1),
            detail: e.to_string(),
        })?;
        records.push(record);
    }
    if records.is_empty() {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            row: None,
            detail: "file has no rows".into(),
        });
    }

    let sel = selector(&opts.column);
    let first = &records[0];
    // resolve the column and decide whether row 1 is a header
    let (index, first_data_row) = match &sel {
        Selector::Index(i) => {
            let header = first.get(*i).map_or(true, |c| !is_number(c));
            (*i, if header { 1 } else { 0 })
        }
        Selector::Last => {
            let i = first.len().saturating_sub(1);
            let header = first.get(i).map_or(true, |c| !is_number(c));
            if header {
                // the data rows may be wider than the header; re-resolve below
                (usize::MAX, 1)
            } else {
                (i, 0)
            }
        }
        Selector::Name(name) => {
            let found = first
                .iter()
                .position(|c| c.trim().eq_ignore_ascii_case(name));
            match found {
                Some(i) => (i, 1),
                None => {
                    return Err(CliError::Config {
                        detail: format!("column '{name}' not found in header"),
                    })
                }
            }
        }
    };

    let mut values = Vec::with_capacity(records.len());
    for (i, record) in records.iter().enumerate().skip(first_data_row) {
        let row = i + 1; // 1-based, counting the header row
        let col = if index == usize::MAX {
            record.len().saturating_sub(1)
        } else {
            index
        };
        let cell = record.get(col).map(str::trim).unwrap_or("");
        if cell.is_empty() {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                row: Some(row),
                detail: format!("missing value in column {col}"),
            });
        }
        let value: f64 = cell.parse().map_err(|_| CliError::Parse {
            path: path.to_path_buf(),
            row: Some(row),
            detail: format!("'{cell}' in column {col} is not a number"),
        })?;
        if !value.is_finite() {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                row: Some(row),
                detail: format!("non-finite value in column {col}"),
            });
        }
        values.push(value);
    }

    if values.len() < 2 {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            row: None,
            detail: format!("need at least 2 data rows, found {}", values.len()),
        });
    }
    PriceSeries::new(values).map_err(CliError::Engine)
}

fn is_number(cell: &str) -> bool {
    cell.trim().parse::<f64>().map_or(false, |v| v.is_finite())
}
