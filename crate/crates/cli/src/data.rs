use std::path::Path;

use ndarray::Array2;

use crate::error::CliError;

/// Response and covariates read from a CSV file.
#[derive(Debug)]
pub struct Dataset {
    pub y: Vec<f64>,
    pub x: Array2<f64>,
    pub y_col: String,
    pub x_cols: Vec<String>,
    /// Rows removed by listwise deletion.
    pub dropped: usize,
}

fn is_missing(field: &str) -> bool {
    let f = field.trim();
    f.is_empty() || f.eq_ignore_ascii_case("na") || f.eq_ignore_ascii_case("nan")
}

/// Reads `y_col` and `x_cols` from a comma-separated file with a header row.
///
/// A row with a missing value in any designated column is an error unless
/// `drop_missing` is set, in which case the row is skipped and counted.
pub fn read_dataset(
    path: &Path,
    y_col: &str,
    x_cols: &[String],
    drop_missing: bool,
) -> Result<Dataset, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
        .clone();
    let locate = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Data(format!("column `{name}` not found in header")))
    };
    let yi = locate(y_col)?;
    let xi = x_cols
        .iter()
        .map(|c| locate(c))
        .collect::<Result<Vec<_>, _>>()?;

    let mut y = Vec::new();
    let mut flat = Vec::new();
    let mut dropped = 0;
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| CliError::Data(format!("line {line}: {e}")))?;
        let fields: Vec<&str> = std::iter::once(yi)
            .chain(xi.iter().copied())
            .map(|i| record.get(i).unwrap_or(""))
            .collect();
        if fields.iter().any(|f| is_missing(f)) {
            if drop_missing {
                dropped += 1;
                continue;
            }
            return Err(CliError::Data(format!(
                "line {line}: missing value (use --drop-missing to skip such rows)"
            )));
        }
        let values = fields
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        CliError::Data(format!("line {line}: `{f}` is not a finite number"))
                    })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        y.push(values[0]);
        flat.extend_from_slice(&values[1..]);
    }
    if y.len() < 3 {
        return Err(CliError::Data(format!(
            "need at least 3 complete rows, got {}",
            y.len()
        )));
    }
    let x = Array2::from_shape_vec((y.len(), x_cols.len()), flat)
        .map_err(|e| CliError::Data(e.to_string()))?;
    Ok(Dataset {
        y,
        x,
        y_col: y_col.to_string(),
        x_cols: x_cols.to_vec(),
        dropped,
    })
}
