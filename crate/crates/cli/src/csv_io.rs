//! CSV dataset format: a header row, one numeric column named `label`, every
//! other column a numeric feature. Expert knowledge is a separate file listing
//! known feature names, one per line.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use credible::data::{Dataset, KnowledgeVector};
use ndarray::{Array1, Array2};

use crate::CliError;

pub const LABEL_COLUMN: &str = "label";

/// Decimal form with 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_dataset(path: &Path, data: &Dataset) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    let mut header: Vec<&str> = data.feature_names.iter().map(String::as_str).collect();
    header.push(LABEL_COLUMN);
    w.write_record(&header).map_err(|e| CliError::io(path, e))?;
    for (row, y) in data.x.outer_iter().zip(&data.y) {
        let mut record: Vec<String> = row.iter().map(|&v| format_f64(v)).collect();
        record.push(format_f64(*y));
        w.write_record(&record).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_dataset(path: &Path) -> Result<Dataset, CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::io(path, e))?;
    let header = rdr.headers().map_err(|e| CliError::io(path, e))?.clone();
    let label_positions: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| *h == LABEL_COLUMN)
        .map(|(i, _)| i)
        .collect();
    let label_col = match label_positions.as_slice() {
        [i] => *i,
        [] => return Err(CliError::data(path, "header has no `label` column")),
        _ => return Err(CliError::data(path, "header has more than one `label` column")),
    };
    let names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_col)
        .map(|(_, h)| h.to_string())
        .collect();
    for (i, name) in names.iter().enumerate() {
        if name.is_empty() {
            return Err(CliError::data(path, format!("feature column {} has an empty name", i + 1)));
        }
        if names[..i].contains(name) {
            return Err(CliError::data(path, format!("duplicate feature name `{name}`")));
        }
    }

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let line = r + 2;
        let record = record.map_err(|e| CliError::data(path, format!("row {line}: {e}")))?;
        if record.len() != header.len() {
            return Err(CliError::data(
                path,
                format!("row {line}: expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                CliError::data(path, format!("row {line}, column `{}`: `{field}` is not a number", &header[c]))
            })?;
            if !v.is_finite() {
                return Err(CliError::data(path, format!("row {line}, column `{}`: value is not finite", &header[c])));
            }
            if c == label_col {
                labels.push(v);
            } else {
                values.push(v);
            }
        }
    }
    if labels.is_empty() {
        return Err(CliError::data(path, "no data rows"));
    }
    let x = Array2::from_shape_vec((labels.len(), names.len()), values).expect("row lengths were checked");
    Dataset::with_names(x, Array1::from(labels), names).map_err(|e| CliError::data(path, e.to_string()))
}

/// Reads known feature names, one per line; blank lines are ignored.
pub fn read_knowledge(path: &Path, feature_names: &[String]) -> Result<KnowledgeVector, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut known = vec![false; feature_names.len()];
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        let name = line.trim();
        if name.is_empty() {
            continue;
        }
        let pos = feature_names
            .iter()
            .position(|f| f == name)
            .ok_or_else(|| CliError::data(path, format!("line {}: unknown feature `{name}`", i + 1)))?;
        known[pos] = true;
    }
    Ok(KnowledgeVector::from_mask(&known))
}

pub fn write_knowledge(path: &Path, r: &KnowledgeVector, feature_names: &[String]) -> Result<(), CliError> {
    let mut f = File::create(path).map_err(|e| CliError::io(path, e))?;
    for (name, &v) in feature_names.iter().zip(r.as_slice()) {
        if v == 1.0 {
            writeln!(f, "{name}").map_err(|e| CliError::io(path, e))?;
        }
    }
    Ok(())
}
