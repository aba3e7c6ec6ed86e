//! Turns a directory of per-sequence trajectory CSVs into one observation
//! file for `cluster`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

/// Column picked from every sequence file: a header name, or a 0-based
/// index when no header matches.
#[derive(Debug, Clone)]
pub struct ColumnSelector(pub String);

impl ColumnSelector {
    fn resolve(&self, headers: &csv::StringRecord, file: &Path) -> Result<usize> {
        if let Some(i) = headers.iter().position(|h| h == self.0) {
            return Ok(i);
        }
        match self.0.parse::<usize>() {
            Ok(i) if i < headers.len() => Ok(i),
            _ => bail!(
                "{}: no column {:?} (columns: {})",
                file.display(),
                self.0,
                headers.iter().collect::<Vec<_>>().join(", ")
            ),
        }
    }
}

/// Sequence CSV files in `dir`, sorted by name.
pub fn sequence_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        bail!("no .csv files in {}", dir.display());
    }
    Ok(files)
}

/// Reads the selected column of one sequence file. Blank cells end the
/// sequence only if every later cell is blank too.
pub fn read_sequence(path: &Path, column: &ColumnSelector) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().with_context(|| path.display().to_string())?.clone();
    let col = column.resolve(&headers, path)?;
    let mut cells = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: row {}", path.display(), r + 2))?;
        cells.push(record.get(col).unwrap_or("").to_string());
    }
    while cells.last().is_some_and(String::is_empty) {
        cells.pop();
    }
    cells
        .iter()
        .enumerate()
        .map(|(r, c)| {
            c.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .with_context(|| format!("{}: row {}: {c:?} is not a finite number", path.display(), r + 2))
        })
        .collect()
}

/// Reads a `file,label` CSV (with header) keyed by file name or stem.
pub fn read_labels(text: &str) -> Result<HashMap<String, String>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut labels = HashMap::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("labels row {}", r + 2))?;
        let (Some(file), Some(label)) = (record.get(0), record.get(1)) else {
            bail!("labels row {} needs `file,label`", r + 2);
        };
        labels.insert(file.to_string(), label.to_string());
    }
    Ok(labels)
}

fn label_for<'a>(labels: &'a HashMap<String, String>, path: &Path) -> Result<&'a str> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    let stem = path.file_stem().and_then(|n| n.to_str()).unwrap_or_default();
    labels.get(name).or_else(|| labels.get(stem)).map(String::as_str).with_context(|| format!("no label for {name}"))
}

/// Builds the `cluster` input: one row per file, prefixed by its label when
/// `labels` is given.
pub fn convert(dir: &Path, column: &ColumnSelector, labels: Option<&HashMap<String, String>>) -> Result<String> {
    let mut out = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for path in sequence_files(dir)? {
        let values = read_sequence(&path, column)?;
        if values.is_empty() {
            bail!("{} has no samples in the selected column", path.display());
        }
        let mut row: Vec<String> = Vec::with_capacity(values.len() + 1);
        if let Some(labels) = labels {
            row.push(label_for(labels, &path)?.to_string());
        }
        row.extend(values.iter().map(f64::to_string));
        out.write_record(&row)?;
    }
    Ok(String::from_utf8(out.into_inner()?).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converts_directory() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b.csv"), "frame,rfoot_y\n1,0.5\n2,-1.25\n").unwrap();
        fs::write(dir.path().join("a.csv"), "frame,rfoot_y\n1,2\n2,3\n3,4\n4,\n").unwrap();
        fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let by_name = convert(dir.path(), &ColumnSelector("rfoot_y".into()), None).unwrap();
        assert_eq!(by_name, "2,3,4\n0.5,-1.25\n");
        let labels = read_labels("file,label\na,walk\nb.csv,run\n").unwrap();
        let by_index = convert(dir.path(), &ColumnSelector("1".into()), Some(&labels)).unwrap();
        assert_eq!(by_index, "walk,2,3,4\nrun,0.5,-1.25\n");
    }

    #[test]
    fn reports_missing_pieces() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.csv"), "x\n1\n,\n2\n").unwrap();
        assert!(convert(dir.path(), &ColumnSelector("x".into()), None).is_err());
        assert!(convert(dir.path(), &ColumnSelector("y".into()), None).is_err());
        fs::write(dir.path().join("a.csv"), "x\n1\n2\n").unwrap();
        assert!(convert(dir.path(), &ColumnSelector("x".into()), Some(&HashMap::new())).is_err());
    }
}
