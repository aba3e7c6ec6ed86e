//! Observation CSV files: one observation per row, no header, optionally
//! led by a truth label column.

use std::collections::HashMap;
use std::io::Read;

use anyhow::{bail, Context, Result};

use nnpc::spectra::Observation;

#[derive(Debug, Clone, Copy, Default)]
pub struct ReadOptions {
    pub truth: bool,
    pub pad_zeros: bool,
    pub remove_mean: bool,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub observations: Vec<Observation>,
    /// Truth labels renumbered by first appearance.
    pub truth: Option<Vec<usize>>,
    /// Original lengths before padding.
    pub lengths: Vec<usize>,
}

pub fn read_dataset(reader: impl Read, options: ReadOptions) -> Result<Dataset> {
    let mut csv = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    for (r, record) in csv.records().enumerate() {
        let record = record.with_context(|| format!("row {}", r + 1))?;
        let mut fields: Vec<&str> = record.iter().collect();
        while fields.last() == Some(&"") {
            fields.pop();
        }
        if options.truth {
            if fields.is_empty() {
                bail!("row {} has no label column", r + 1);
            }
            names.push(fields.remove(0).to_string());
        }
        let values = fields
            .iter()
            .enumerate()
            .map(|(c, f)| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .with_context(|| format!("row {}, value {}: {f:?} is not a finite number", r + 1, c + 1))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(values);
    }
    if rows.is_empty() {
        bail!("input contains no observations");
    }

    let lengths: Vec<usize> = rows.iter().map(Vec::len).collect();
    let max = *lengths.iter().max().expect("nonempty");
    let min = *lengths.iter().min().expect("nonempty");
    if min != max && !options.pad_zeros {
        bail!("rows have lengths between {min} and {max}; pass --pad-zeros to zero-pad to {max}");
    }
    if max < 2 {
        bail!("observations need at least 2 samples");
    }
    let observations = rows
        .into_iter()
        .enumerate()
        .map(|(id, mut row)| {
            if options.remove_mean && !row.is_empty() {
                let mean = row.iter().sum::<f64>() / row.len() as f64;
                row.iter_mut().for_each(|v| *v -= mean);
            }
            row.resize(max, 0.0);
            Observation::new(id, row).with_context(|| format!("row {}", id + 1))
        })
        .collect::<Result<Vec<_>>>()?;

    let truth = options.truth.then(|| {
        let mut ids = HashMap::new();
        names
            .iter()
            .map(|name| {
                let next = ids.len();
                *ids.entry(name.as_str()).or_insert(next)
            })
            .collect()
    });
    Ok(Dataset { observations, truth, lengths })
}
