use std::io::{Read, Write};

use super::{ClassifyError, Result};

/// Feature rows with class labels in `[0, n_classes)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
    n_classes: usize,
}

impl LabeledDataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(ClassifyError::InvalidShape(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if n_classes < 2 {
            return Err(ClassifyError::InvalidShape(format!("need at least 2 classes, got {n_classes}")));
        }
        let width = features.first().map_or(0, Vec::len);
        for (row, (x, y)) in features.iter().zip(&labels).enumerate() {
            if x.len() != width {
                return Err(ClassifyError::InvalidShape(format!("row {row} has {} features, expected {width}", x.len())));
            }
            if let Some(column) = x.iter().position(|v| !v.is_finite()) {
                return Err(ClassifyError::InvalidFeature { row, column, message: "not finite".into() });
            }
            if *y >= n_classes {
                return Err(ClassifyError::InvalidLabel { row, label: *y, n_classes });
            }
        }
        Ok(Self { features, labels, n_classes })
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for y in &self.labels {
            counts[*y] += 1;
        }
        counts
    }
}

/// Reads a dataset CSV: a header row, then one instance per row with the
/// integer label in the last column. Without `n_classes` the class count is
/// one more than the largest label (at least 2).
///
/// Parse errors report the 1-based data row and column.
pub fn read_dataset_csv<R: Read>(input: R, n_classes: Option<usize>) -> Result<LabeledDataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(input);
    let width = reader.headers()?.len();
    if width < 2 {
        return Err(ClassifyError::InvalidShape("need at least one feature column and a label column".into()));
    }
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        if record.len() != width {
            return Err(ClassifyError::Parse {
                row,
                column: record.len().min(width) + 1,
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        let mut x = Vec::with_capacity(width - 1);
        for (j, field) in record.iter().take(width - 1).enumerate() {
            let v: f64 = field.trim().parse().map_err(|e| ClassifyError::Parse {
                row,
                column: j + 1,
                message: format!("{field:?}: {e}"),
            })?;
            x.push(v);
        }
        let field = record[width - 1].trim();
        let y: usize = field.parse().map_err(|e| ClassifyError::Parse {
            row,
            column: width,
            message: format!("label {field:?}: {e}"),
        })?;
        features.push(x);
        labels.push(y);
    }
    let n_classes = n_classes.unwrap_or_else(|| labels.iter().max().map_or(2, |m| (m + 1).max(2)));
    LabeledDataset::new(features, labels, n_classes)
}

/// Writes `data` in the format read by [`read_dataset_csv`], with header
/// `f0,f1,...,label`.
pub fn write_dataset_csv<W: Write>(out: W, data: &LabeledDataset) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header: Vec<String> = (0..data.n_features()).map(|j| format!("f{j}")).collect();
    header.push("label".into());
    writer.write_record(&header)?;
    for (x, y) in data.features().iter().zip(data.labels()) {
        let mut record: Vec<String> = x.iter().map(f64::to_string).collect();
        record.push(y.to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
