use std::io::Write;

/// One row of a trajectory export.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub k: usize,
    pub truth: Vec<f64>,
    pub measurement: Vec<f64>,
    pub estimate: Vec<f64>,
    /// IMM mode probabilities; empty for the other filters.
    pub model_probs: Vec<f64>,
}

/// Writes trajectory rows as CSV with header
/// `k,truth_0..,measurement_0..,estimate_0..,prob_0..`. Column counts come
/// from the first row.
pub fn write_trajectory_csv<W: Write>(out: W, rows: &[TrajectoryRow]) -> csv::Result<()> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let Some(first) = rows.first() else {
        writer.write_record(["k"])?;
        return writer.flush().map_err(Into::into);
    };
    let mut header = vec!["k".to_string()];
    header.extend((0..first.truth.len()).map(|i| format!("truth_{i}")));
    header.extend((0..first.measurement.len()).map(|i| format!("measurement_{i}")));
    header.extend((0..first.estimate.len()).map(|i| format!("estimate_{i}")));
    header.extend((0..first.model_probs.len()).map(|i| format!("prob_{i}")));
    writer.write_record(&header)?;
    for row in rows {
        let mut record = vec![row.k.to_string()];
        record.extend(
            row.truth
                .iter()
                .chain(&row.measurement)
                .chain(&row.estimate)
                .chain(&row.model_probs)
                .map(|v| v.to_string()),
        );
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows() {
        let rows = vec![
            TrajectoryRow { k: 1, truth: vec![1.0, 2.0], measurement: vec![1.5], estimate: vec![1.2, 2.1], model_probs: vec![0.5, 0.5] },
            TrajectoryRow { k: 2, truth: vec![3.0, 2.0], measurement: vec![2.5], estimate: vec![2.9, 2.0], model_probs: vec![0.25, 0.75] },
        ];
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("k,truth_0,truth_1,measurement_0,estimate_0,estimate_1,prob_0,prob_1"));
        assert_eq!(lines.next(), Some("1,1,2,1.5,1.2,2.1,0.5,0.5"));
        assert!(!text.contains('\r'));
    }
}
