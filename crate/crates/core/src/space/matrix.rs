//! Distance-matrix input: comma-separated values, first row holding the point
//! identifiers, then one row per point. A leading label column is accepted.

use std::io::{Read, Write};
use std::path::Path;

use super::{validate_matrix, MetricSpaceSample};
use crate::error::{Constraint, Error, MatrixViolation, Result};

/// Default declared tolerance of matrix input.
pub const DEFAULT_INPUT_TOLERANCE: f64 = 1e-9;

pub fn load_distance_matrix(path: &Path, tolerance: f64) -> Result<MetricSpaceSample> {
    let file = std::fs::File::open(path)?;
    let label = format!("matrix:{}", path.display());
    parse_distance_matrix(file, &label, tolerance)
}

fn shape_error(detail: String) -> Error {
    Error::InvalidMatrix(vec![MatrixViolation {
        constraint: Constraint::Shape,
        witness: vec![],
        detail,
    }])
}

pub fn parse_distance_matrix<R: Read>(
    reader: R,
    label: &str,
    tolerance: f64,
) -> Result<MetricSpaceSample> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<String>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push(rec.iter().map(str::to_string).collect());
    }
    let Some((header, body)) = rows.split_first() else {
        return Err(shape_error("empty input".into()));
    };
    let labelled = header.first().is_some_and(|h| h.is_empty());
    let ids: Vec<String> = if labelled {
        header[1..].to_vec()
    } else {
        header.clone()
    };
    let n = ids.len();
    if n == 0 || body.len() != n {
        return Err(shape_error(format!(
            "{} identifiers but {} rows",
            n,
            body.len()
        )));
    }
    let mut d = Vec::with_capacity(n * n);
    for (i, row) in body.iter().enumerate() {
        let fields = if row.len() == n + 1 {
            &row[1..]
        } else {
            &row[..]
        };
        if fields.len() != n {
            return Err(shape_error(format!(
                "row {} has {} entries, expected {}",
                i + 1,
                fields.len(),
                n
            )));
        }
        for f in fields {
            let v: f64 = f
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: `{f}` is not a number", i + 1)))?;
            d.push(v);
        }
    }
    let violations = validate_matrix(&ids, &d, tolerance);
    if !violations.is_empty() {
        return Err(Error::InvalidMatrix(violations));
    }
    // symmetrize within tolerance
    for i in 0..n {
        d[i * n + i] = 0.0;
        for j in (i + 1)..n {
            let m = 0.5 * (d[i * n + j] + d[j * n + i]);
            d[i * n + j] = m;
            d[j * n + i] = m;
        }
    }
    Ok(MetricSpaceSample::from_matrix(
        label.to_string(),
        ids,
        d,
        tolerance,
    ))
}

/// Writes the distances of `space` in the format read by
/// [`parse_distance_matrix`]. Values use the shortest exact representation,
/// so the matrix reads back unchanged.
pub fn write_distance_matrix<W: Write>(space: &MetricSpaceSample, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(space.points.iter().map(|p| p.id.as_str()))?;
    let n = space.len();
    for i in 0..n {
        w.write_record((0..n).map(|j| space.d(i, j).to_string()))?;
    }
    w.flush()?;
    Ok(())
}
