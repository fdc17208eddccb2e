//! Sample CSV ingestion.

use std::path::Path;

use crate::CliError;

/// How the `y` column is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum YSpace {
    /// Belonging degrees in `[0, 1]`.
    Logical,
    /// Perception values in `[-1, +1]`, mapped with `(1 + y) / 2`.
    Perception,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputMapping {
    /// Unbounded targets mapped with `(1 + tanh(y)) / 2`.
    Tanh,
}

/// One parsed row with its 1-based line number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub line: u64,
    pub x: f64,
    pub y: f64,
}

/// Reads two-column `x,y` rows. A non-numeric first row is a header; lines
/// starting with `#` are skipped.
pub fn read_rows(path: &Path) -> Result<Vec<Row>, CliError> {
    let text = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_slice());
    // Record positions give exact byte offsets; line counts are derived from them.
    let line_at = |byte: u64| {
        let mut start = byte as usize;
        while matches!(text.get(start), Some(b'\r' | b'\n')) {
            start += 1;
        }
        1 + text[..start].iter().filter(|&&b| b == b'\n').count() as u64
    };

    let mut rows = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        })?;
        let line = record.position().map_or(0, |p| line_at(p.byte()));
        if record.get(0).is_some_and(|c| c.starts_with('#')) || (record.len() == 1 && record[0].is_empty()) {
            continue;
        }
        if std::mem::take(&mut first) && record.get(0).is_some_and(|c| c.parse::<f64>().is_err()) {
            continue;
        }
        if record.len() != 2 {
            return Err(CliError::Parse(format!(
                "line {line}: expected 2 columns (x,y), found {}",
                record.len()
            )));
        }
        let cell = |j: usize, name: &str| -> Result<f64, CliError> {
            record[j].parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                CliError::Parse(format!("line {line}: {name} = {:?} is not a finite number", &record[j]))
            })
        };
        rows.push(Row {
            line,
            x: cell(0, "x")?,
            y: cell(1, "y")?,
        });
    }
    if rows.is_empty() {
        return Err(CliError::Parse(format!("{}: no samples", path.display())));
    }
    Ok(rows)
}

/// Brings `y` into logical space, rejecting values the chosen space cannot
/// hold.
pub fn logical_y(row: &Row, space: YSpace, mapping: Option<OutputMapping>) -> Result<f64, CliError> {
    if let Some(OutputMapping::Tanh) = mapping {
        return Ok(0.5 * (1.0 + row.y.tanh()));
    }
    match space {
        YSpace::Logical if (0.0..=1.0).contains(&row.y) => Ok(row.y),
        YSpace::Logical => Err(CliError::Parse(format!(
            "line {}: y = {} is outside [0, 1]; pass --y-space perception for values in [-1, 1] \
             or --map-output tanh for unbounded targets",
            row.line, row.y
        ))),
        YSpace::Perception if (-1.0..=1.0).contains(&row.y) => Ok(0.5 * (1.0 + row.y)),
        YSpace::Perception => Err(CliError::Parse(format!(
            "line {}: y = {} is outside [-1, 1]",
            row.line, row.y
        ))),
    }
}
