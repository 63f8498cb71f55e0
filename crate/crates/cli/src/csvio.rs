//! Sample files: `x,f` with decimal (or `p/q`) literals, and the exact format
//! `x_exact,f_exact` whose fields are elements of Q(t) in text syntax.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use entrofunc::exactfield::{parse_field_element, FieldElement};
use entrofunc::families::parse_real;
use entrofunc::Error;

pub const FLOAT_HEADER: [&str; 2] = ["x", "f"];
pub const EXACT_HEADER: [&str; 2] = ["x_exact", "f_exact"];

fn open(path: &Path, header: [&str; 2]) -> Result<csv::Reader<File>, String> {
    let file = File::open(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let found = reader
        .headers()
        .map_err(|e| format!("{}: line 1: {e}", path.display()))?
        .clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(format!(
            "{}: line 1, column 1: expected header {:?}, found {:?}",
            path.display(),
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        ));
    }
    Ok(reader)
}

/// Reads `x,f` rows. Errors name the 1-based line and column.
pub fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>, String> {
    let mut reader = open(path, FLOAT_HEADER)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(format!(
                "{}: line {line}: expected 2 columns, found {}",
                path.display(),
                record.len()
            ));
        }
        let mut values = [0.0; 2];
        for (col, field) in record.iter().enumerate() {
            values[col] = parse_real(field).map_err(|_| {
                format!(
                    "{}: line {line}, column {}: invalid number {field:?}",
                    path.display(),
                    col + 1
                )
            })?;
        }
        rows.push((values[0], values[1]));
    }
    Ok(rows)
}

/// Reads `x_exact,f_exact` rows. Errors name the line, the column and the
/// character position inside the field.
pub fn read_exact_samples(path: &Path) -> Result<Vec<(FieldElement, FieldElement)>, String> {
    let mut reader = open(path, EXACT_HEADER)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(format!(
                "{}: line {line}: expected 2 columns, found {}",
                path.display(),
                record.len()
            ));
        }
        let parse = |col: usize| {
            let field = &record[col];
            parse_field_element(field).map_err(|e| match e {
                Error::Parse { column, message } => format!(
                    "{}: line {line}, column {}, character {column}: {message} in {field:?}",
                    path.display(),
                    col + 1
                ),
                other => format!(
                    "{}: line {line}, column {}: {other}",
                    path.display(),
                    col + 1
                ),
            })
        };
        rows.push((parse(0)?, parse(1)?));
    }
    Ok(rows)
}

/// Writes `x,f` rows with shortest round-trip formatting, so re-reading
/// reproduces the values bit for bit.
pub fn write_samples<W: Write>(out: W, rows: &[(f64, f64)]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FLOAT_HEADER)?;
    for (x, f) in rows {
        w.write_record([x.to_string(), f.to_string()])?;
    }
    w.flush()
}

pub fn write_exact_samples<W: Write>(
    out: W,
    rows: &[(FieldElement, FieldElement)],
) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EXACT_HEADER)?;
    for (x, f) in rows {
        w.write_record([x.to_string(), f.to_string()])?;
    }
    w.flush()
}
