use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{AttributeKind, ColumnData, DataTable, Schema};
use crate::error::{Error, Result};

pub const DEFAULT_MISSING_TOKEN: &str = "NA";

#[derive(Debug, Clone)]
pub struct CsvOptions {
    /// Cells equal to this token are read as missing and missing cells are written as it.
    /// Empty cells are always read as missing.
    pub missing_token: String,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            missing_token: DEFAULT_MISSING_TOKEN.to_string(),
        }
    }
}

/// Reads a headed CSV file against `schema`.
///
/// Header order is free. Columns present in the schema but absent from the
/// header are left out of the resulting table, whose columns follow schema
/// order.
pub fn read_csv(path: impl AsRef<Path>, schema: &Schema, missing_token: &str) -> Result<DataTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv_with(
        file,
        schema,
        &CsvOptions {
            missing_token: missing_token.to_string(),
        },
    )
}

pub fn read_csv_with<R: std::io::Read>(reader: R, schema: &Schema, opts: &CsvOptions) -> Result<DataTable> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();

    let mut header_pos: HashMap<&str, usize> = HashMap::new();
    for (i, name) in header.iter().enumerate() {
        if schema.get(name).is_none() {
            return Err(Error::UnknownColumn(name.to_string()));
        }
        if header_pos.insert(name, i).is_some() {
            return Err(Error::DuplicateColumn(name.to_string()));
        }
    }

    let specs: Vec<_> = schema
        .columns()
        .iter()
        .filter(|c| header_pos.contains_key(c.name.as_str()))
        .cloned()
        .collect();
    let sources: Vec<usize> = specs.iter().map(|c| header_pos[c.name.as_str()]).collect();
    let mut columns: Vec<ColumnData> = specs
        .iter()
        .map(|c| match c.kind {
            AttributeKind::Numeric => ColumnData::Numeric(Vec::new()),
            AttributeKind::Nominal => ColumnData::Nominal(Vec::new()),
        })
        .collect();

    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        for ((col, spec), &src) in columns.iter_mut().zip(&specs).zip(&sources) {
            let raw = record.get(src).unwrap_or("");
            let missing = raw.is_empty() || raw == opts.missing_token;
            match col {
                ColumnData::Numeric(v) => {
                    if missing {
                        v.push(None);
                    } else {
                        let x: f64 = raw.trim().parse().map_err(|_| Error::ParseNumeric {
                            row,
                            column: spec.name.clone(),
                            value: raw.to_string(),
                        })?;
                        if !x.is_finite() {
                            return Err(Error::ParseNumeric {
                                row,
                                column: spec.name.clone(),
                                value: raw.to_string(),
                            });
                        }
                        v.push(Some(x));
                    }
                }
                ColumnData::Nominal(v) => v.push((!missing).then(|| raw.to_string())),
            }
        }
    }

    DataTable::new(Schema::new(specs)?, columns)
}

/// Writes the table with a header row; missing cells become `NA`.
pub fn write_csv(table: &DataTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_csv_to(table, &mut out, DEFAULT_MISSING_TOKEN)?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn write_csv_to<W: Write>(table: &DataTable, out: W, missing_token: &str) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(table.schema().names())?;
    let mut record: Vec<String> = Vec::with_capacity(table.ncols());
    for row in 0..table.nrows() {
        record.clear();
        for col in table.columns() {
            let s = match col {
                ColumnData::Numeric(v) => v[row].map_or_else(|| missing_token.to_string(), |x| x.to_string()),
                ColumnData::Nominal(v) => v[row].clone().unwrap_or_else(|| missing_token.to_string()),
            };
            record.push(s);
        }
        wtr.write_record(&record)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}
