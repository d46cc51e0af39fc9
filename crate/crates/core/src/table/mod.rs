//! Column-typed tables with a category schema and missingness tracking.

mod csv_io;
mod schema;

pub use csv_io::{read_csv, read_csv_with, write_csv, CsvOptions, DEFAULT_MISSING_TOKEN};
pub use schema::{AttributeCategory, AttributeKind, ColumnSpec, Schema};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    Number(f64),
    Label(String),
    Missing,
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }
}

/// Storage for a single column. `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ColumnData {
    Numeric(Vec<Option<f64>>),
    Nominal(Vec<Option<String>>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Nominal(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> AttributeKind {
        match self {
            ColumnData::Numeric(_) => AttributeKind::Numeric,
            ColumnData::Nominal(_) => AttributeKind::Nominal,
        }
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match self {
            ColumnData::Numeric(v) => v[row].is_none(),
            ColumnData::Nominal(v) => v[row].is_none(),
        }
    }

    pub fn missing_count(&self) -> usize {
        (0..self.len()).filter(|&r| self.is_missing(r)).count()
    }

    pub fn cell(&self, row: usize) -> Cell {
        match self {
            ColumnData::Numeric(v) => v[row].map_or(Cell::Missing, Cell::Number),
            ColumnData::Nominal(v) => v[row].clone().map_or(Cell::Missing, Cell::Label),
        }
    }

    pub fn as_numeric(&self) -> Option<&[Option<f64>]> {
        match self {
            ColumnData::Numeric(v) => Some(v),
            ColumnData::Nominal(_) => None,
        }
    }

    fn empty(kind: AttributeKind) -> Self {
        match kind {
            AttributeKind::Numeric => ColumnData::Numeric(Vec::new()),
            AttributeKind::Nominal => ColumnData::Nominal(Vec::new()),
        }
    }

    fn push(&mut self, cell: Cell, column: &str) -> Result<()> {
        match (self, cell) {
            (ColumnData::Numeric(v), Cell::Number(x)) => v.push(Some(x)),
            (ColumnData::Numeric(v), Cell::Missing) => v.push(None),
            (ColumnData::Nominal(v), Cell::Label(s)) => v.push(Some(s)),
            (ColumnData::Nominal(v), Cell::Missing) => v.push(None),
            _ => return Err(Error::CellKind(column.to_string())),
        }
        Ok(())
    }

    fn filter(&self, keep: &[bool]) -> ColumnData {
        fn pick<T: Clone>(v: &[T], keep: &[bool]) -> Vec<T> {
            v.iter()
                .zip(keep)
                .filter(|(_, &k)| k)
                .map(|(x, _)| x.clone())
                .collect()
        }
        match self {
            ColumnData::Numeric(v) => ColumnData::Numeric(pick(v, keep)),
            ColumnData::Nominal(v) => ColumnData::Nominal(pick(v, keep)),
        }
    }
}

/// An immutable, schema-typed table stored column-wise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataTable {
    schema: Schema,
    columns: Vec<ColumnData>,
    nrows: usize,
}

impl DataTable {
    pub fn new(schema: Schema, columns: Vec<ColumnData>) -> Result<Self> {
        if schema.len() != columns.len() {
            return Err(Error::LengthMismatch(columns.len(), schema.len()));
        }
        let nrows = columns.first().map_or(0, ColumnData::len);
        for (spec, col) in schema.columns().iter().zip(&columns) {
            if col.kind() != spec.kind {
                return Err(Error::CellKind(spec.name.clone()));
            }
            if col.len() != nrows {
                return Err(Error::LengthMismatch(col.len(), nrows));
            }
        }
        Ok(DataTable {
            schema,
            columns,
            nrows,
        })
    }

    pub fn from_rows(schema: Schema, rows: Vec<Vec<Cell>>) -> Result<Self> {
        let mut columns: Vec<ColumnData> = schema
            .columns()
            .iter()
            .map(|c| ColumnData::empty(c.kind))
            .collect();
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::RowWidth {
                    row: r,
                    found: row.len(),
                    expected: schema.len(),
                });
            }
            for ((col, spec), cell) in columns.iter_mut().zip(schema.columns()).zip(row) {
                col.push(cell, &spec.name)?;
            }
        }
        DataTable::new(schema, columns)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[ColumnData] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&ColumnData> {
        self.schema.position(name).map(|i| &self.columns[i])
    }

    pub fn cell(&self, row: usize, col: usize) -> Cell {
        self.columns[col].cell(row)
    }

    pub fn row(&self, row: usize) -> Vec<Cell> {
        self.columns.iter().map(|c| c.cell(row)).collect()
    }

    pub fn missing_count(&self) -> usize {
        self.columns.iter().map(ColumnData::missing_count).sum()
    }

    /// Keeps rows whose mask entry is `true`, preserving order.
    pub fn filter_rows(&self, keep: &[bool]) -> Result<DataTable> {
        if keep.len() != self.nrows {
            return Err(Error::LengthMismatch(keep.len(), self.nrows));
        }
        let columns = self.columns.iter().map(|c| c.filter(keep)).collect();
        DataTable::new(self.schema.clone(), columns)
    }

    /// Keeps the named columns, in their current schema order.
    pub fn retain_columns(&self, mut keep: impl FnMut(&ColumnSpec) -> bool) -> DataTable {
        let mut specs = Vec::new();
        let mut columns = Vec::new();
        for (spec, col) in self.schema.columns().iter().zip(&self.columns) {
            if keep(spec) {
                specs.push(spec.clone());
                columns.push(col.clone());
            }
        }
        DataTable {
            schema: Schema::new(specs).expect("subset of a valid schema"),
            columns,
            nrows: self.nrows,
        }
    }

    /// Replaces a column's data (and kind) in place of the old one.
    pub fn with_column(&self, name: &str, data: ColumnData) -> Result<DataTable> {
        let idx = self
            .schema
            .position(name)
            .ok_or_else(|| Error::ColumnNotFound(name.to_string()))?;
        let mut specs = self.schema.columns().to_vec();
        specs[idx].kind = data.kind();
        let mut columns = self.columns.clone();
        columns[idx] = data;
        DataTable::new(Schema::new(specs)?, columns)
    }

    /// Names of the numeric columns, in schema order.
    pub fn numeric_column_names(&self) -> Vec<String> {
        self.schema
            .columns()
            .iter()
            .filter(|c| c.kind == AttributeKind::Numeric)
            .map(|c| c.name.clone())
            .collect()
    }

    /// Dense `n × d` matrix of the requested numeric columns, in the order given.
    pub fn to_matrix(&self, columns: &[String]) -> Result<(Matrix, Vec<String>)> {
        let mut sources = Vec::with_capacity(columns.len());
        for name in columns {
            let col = self
                .column(name)
                .ok_or_else(|| Error::ColumnNotFound(name.clone()))?;
            let values = col
                .as_numeric()
                .ok_or_else(|| Error::NotNumeric(name.clone()))?;
            if let Some(row) = values.iter().position(Option::is_none) {
                return Err(Error::MissingCell {
                    column: name.clone(),
                    row,
                });
            }
            sources.push(values);
        }
        let d = columns.len();
        let mut m = Matrix::zeros(self.nrows, d);
        for (j, values) in sources.iter().enumerate() {
            for (i, v) in values.iter().enumerate() {
                m.set(i, j, v.expect("checked above"));
            }
        }
        Ok((m, columns.to_vec()))
    }
}

/// Free-function form of [`DataTable::to_matrix`].
pub fn to_matrix(table: &DataTable, columns: &[String]) -> Result<(Matrix, Vec<String>)> {
    table.to_matrix(columns)
}
