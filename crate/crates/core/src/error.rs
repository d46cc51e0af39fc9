use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("column `{0}` is not declared in the schema")]
    UnknownColumn(String),
    #[error("column `{0}` appears more than once")]
    DuplicateColumn(String),
    #[error("column `{0}` not found")]
    ColumnNotFound(String),
    #[error("cannot parse `{value}` as a number (row {row}, column `{column}`)")]
    ParseNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("column `{column}` has a missing cell at row {row}; impute first")]
    MissingCell { column: String, row: usize },
    #[error("column `{0}` is nominal, expected numeric")]
    NotNumeric(String),
    #[error("column `{0}` has no observed values")]
    FullyMissing(String),
    #[error("row {row} has {found} cells, schema has {expected} columns")]
    RowWidth {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("cell type does not match column `{0}`")]
    CellKind(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("vector is constant (zero variance)")]
    ConstantVector,
    #[error("matrix contains non-finite values")]
    NonFinite,
    #[error("invalid number of clusters k={k} for n={n}")]
    InvalidK { k: usize, n: usize },
    #[error("dissimilarity matrix is not a valid metric matrix: {0}")]
    InvalidDissimilarity(String),
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("unknown stage `{name}`; known stages: {known}")]
    UnknownStage { name: String, known: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("ratings contain no raters or no attributes")]
    EmptyRatings,
    #[error("score {value} out of range 1..=7 (rater {rater}, attribute `{attribute}`)")]
    ScoreOutOfRange {
        rater: usize,
        attribute: String,
        value: i64,
    },
    #[error("expenditure attribute `{0}` is absent from the selfishness ranking")]
    UnrankedAttribute(String),
    #[error("no group specifications given")]
    EmptySpecs,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
