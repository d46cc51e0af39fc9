//! Cleaning pipeline: duplicate removal, sparse-row filtering, imputation,
//! correlation pruning, nominal encoding, stage selection and scaling.

mod clean;
mod correlation;
mod scale;
mod stage;

pub use clean::{drop_duplicates, drop_sparse_rows, encode_nominal, impute, DuplicatePolicy};
pub use correlation::{pearson, prune_correlated};
pub use scale::scale;
pub use stage::{select_stage, StageSpec, TIME_COLUMNS};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::table::DataTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrunedPair {
    pub kept: String,
    pub removed: String,
    pub r: f64,
}

/// What each cleaning step did. Steps return partial logs that are merged by
/// [`PreprocessLog::absorb`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PreprocessLog {
    pub dropped_duplicate_ids: Vec<String>,
    pub dropped_duplicate_rows: usize,
    pub dropped_sparse_rows: usize,
    pub dropped_columns: Vec<String>,
    pub imputed_cells: BTreeMap<String, usize>,
    pub pruned_pairs: Vec<PrunedPair>,
    pub encoded_columns: BTreeMap<String, BTreeMap<String, usize>>,
    pub stage: Option<String>,
    pub notes: Vec<String>,
}

impl PreprocessLog {
    pub fn absorb(&mut self, other: PreprocessLog) {
        self.dropped_duplicate_ids.extend(other.dropped_duplicate_ids);
        self.dropped_duplicate_rows += other.dropped_duplicate_rows;
        self.dropped_sparse_rows += other.dropped_sparse_rows;
        self.dropped_columns.extend(other.dropped_columns);
        for (k, v) in other.imputed_cells {
            *self.imputed_cells.entry(k).or_default() += v;
        }
        self.pruned_pairs.extend(other.pruned_pairs);
        self.encoded_columns.extend(other.encoded_columns);
        if other.stage.is_some() {
            self.stage = other.stage;
        }
        self.notes.extend(other.notes);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessOptions {
    pub id_column: String,
    pub duplicate_policy: DuplicatePolicy,
    /// Columns removed before imputation regardless of stage.
    pub drop_columns: Vec<String>,
    /// Rows missing more than this fraction of the stage's columns are dropped.
    pub max_missing_fraction: f64,
    pub correlation_threshold: f64,
    pub stage: StageSpec,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            id_column: "pid".into(),
            duplicate_policy: DuplicatePolicy::DropAll,
            drop_columns: vec!["occupation".into()],
            max_missing_fraction: 0.5,
            correlation_threshold: 0.95,
            stage: StageSpec::a(),
        }
    }
}

/// Runs the full cleaning pipeline in its fixed order.
///
/// Running it again on its own output returns the same table.
pub fn preprocess(table: &DataTable, opts: &PreprocessOptions) -> Result<(DataTable, PreprocessLog)> {
    let mut log = PreprocessLog::default();

    let mut t = if table.schema().get(&opts.id_column).is_some() {
        let (t, l) = drop_duplicates(table, &opts.id_column, opts.duplicate_policy)?;
        log.absorb(l);
        t
    } else {
        log.notes.push(format!(
            "id column `{}` absent; duplicate removal skipped",
            opts.id_column
        ));
        table.clone()
    };

    let present: Vec<String> = opts
        .drop_columns
        .iter()
        .filter(|c| t.schema().get(c).is_some())
        .cloned()
        .collect();
    if !present.is_empty() {
        t = t.retain_columns(|c| !present.contains(&c.name));
        log.dropped_columns.extend(present);
    }

    let stage_columns = opts.stage.retained_columns(t.schema());
    let (t, l) = drop_sparse_rows(&t, &stage_columns, opts.max_missing_fraction)?;
    log.absorb(l);
    let (t, l) = impute(&t)?;
    log.absorb(l);
    let (t, l) = prune_correlated(&t, opts.correlation_threshold)?;
    log.absorb(l);
    let (t, l) = encode_nominal(&t)?;
    log.absorb(l);
    let (t, l) = select_stage(&t, &opts.stage);
    log.absorb(l);
    Ok((t, log))
}
