use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::PreprocessLog;
use crate::error::{Error, Result};
use crate::table::{Cell, ColumnData, DataTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DuplicatePolicy {
    /// Every row whose id occurs more than once is removed.
    #[default]
    DropAll,
    KeepFirst,
}

fn id_key(cell: Cell) -> Option<String> {
    match cell {
        Cell::Number(x) => Some(x.to_string()),
        Cell::Label(s) => Some(s),
        Cell::Missing => None,
    }
}

/// Removes rows sharing an id value. Rows with a missing id are never duplicates.
pub fn drop_duplicates(
    table: &DataTable,
    id_column: &str,
    policy: DuplicatePolicy,
) -> Result<(DataTable, PreprocessLog)> {
    let idx = table
        .schema()
        .position(id_column)
        .ok_or_else(|| Error::ColumnNotFound(id_column.to_string()))?;
    let keys: Vec<Option<String>> = (0..table.nrows()).map(|r| id_key(table.cell(r, idx))).collect();

    let mut counts: HashMap<&str, usize> = HashMap::new();
    for k in keys.iter().flatten() {
        *counts.entry(k.as_str()).or_default() += 1;
    }

    let mut log = PreprocessLog::default();
    let mut seen: HashMap<&str, bool> = HashMap::new();
    let mut keep = Vec::with_capacity(keys.len());
    for k in &keys {
        let Some(k) = k.as_deref() else {
            keep.push(true);
            continue;
        };
        if counts[k] == 1 {
            keep.push(true);
            continue;
        }
        let first = !seen.contains_key(k);
        if first {
            log.dropped_duplicate_ids.push(k.to_string());
            seen.insert(k, true);
        }
        keep.push(policy == DuplicatePolicy::KeepFirst && first);
    }
    log.dropped_duplicate_rows = keep.iter().filter(|k| !**k).count();
    Ok((table.filter_rows(&keep)?, log))
}

/// Drops rows missing more than `max_fraction` of the listed columns.
pub fn drop_sparse_rows(
    table: &DataTable,
    columns: &[String],
    max_fraction: f64,
) -> Result<(DataTable, PreprocessLog)> {
    let idx: Vec<usize> = columns
        .iter()
        .map(|c| table.schema().position(c).ok_or_else(|| Error::ColumnNotFound(c.clone())))
        .collect::<Result<_>>()?;
    let mut log = PreprocessLog::default();
    if idx.is_empty() {
        return Ok((table.clone(), log));
    }
    let keep: Vec<bool> = (0..table.nrows())
        .map(|r| {
            let missing = idx.iter().filter(|&&c| table.columns()[c].is_missing(r)).count();
            missing as f64 / idx.len() as f64 <= max_fraction
        })
        .collect();
    log.dropped_sparse_rows = keep.iter().filter(|k| !**k).count();
    Ok((table.filter_rows(&keep)?, log))
}

/// Mean imputation for numeric columns, mode imputation for nominal ones.
/// Mode ties go to the lexicographically smallest label.
pub fn impute(table: &DataTable) -> Result<(DataTable, PreprocessLog)> {
    let mut log = PreprocessLog::default();
    let mut out = table.clone();
    for (spec, col) in table.schema().columns().iter().zip(table.columns()) {
        let missing = col.missing_count();
        if missing == 0 {
            continue;
        }
        if missing == col.len() {
            return Err(Error::FullyMissing(spec.name.clone()));
        }
        let filled = match col {
            ColumnData::Numeric(v) => {
                let (sum, n) = v.iter().flatten().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
                let mean = sum / n as f64;
                ColumnData::Numeric(v.iter().map(|x| Some(x.unwrap_or(mean))).collect())
            }
            ColumnData::Nominal(v) => {
                let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                for s in v.iter().flatten() {
                    *counts.entry(s.as_str()).or_default() += 1;
                }
                // max_by_key keeps the last maximum; iterate in reverse so the smallest label wins
                let mode = counts
                    .iter()
                    .rev()
                    .max_by_key(|(_, &c)| c)
                    .map(|(s, _)| s.to_string())
                    .expect("at least one observed label");
                ColumnData::Nominal(v.iter().map(|x| Some(x.clone().unwrap_or_else(|| mode.clone()))).collect())
            }
        };
        out = out.with_column(&spec.name, filled)?;
        log.imputed_cells.insert(spec.name.clone(), missing);
    }
    Ok((out, log))
}

/// Replaces every nominal column by integer codes assigned in lexicographic label order.
pub fn encode_nominal(table: &DataTable) -> Result<(DataTable, PreprocessLog)> {
    let mut log = PreprocessLog::default();
    let mut out = table.clone();
    for (spec, col) in table.schema().columns().iter().zip(table.columns()) {
        let ColumnData::Nominal(v) = col else { continue };
        if let Some(row) = v.iter().position(Option::is_none) {
            return Err(Error::MissingCell {
                column: spec.name.clone(),
                row,
            });
        }
        let mut codes: BTreeMap<String, usize> = v.iter().flatten().map(|s| (s.clone(), 0)).collect();
        for (i, code) in codes.values_mut().enumerate() {
            *code = i;
        }
        let encoded = v
            .iter()
            .flatten()
            .map(|s| Some(codes[s.as_str()] as f64))
            .collect();
        out = out.with_column(&spec.name, ColumnData::Numeric(encoded))?;
        log.encoded_columns.insert(spec.name.clone(), codes);
    }
    Ok((out, log))
}
