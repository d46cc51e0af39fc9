use super::{PreprocessLog, PrunedPair, TIME_COLUMNS};
use crate::error::{Error, Result};
use crate::table::{AttributeCategory, ColumnData, DataTable};

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument("pearson needs at least two observations".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantVector);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

fn complete_pairs(a: &[Option<f64>], b: &[Option<f64>]) -> (Vec<f64>, Vec<f64>) {
    a.iter()
        .zip(b)
        .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
        .unzip()
}

fn is_constant(v: &[Option<f64>]) -> bool {
    let mut it = v.iter().flatten();
    match it.next() {
        Some(first) => it.all(|x| x == first),
        None => true,
    }
}

/// Removes the later column of every numeric pair with `|r| > threshold`.
///
/// Columns are visited in schema order and compared only against the columns
/// kept so far. A removed column is logged against the survivor it correlates
/// with most strongly. Identifier and contact-time columns are never
/// considered; constant columns are kept but skipped.
pub fn prune_correlated(table: &DataTable, threshold: f64) -> Result<(DataTable, PreprocessLog)> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "correlation threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let mut log = PreprocessLog::default();
    let mut survivors: Vec<(&str, &[Option<f64>])> = Vec::new();
    let mut removed: Vec<String> = Vec::new();

    for (spec, col) in table.schema().columns().iter().zip(table.columns()) {
        let ColumnData::Numeric(values) = col else { continue };
        if spec.category == AttributeCategory::Identifier || TIME_COLUMNS.contains(&spec.name.as_str()) {
            continue;
        }
        if is_constant(values) {
            log.notes.push(format!("column `{}` is constant; skipped by correlation pruning", spec.name));
            continue;
        }
        let mut strongest: Option<(&str, f64)> = None;
        for &(name, other) in &survivors {
            let (a, b) = complete_pairs(other, values);
            let Ok(r) = pearson(&a, &b) else { continue };
            if r.abs() > threshold && strongest.is_none_or(|(_, best)| r.abs() > best.abs()) {
                strongest = Some((name, r));
            }
        }
        match strongest {
            Some((kept, r)) => {
                log.pruned_pairs.push(PrunedPair {
                    kept: kept.to_string(),
                    removed: spec.name.clone(),
                    r,
                });
                removed.push(spec.name.clone());
            }
            None => survivors.push((spec.name.as_str(), values)),
        }
    }

    let out = table.retain_columns(|c| !removed.contains(&c.name));
    Ok((out, log))
}
