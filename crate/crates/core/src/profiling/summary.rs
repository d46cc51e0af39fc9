use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Type-7 quantile (linear interpolation between order statistics) of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRow {
    pub cluster: usize,
    pub attribute: String,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    pub n: usize,
}

impl BoxRow {
    fn from_values(cluster: usize, attribute: &str, mut values: Vec<f64>) -> BoxRow {
        values.sort_by(f64::total_cmp);
        let n = values.len();
        BoxRow {
            cluster,
            attribute: attribute.to_string(),
            min: values[0],
            q1: quantile(&values, 0.25),
            median: quantile(&values, 0.5),
            q3: quantile(&values, 0.75),
            max: values[n - 1],
            mean: values.iter().sum::<f64>() / n as f64,
            n,
        }
    }

    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

/// Five-number summaries plus means, per (cluster, attribute).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub attributes: Vec<String>,
    pub rows: Vec<BoxRow>,
}

impl BoxStats {
    pub fn get(&self, cluster: usize, attribute: &str) -> Option<&BoxRow> {
        self.rows.iter().find(|r| r.cluster == cluster && r.attribute == attribute)
    }

    pub fn clusters(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.rows.iter().map(|r| r.cluster).collect();
        c.dedup();
        c
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(["cluster", "attribute", "min", "q1", "median", "q3", "max", "mean", "n"])?;
        for r in &self.rows {
            w.write_record([
                r.cluster.to_string(),
                r.attribute.clone(),
                r.min.to_string(),
                r.q1.to_string(),
                r.median.to_string(),
                r.q3.to_string(),
                r.max.to_string(),
                r.mean.to_string(),
                r.n.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Box statistics of every attribute within each non-empty cluster, ordered by cluster then attribute.
pub fn cluster_summary(matrix: &Matrix, attributes: &[String], assignments: &[usize]) -> Result<BoxStats> {
    if attributes.len() != matrix.ncols() {
        return Err(Error::LengthMismatch(attributes.len(), matrix.ncols()));
    }
    if assignments.len() != matrix.nrows() {
        return Err(Error::LengthMismatch(assignments.len(), matrix.nrows()));
    }
    let k = assignments.iter().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &a) in assignments.iter().enumerate() {
        members[a].push(i);
    }
    let mut rows = Vec::new();
    for (c, idx) in members.iter().enumerate().filter(|(_, m)| !m.is_empty()) {
        for (j, name) in attributes.iter().enumerate() {
            let values = idx.iter().map(|&i| matrix.get(i, j)).collect();
            rows.push(BoxRow::from_values(c, name, values));
        }
    }
    Ok(BoxStats {
        attributes: attributes.to_vec(),
        rows,
    })
}

/// Box statistics of the whole matrix, reported as cluster 0.
pub fn global_summary(matrix: &Matrix, attributes: &[String]) -> Result<BoxStats> {
    cluster_summary(matrix, attributes, &vec![0; matrix.nrows()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn type7_quartiles() {
        // h = 3p: q1 at h=0.75 -> 1 + 0.75, median at h=1.5 -> 2.5, q3 at h=2.25 -> 3.25
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.75), 3.25);
    }

    #[test]
    fn single_point_cluster() {
        let m = Matrix::from_rows(&[[4.0], [9.0]]).unwrap();
        let s = cluster_summary(&m, &["x".into()], &[0, 1]).unwrap();
        let r = s.get(1, "x").unwrap();
        assert_eq!([r.min, r.q1, r.median, r.q3, r.max], [9.0; 5]);
        assert_eq!(r.n, 1);
    }

    #[test]
    fn one_cluster_equals_global() {
        let m = Matrix::from_rows(&[[4.0, 1.0], [9.0, 0.0], [2.0, 2.0]]).unwrap();
        let attrs = vec!["a".to_string(), "b".to_string()];
        assert_eq!(cluster_summary(&m, &attrs, &[0, 0, 0]).unwrap(), global_summary(&m, &attrs).unwrap());
    }

    proptest! {
        #[test]
        fn five_numbers_ordered(v in prop::collection::vec(-1e6f64..1e6, 1..40)) {
            let rows: Vec<[f64; 1]> = v.iter().map(|&x| [x]).collect();
            let s = global_summary(&Matrix::from_rows(&rows).unwrap(), &["x".into()]).unwrap();
            let r = &s.rows[0];
            prop_assert!(r.min <= r.q1 && r.q1 <= r.median && r.median <= r.q3 && r.q3 <= r.max);
        }
    }
}
