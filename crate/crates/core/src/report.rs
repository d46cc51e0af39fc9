//! Serialized forms of sweep results: JSON summaries, score tables and assignment files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cluster::{Algorithm, SweepReport};
use crate::error::{Error, Result};

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummaryEntry {
    pub k: usize,
    pub objective: f64,
    pub seed: u64,
    pub iterations: usize,
    pub best_restart: usize,
    pub cluster_sizes: Vec<usize>,
    pub silhouette: Option<f64>,
    pub calinski: Option<f64>,
    pub assignment_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub algorithm: Algorithm,
    pub entries: Vec<SweepSummaryEntry>,
}

pub fn assignment_file_name(algorithm: Algorithm, k: usize) -> String {
    format!("assignments/{algorithm}_k{k:02}.csv")
}

impl SweepSummary {
    pub fn from_report(report: &SweepReport) -> SweepSummary {
        SweepSummary {
            algorithm: report.algorithm,
            entries: report
                .entries
                .iter()
                .map(|e| SweepSummaryEntry {
                    k: e.k,
                    objective: e.result.objective,
                    seed: e.result.seed,
                    iterations: e.result.iterations,
                    best_restart: e.best_restart,
                    cluster_sizes: e.result.cluster_sizes(),
                    silhouette: e.silhouette,
                    calinski: e.calinski.filter(|c| c.is_finite()),
                    assignment_file: assignment_file_name(report.algorithm, e.k),
                })
                .collect(),
        }
    }
}

/// Writes the JSON summary as `sweep_<algorithm>.json` and one assignment file per k under `dir`.
pub fn write_sweep(dir: impl AsRef<Path>, report: &SweepReport) -> Result<SweepSummary> {
    let dir = dir.as_ref();
    let assignments = dir.join("assignments");
    std::fs::create_dir_all(&assignments).map_err(|e| Error::io(&assignments, e))?;
    let summary = SweepSummary::from_report(report);
    for (entry, s) in report.entries.iter().zip(&summary.entries) {
        write_assignments(dir.join(&s.assignment_file), &entry.result.assignments)?;
    }
    write_json(dir.join(format!("sweep_{}.json", report.algorithm)), &summary)?;
    Ok(summary)
}

/// Single `cluster` column aligned with the clustered rows.
pub fn write_assignments(path: impl AsRef<Path>, assignments: &[usize]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["cluster"])?;
    for a in assignments {
        w.write_record([a.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_assignments(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let v = rec.get(0).unwrap_or("");
        out.push(v.parse().map_err(|_| Error::ParseNumeric {
            row: i + 1,
            column: "cluster".into(),
            value: v.to_string(),
        })?);
    }
    Ok(out)
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => x.to_string(),
        Some(x) if x > 0.0 => "inf".into(),
        _ => "NA".into(),
    }
}

/// `k,algorithm,silhouette,calinski` rows for every report, in report then k order.
pub fn write_scores_csv(path: impl AsRef<Path>, reports: &[SweepReport]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["k", "algorithm", "silhouette", "calinski"])?;
    for r in reports {
        for e in &r.entries {
            w.write_record([e.k.to_string(), r.algorithm.to_string(), fmt_opt(e.silhouette), fmt_opt(e.calinski)])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{sweep, SweepConfig};
    use crate::matrix::Matrix;

    #[test]
    fn sweep_files_round_trip() {
        let rows: Vec<[f64; 2]> = (0..30).map(|i| [(i % 3) as f64 * 10.0 + (i as f64 * 0.01), (i % 3) as f64]).collect();
        let m = Matrix::from_rows(&rows).unwrap();
        let cfg = SweepConfig { k_min: 2, k_max: 4, restarts: 3, ..SweepConfig::default() };
        let report = sweep(&m, Algorithm::KMeans, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let summary = write_sweep(dir.path(), &report).unwrap();
        let back: SweepSummary = read_json(dir.path().join("sweep_kmeans.json")).unwrap();
        assert_eq!(back, summary);
        for (e, s) in report.entries.iter().zip(&summary.entries) {
            assert_eq!(read_assignments(dir.path().join(&s.assignment_file)).unwrap(), e.result.assignments);
        }
        write_scores_csv(dir.path().join("scores.csv"), &[report]).unwrap();
        let text = std::fs::read_to_string(dir.path().join("scores.csv")).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("k,algorithm,silhouette,calinski\n2,kmeans,"));
    }
}
