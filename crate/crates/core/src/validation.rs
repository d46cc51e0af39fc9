//! Cluster validation indices and agreement-based choice of k.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::SweepReport;
use crate::error::{Error, Result};
use crate::matrix::{euclidean, squared_euclidean, Matrix};

fn cluster_sizes(assignments: &[usize], k: usize) -> Result<Vec<usize>> {
    let mut sizes = vec![0usize; k];
    for &a in assignments {
        if a >= k {
            return Err(Error::InvalidArgument(format!("cluster id {a} outside 0..{k}")));
        }
        sizes[a] += 1;
    }
    if let Some(c) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyCluster(c));
    }
    Ok(sizes)
}

/// Per-point silhouette widths and their mean.
///
/// Distances are accumulated per cluster, so memory stays linear in n.
/// Points in singleton clusters get a width of zero.
pub fn silhouette(matrix: &Matrix, assignments: &[usize], k: usize) -> Result<(Vec<f64>, f64)> {
    if k < 2 {
        return Err(Error::InvalidArgument("silhouette needs k >= 2".into()));
    }
    if assignments.len() != matrix.nrows() {
        return Err(Error::LengthMismatch(assignments.len(), matrix.nrows()));
    }
    let sizes = cluster_sizes(assignments, k)?;

    let widths: Vec<f64> = (0..matrix.nrows())
        .into_par_iter()
        .map_init(
            || vec![0.0f64; k],
            |sums, i| {
                sums.iter_mut().for_each(|s| *s = 0.0);
                let p = matrix.row(i);
                for (j, q) in matrix.rows_iter().enumerate() {
                    sums[assignments[j]] += euclidean(p, q);
                }
                let own = assignments[i];
                if sizes[own] == 1 {
                    return 0.0;
                }
                let a = sums[own] / (sizes[own] - 1) as f64;
                let b = (0..k)
                    .filter(|&c| c != own)
                    .map(|c| sums[c] / sizes[c] as f64)
                    .fold(f64::INFINITY, f64::min);
                let denom = a.max(b);
                if denom > 0.0 {
                    (b - a) / denom
                } else {
                    0.0
                }
            },
        )
        .collect();
    let mean = widths.iter().sum::<f64>() / widths.len() as f64;
    Ok((widths, mean))
}

/// Calinski-Harabasz variance ratio `(B / (k - 1)) / (W / (n - k))`.
///
/// Returns infinity when the within-cluster dispersion is zero.
pub fn calinski_harabasz(matrix: &Matrix, assignments: &[usize], k: usize) -> Result<f64> {
    let n = matrix.nrows();
    if k < 2 || k >= n {
        return Err(Error::InvalidArgument(format!("Calinski-Harabasz needs 2 <= k < n (k={k}, n={n})")));
    }
    if assignments.len() != n {
        return Err(Error::LengthMismatch(assignments.len(), n));
    }
    let sizes = cluster_sizes(assignments, k)?;
    let d = matrix.ncols();
    let mut centers = Matrix::zeros(k, d);
    for (p, &a) in matrix.rows_iter().zip(assignments) {
        for (c, v) in centers.row_mut(a).iter_mut().zip(p) {
            *c += v;
        }
    }
    for (c, &s) in sizes.iter().enumerate() {
        centers.row_mut(c).iter_mut().for_each(|v| *v /= s as f64);
    }
    let grand = matrix.column_means();
    let between: f64 = (0..k)
        .map(|c| sizes[c] as f64 * squared_euclidean(centers.row(c), &grand))
        .sum();
    let within: f64 = matrix
        .rows_iter()
        .zip(assignments)
        .map(|(p, &a)| squared_euclidean(p, centers.row(a)))
        .sum();
    if within == 0.0 {
        return Ok(if between > 0.0 { f64::INFINITY } else { 0.0 });
    }
    Ok((between / (k - 1) as f64) / (within / (n - k) as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Both indices peak at the same k.
    Agreed(usize),
    /// The indices peak at different k; the optimum lies between them.
    Range(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KSelection {
    pub silhouette_k: usize,
    pub calinski_k: usize,
    pub verdict: Verdict,
}

fn argmax(values: impl Iterator<Item = (usize, Option<f64>)>) -> Option<usize> {
    values
        .filter_map(|(k, v)| v.filter(|x| !x.is_nan()).map(|x| (k, x)))
        .fold(None, |best: Option<(usize, f64)>, (k, x)| match best {
            Some((_, b)) if b >= x => best,
            _ => Some((k, x)),
        })
        .map(|(k, _)| k)
}

/// Picks the k maximising each index. Ties go to the smaller k.
pub fn select_best_k(report: &SweepReport) -> Result<KSelection> {
    if report.entries.len() < 2 {
        return Err(Error::InvalidArgument("k selection needs at least two values of k".into()));
    }
    let silhouette_k = argmax(report.entries.iter().map(|e| (e.k, e.silhouette)))
        .ok_or_else(|| Error::InvalidArgument("no silhouette scores in report".into()))?;
    let calinski_k = argmax(report.entries.iter().map(|e| (e.k, e.calinski)))
        .ok_or_else(|| Error::InvalidArgument("no Calinski-Harabasz scores in report".into()))?;
    let verdict = if silhouette_k == calinski_k {
        Verdict::Agreed(silhouette_k)
    } else {
        Verdict::Range(silhouette_k.min(calinski_k), silhouette_k.max(calinski_k))
    };
    Ok(KSelection {
        silhouette_k,
        calinski_k,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{Algorithm, Centers, ClusteringResult, SweepEntry};
    use proptest::prelude::*;

    fn line(points: &[f64]) -> Matrix {
        let rows: Vec<[f64; 1]> = points.iter().map(|&p| [p]).collect();
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn four_point_silhouette() {
        // a(i) = 1 everywhere. Outer points (0, 11): b = (10 + 11) / 2 = 10.5.
        // Inner points (1, 10): b = (9 + 10) / 2 = 9.5.
        let (w, avg) = silhouette(&line(&[0.0, 1.0, 10.0, 11.0]), &[0, 0, 1, 1], 2).unwrap();
        let outer = 1.0 - 1.0 / 10.5;
        let inner = 1.0 - 1.0 / 9.5;
        for (s, e) in w.iter().zip([outer, inner, inner, outer]) {
            assert!((s - e).abs() < 1e-12);
        }
        assert!((avg - (outer + inner) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn singleton_gets_zero() {
        let (w, _) = silhouette(&line(&[0.0, 1.0, 50.0]), &[0, 0, 1], 2).unwrap();
        assert_eq!(w[2], 0.0);
    }

    #[test]
    fn silhouette_errors() {
        let m = line(&[0.0, 1.0, 2.0]);
        assert!(silhouette(&m, &[0, 0, 0], 1).is_err());
        assert!(matches!(silhouette(&m, &[0, 0, 0], 2), Err(Error::EmptyCluster(1))));
    }

    #[test]
    fn four_point_calinski() {
        // grand mean 5.5; centres 0.5, 10.5: B = 2*25 + 2*25 = 100, W = 4 * 0.25 = 1
        let ch = calinski_harabasz(&line(&[0.0, 1.0, 10.0, 11.0]), &[0, 0, 1, 1], 2).unwrap();
        assert!((ch - 200.0).abs() < 1e-9);
    }

    #[test]
    fn calinski_k_equal_n_rejected() {
        assert!(calinski_harabasz(&line(&[0.0, 1.0]), &[0, 1], 2).is_err());
        assert!(calinski_harabasz(&line(&[0.0, 1.0, 2.0]), &[0, 0, 0], 1).is_err());
    }

    #[test]
    fn calinski_on_duplicated_points() {
        let pts = [0.0, 1.0, 3.0, 10.0, 11.0, 15.0];
        let lab = [0, 0, 0, 1, 1, 1];
        let (n, k) = (6.0, 2.0);
        let ch = calinski_harabasz(&line(&pts), &lab, 2).unwrap();
        let doubled: Vec<f64> = pts.iter().chain(pts.iter()).copied().collect();
        let lab2: Vec<usize> = lab.iter().chain(lab.iter()).copied().collect();
        let ch2 = calinski_harabasz(&line(&doubled), &lab2, 2).unwrap();
        // B and W double; only the (n - k) factor changes
        let factor = (2.0 * n - k) / (n - k);
        assert!((ch2 - ch * factor).abs() < 1e-9 * ch2);

        // direct recomputation on the doubled fixture
        let c0 = (0.0 + 1.0 + 3.0) / 3.0;
        let c1 = (10.0 + 11.0 + 15.0) / 3.0;
        let g = pts.iter().sum::<f64>() / n;
        let b = 2.0 * (3.0 * (c0 - g) * (c0 - g) + 3.0 * (c1 - g) * (c1 - g));
        let w = 2.0
            * (pts[..3].iter().map(|p| (p - c0) * (p - c0)).sum::<f64>()
                + pts[3..].iter().map(|p| (p - c1) * (p - c1)).sum::<f64>());
        assert!((ch2 - (b / (k - 1.0)) / (w / (2.0 * n - k))).abs() < 1e-9 * ch2);
    }

    #[test]
    fn wide_gap_silhouette_near_one() {
        // two clusters of width 1, gap 100
        let mut pts: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        pts.extend((0..10).map(|i| 100.0 + i as f64 / 10.0));
        let lab: Vec<usize> = (0..20).map(|i| i / 10).collect();
        let (_, avg) = silhouette(&line(&pts), &lab, 2).unwrap();
        assert!(avg > 0.99);
    }

    fn report(scores: &[(usize, f64, f64)]) -> SweepReport {
        SweepReport {
            algorithm: Algorithm::KMeans,
            entries: scores
                .iter()
                .map(|&(k, s, c)| SweepEntry {
                    k,
                    best_restart: 0,
                    restart_objectives: vec![],
                    result: ClusteringResult {
                        algorithm: Algorithm::KMeans,
                        k,
                        assignments: vec![],
                        centers: Centers::Medoids(vec![]),
                        objective: 0.0,
                        seed: 0,
                        iterations: 0,
                        trace: vec![],
                    },
                    silhouette: Some(s),
                    calinski: Some(c),
                })
                .collect(),
        }
    }

    #[test]
    fn agreement_and_range() {
        let agreed = report(&[(2, 0.3, 10.0), (3, 0.4, 20.0), (4, 0.6, 30.0), (5, 0.5, 25.0)]);
        assert_eq!(select_best_k(&agreed).unwrap().verdict, Verdict::Agreed(4));
        let split = report(&[(2, 0.7, 10.0), (4, 0.4, 20.0), (6, 0.3, 30.0)]);
        let sel = select_best_k(&split).unwrap();
        assert_eq!(sel.verdict, Verdict::Range(2, 6));
        assert_eq!((sel.silhouette_k, sel.calinski_k), (2, 6));
        assert!(select_best_k(&report(&[(2, 0.1, 1.0)])).is_err());
    }

    proptest! {
        #[test]
        fn index_properties(
            pts in prop::collection::vec(prop::collection::vec(-10f64..10.0, 2), 6..30),
            shift in prop::collection::vec(-100f64..100.0, 2),
            factor in 0.01f64..100.0,
        ) {
            let n = pts.len();
            let lab: Vec<usize> = (0..n).map(|i| i % 3).collect();
            let m = Matrix::from_rows(&pts).unwrap();
            let (w, avg) = silhouette(&m, &lab, 3).unwrap();
            prop_assert!(w.iter().all(|s| (-1.0..=1.0).contains(s)));
            prop_assert!((avg - w.iter().sum::<f64>() / n as f64).abs() < 1e-12);

            let ch = calinski_harabasz(&m, &lab, 3).unwrap();
            let moved: Vec<Vec<f64>> = pts.iter().map(|p| vec![factor * p[0] + shift[0], factor * p[1] + shift[1]]).collect();
            let ch_moved = calinski_harabasz(&Matrix::from_rows(&moved).unwrap(), &lab, 3).unwrap();
            prop_assert!((ch - ch_moved).abs() <= 1e-9 * ch.abs().max(1.0));

            // relabel clusters: 0 -> 2, 1 -> 0, 2 -> 1
            let perm: Vec<usize> = lab.iter().map(|&l| (l + 2) % 3).collect();
            let (_, avg_p) = silhouette(&m, &perm, 3).unwrap();
            prop_assert_eq!(avg.to_bits(), avg_p.to_bits());
            let ch_p = calinski_harabasz(&m, &perm, 3).unwrap();
            prop_assert!((ch - ch_p).abs() <= 1e-12 * ch.abs().max(1.0));
        }
    }
}
