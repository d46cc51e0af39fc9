use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{nearest, Algorithm, Centers, ClusteringResult};
use crate::error::{Error, Result};
use crate::matrix::{squared_euclidean, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum KMeansInit {
    /// k distinct rows drawn uniformly.
    #[default]
    Forgy,
    PlusPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansOptions {
    pub k: usize,
    pub max_iterations: usize,
    /// Stop once the WCSS improvement of an iteration falls below this.
    pub tolerance: f64,
    pub init: KMeansInit,
}

impl KMeansOptions {
    pub fn new(k: usize) -> Self {
        KMeansOptions {
            k,
            max_iterations: 100,
            tolerance: 1e-8,
            init: KMeansInit::Forgy,
        }
    }
}

pub fn kmeans(matrix: &Matrix, k: usize, seed: u64, max_iterations: usize, tolerance: f64) -> Result<ClusteringResult> {
    kmeans_with(
        matrix,
        &KMeansOptions {
            k,
            max_iterations,
            tolerance,
            init: KMeansInit::Forgy,
        },
        seed,
    )
}

/// Lloyd's algorithm from a seeded initialisation.
///
/// Empty clusters are refilled with the point farthest from its centre. On
/// return every point is assigned to its nearest centre (ties to the lowest
/// id) unless the iteration cap was hit right after such a repair.
pub fn kmeans_with(matrix: &Matrix, opts: &KMeansOptions, seed: u64) -> Result<ClusteringResult> {
    let (n, d) = (matrix.nrows(), matrix.ncols());
    let k = opts.k;
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    if !matrix.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = match opts.init {
        KMeansInit::Forgy => matrix.select_rows(&index::sample(&mut rng, n, k).into_vec()),
        KMeansInit::PlusPlus => plus_plus(matrix, k, &mut rng),
    };

    let mut assignments = vec![0usize; n];
    let mut dist = vec![0.0f64; n];
    let mut trace = Vec::new();
    let mut iterations = 0;
    let max_iterations = opts.max_iterations.max(1);

    loop {
        iterations += 1;
        for (i, p) in matrix.rows_iter().enumerate() {
            let (c, dd) = nearest(p, &centers);
            assignments[i] = c;
            dist[i] = dd;
        }
        let repaired = repair_empty(matrix, &mut centers, &mut assignments, &mut dist, k);
        let wcss: f64 = dist.iter().sum();
        let improvement = trace.last().map_or(f64::INFINITY, |prev: &f64| prev - wcss);
        trace.push(wcss);

        if (!repaired && improvement < opts.tolerance) || iterations >= max_iterations {
            return Ok(ClusteringResult {
                algorithm: Algorithm::KMeans,
                k,
                assignments,
                centers: Centers::Means(centers),
                objective: wcss,
                seed,
                iterations,
                trace,
            });
        }

        let mut sums = Matrix::zeros(k, d);
        let mut counts = vec![0usize; k];
        for (i, p) in matrix.rows_iter().enumerate() {
            let c = assignments[i];
            counts[c] += 1;
            for (s, v) in sums.row_mut(c).iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            // every cluster is non-empty after repair
            let inv = 1.0 / counts[c] as f64;
            for (dst, s) in centers.row_mut(c).iter_mut().zip(sums.row(c)) {
                *dst = s * inv;
            }
        }
    }
}

/// Moves the farthest points into empty clusters. Returns whether anything moved.
fn repair_empty(matrix: &Matrix, centers: &mut Matrix, assignments: &mut [usize], dist: &mut [f64], k: usize) -> bool {
    let mut counts = vec![0usize; k];
    for &a in assignments.iter() {
        counts[a] += 1;
    }
    let mut repaired = false;
    for c in 0..k {
        if counts[c] > 0 {
            continue;
        }
        let donor = (0..assignments.len())
            .filter(|&i| counts[assignments[i]] > 1)
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if dist[b] >= dist[i] => Some(b),
                _ => Some(i),
            });
        let Some(i) = donor else { break };
        counts[assignments[i]] -= 1;
        counts[c] = 1;
        assignments[i] = c;
        dist[i] = 0.0;
        centers.row_mut(c).copy_from_slice(matrix.row(i));
        repaired = true;
    }
    repaired
}

fn plus_plus(matrix: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let n = matrix.nrows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = matrix
        .rows_iter()
        .map(|p| squared_euclidean(p, matrix.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, w) in d2.iter().enumerate() {
                if target < *w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            // all remaining points coincide with chosen centres
            (0..n).find(|i| !chosen.contains(i)).expect("k <= n")
        };
        chosen.push(next);
        for (i, p) in matrix.rows_iter().enumerate() {
            d2[i] = d2[i].min(squared_euclidean(p, matrix.row(next)));
        }
    }
    matrix.select_rows(&chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wcss_of_partition(points: &[[f64; 2]], labels: &[usize], k: usize) -> f64 {
        (0..k)
            .map(|c| {
                let members: Vec<&[f64; 2]> = points.iter().zip(labels).filter(|(_, &l)| l == c).map(|(p, _)| p).collect();
                if members.is_empty() {
                    return 0.0;
                }
                let m = members.len() as f64;
                let cx = members.iter().map(|p| p[0]).sum::<f64>() / m;
                let cy = members.iter().map(|p| p[1]).sum::<f64>() / m;
                members.iter().map(|p| (p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sum::<f64>()
            })
            .sum()
    }

    #[test]
    fn four_point_fixture_matches_brute_force() {
        let pts = [[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]];
        // enumerate every labelling with both clusters non-empty
        let mut best = (f64::INFINITY, vec![]);
        for mask in 1u32..(1 << 4) - 1 {
            let labels: Vec<usize> = (0..4).map(|i| ((mask >> i) & 1) as usize).collect();
            let w = wcss_of_partition(&pts, &labels, 2);
            if w < best.0 {
                best = (w, labels);
            }
        }
        assert_eq!(best.0, 1.0);

        let m = Matrix::from_rows(&pts).unwrap();
        let runs: Vec<_> = (0..20).map(|seed| kmeans(&m, 2, seed, 100, 1e-8).unwrap()).collect();
        // a start with both centres in one blob converges to the horizontal split (WCSS 100)
        assert!(runs.iter().all(|r| r.objective == 1.0 || r.objective == 100.0));
        let r = runs.iter().min_by(|a, b| a.objective.total_cmp(&b.objective)).unwrap();
        assert_eq!(r.objective, best.0);
        assert_eq!(r.assignments[0], r.assignments[1]);
        assert_eq!(r.assignments[2], r.assignments[3]);
        assert_ne!(r.assignments[0], r.assignments[2]);
    }

    #[test]
    fn single_cluster_is_column_mean() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [3.0, 6.0], [5.0, 1.0]]).unwrap();
        let r = kmeans(&m, 1, 3, 100, 1e-8).unwrap();
        let Centers::Means(c) = &r.centers else { unreachable!() };
        assert!((c.get(0, 0) - 3.0).abs() < 1e-12 && (c.get(0, 1) - 3.0).abs() < 1e-12);
        // n times the (population) total variance
        let total = (4.0 + 0.0 + 4.0) + (1.0 + 9.0 + 4.0);
        assert!((r.objective - total).abs() < 1e-12);
    }

    #[test]
    fn k_equals_n_gives_zero() {
        let m = Matrix::from_rows(&[[1.0], [2.0], [7.0], [-3.0]]).unwrap();
        let r = kmeans(&m, 4, 11, 100, 1e-8).unwrap();
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.cluster_sizes(), vec![1; 4]);
    }

    #[test]
    fn duplicate_rows_trigger_repair() {
        // only two distinct locations, k = 3
        let m = Matrix::from_rows(&[[0.0], [0.0], [0.0], [5.0], [5.0], [5.0], [5.0]]).unwrap();
        for seed in 0..10 {
            let r = kmeans(&m, 3, seed, 100, 1e-8).unwrap();
            assert!(r.cluster_sizes().iter().all(|&s| s > 0));
            assert_eq!(r.objective, 0.0);
        }
    }

    #[test]
    fn errors() {
        let m = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        assert!(matches!(kmeans(&m, 3, 0, 10, 1e-8), Err(Error::InvalidK { k: 3, n: 2 })));
        assert!(matches!(kmeans(&m, 0, 0, 10, 1e-8), Err(Error::InvalidK { .. })));
        let bad = Matrix::from_rows(&[[0.0], [f64::NAN]]).unwrap();
        assert!(matches!(kmeans(&bad, 1, 0, 10, 1e-8), Err(Error::NonFinite)));
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let m = Matrix::from_rows(&[[0.0, 1.0], [2.0, 2.0], [9.0, 8.0], [1.0, 0.5], [8.0, 9.5]]).unwrap();
        let opts = KMeansOptions { init: KMeansInit::PlusPlus, ..KMeansOptions::new(2) };
        assert_eq!(kmeans_with(&m, &opts, 5).unwrap(), kmeans_with(&m, &opts, 5).unwrap());
    }

    proptest! {
        #[test]
        fn lloyd_invariants(
            rows in prop::collection::vec(prop::collection::vec(-5f64..5.0, 2), 1..25),
            k_seed in 1usize..6,
            seed in any::<u64>(),
            pp in any::<bool>(),
        ) {
            let m = Matrix::from_rows(&rows).unwrap();
            let k = k_seed.min(m.nrows());
            let opts = KMeansOptions {
                init: if pp { KMeansInit::PlusPlus } else { KMeansInit::Forgy },
                ..KMeansOptions::new(k)
            };
            let r = kmeans_with(&m, &opts, seed).unwrap();
            for w in r.trace.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
            prop_assert!(r.cluster_sizes().iter().all(|&s| s > 0));
            let Centers::Means(c) = &r.centers else { unreachable!() };
            for (i, p) in m.rows_iter().enumerate() {
                let own = squared_euclidean(p, c.row(r.assignments[i]));
                for other in c.rows_iter() {
                    prop_assert!(own <= squared_euclidean(p, other));
                }
            }
        }
    }
}
