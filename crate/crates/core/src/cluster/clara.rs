use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::pam::{euclidean_dissimilarity, pam};
use super::{Algorithm, Centers, ClusteringResult};
use crate::error::{Error, Result};
use crate::matrix::{euclidean, Matrix};

/// Sample size recommended for CLARA, `40 + 2k`, capped at `n`.
pub fn default_sample_size(n: usize, k: usize) -> usize {
    n.min(40 + 2 * k)
}

/// Assigns every row to its nearest medoid; returns assignments and mean distance.
fn assign_all(matrix: &Matrix, medoids: &[usize]) -> (Vec<usize>, f64) {
    let mut total = 0.0;
    let assignments = matrix
        .rows_iter()
        .map(|p| {
            let mut best = (0, f64::INFINITY);
            for (pos, &m) in medoids.iter().enumerate() {
                let d = euclidean(p, matrix.row(m));
                if d < best.1 {
                    best = (pos, d);
                }
            }
            total += best.1;
            best.0
        })
        .collect();
    (assignments, total / matrix.nrows() as f64)
}

/// Clustering LARge Applications: PAM on random row samples, scored on all rows.
///
/// Every sample after the first contains the best medoids found so far. Sample
/// indices are sorted before PAM runs, so a single full-size sample reproduces
/// `pam` on the whole matrix exactly.
pub fn clara(matrix: &Matrix, k: usize, samples: usize, sample_size: usize, seed: u64) -> Result<ClusteringResult> {
    let n = matrix.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    if sample_size <= k || sample_size > n {
        // a full-size sample with k = n is PAM itself; allow it
        if !(sample_size == n && k == n) {
            return Err(Error::InvalidArgument(format!(
                "CLARA sample size {sample_size} must exceed k={k} and not exceed n={n}"
            )));
        }
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("CLARA needs at least one sample".into()));
    }
    if !matrix.is_finite() {
        return Err(Error::NonFinite);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<usize>, Vec<usize>, f64, usize, Vec<f64>)> = None;

    for _ in 0..samples {
        let mut idx: Vec<usize> = match &best {
            None => index::sample(&mut rng, n, sample_size).into_vec(),
            Some((medoids, ..)) => {
                let mut taken = vec![false; n];
                medoids.iter().for_each(|&m| taken[m] = true);
                let rest: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
                let mut idx = medoids.clone();
                idx.extend(index::sample(&mut rng, rest.len(), sample_size - k).into_iter().map(|i| rest[i]));
                idx
            }
        };
        idx.sort_unstable();

        let sub = matrix.select_rows(&idx);
        let fit = pam(&euclidean_dissimilarity(&sub), k)?;
        let medoids: Vec<usize> = fit.medoids.iter().map(|&m| idx[m]).collect();
        let (assignments, objective) = assign_all(matrix, &medoids);
        if best.as_ref().is_none_or(|b| objective < b.2) {
            let trace = fit.trace.iter().map(|t| t / sub.nrows() as f64).collect();
            best = Some((medoids, assignments, objective, fit.swaps, trace));
        }
    }

    let (medoids, assignments, objective, swaps, trace) = best.expect("samples >= 1");
    Ok(ClusteringResult {
        algorithm: Algorithm::Clara,
        k,
        assignments,
        centers: Centers::Medoids(medoids),
        objective,
        seed,
        iterations: swaps,
        trace,
    })
}
