use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{clara, default_sample_size, kmeans_with, run_seed, Algorithm, ClusteringResult, KMeansInit, KMeansOptions};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::validation::{calinski_harabasz, silhouette};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub k_min: usize,
    pub k_max: usize,
    pub restarts: usize,
    pub base_seed: u64,
    pub clara_samples: usize,
    /// `None` uses `min(n, 40 + 2k)`.
    pub clara_sample_size: Option<usize>,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub kmeans_init: KMeansInit,
    /// Worker threads; 0 uses the global pool. Never affects results, so it is not serialized.
    #[serde(skip)]
    pub workers: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            k_min: 2,
            k_max: 20,
            restarts: 100,
            base_seed: 0,
            clara_samples: 5,
            clara_sample_size: None,
            max_iterations: 100,
            tolerance: 1e-8,
            kmeans_init: KMeansInit::Forgy,
            workers: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k_min < 2 || self.k_min > self.k_max {
            return Err(Error::InvalidArgument(format!(
                "need 2 <= k_min <= k_max, got k_min={} k_max={}",
                self.k_min, self.k_max
            )));
        }
        if self.k_max > n {
            return Err(Error::InvalidK { k: self.k_max, n });
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub k: usize,
    /// Restart index of the retained run.
    pub best_restart: usize,
    pub restart_objectives: Vec<f64>,
    pub result: ClusteringResult,
    /// `None` where the index is undefined for this k.
    pub silhouette: Option<f64>,
    pub calinski: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub algorithm: Algorithm,
    pub entries: Vec<SweepEntry>,
}

impl SweepReport {
    pub fn entry(&self, k: usize) -> Option<&SweepEntry> {
        self.entries.iter().find(|e| e.k == k)
    }
}

fn run_once(matrix: &Matrix, algorithm: Algorithm, k: usize, seed: u64, config: &SweepConfig) -> Result<ClusteringResult> {
    match algorithm {
        Algorithm::KMeans => kmeans_with(
            matrix,
            &KMeansOptions {
                k,
                max_iterations: config.max_iterations,
                tolerance: config.tolerance,
                init: config.kmeans_init,
            },
            seed,
        ),
        Algorithm::Clara => {
            let size = config
                .clara_sample_size
                .unwrap_or_else(|| default_sample_size(matrix.nrows(), k));
            clara(matrix, k, config.clara_samples, size, seed)
        }
    }
}

fn sweep_inner(matrix: &Matrix, algorithm: Algorithm, config: &SweepConfig) -> Result<SweepReport> {
    let mut entries = Vec::new();
    for k in config.k_min..=config.k_max {
        let runs: Vec<ClusteringResult> = (0..config.restarts)
            .into_par_iter()
            .map(|r| run_once(matrix, algorithm, k, run_seed(config.base_seed, algorithm, k, r), config))
            .collect::<Result<_>>()?;
        // lowest objective, ties to the lowest restart index
        let best_restart = runs
            .iter()
            .enumerate()
            .fold(0, |best, (r, run)| if run.objective < runs[best].objective { r } else { best });
        let restart_objectives = runs.iter().map(|r| r.objective).collect();
        let result = runs.into_iter().nth(best_restart).expect("restarts >= 1");

        let silhouette = silhouette(matrix, &result.assignments, k).ok().map(|(_, avg)| avg);
        let calinski = calinski_harabasz(matrix, &result.assignments, k).ok();
        entries.push(SweepEntry {
            k,
            best_restart,
            restart_objectives,
            result,
            silhouette,
            calinski,
        });
    }
    Ok(SweepReport { algorithm, entries })
}

/// Runs `restarts` seeded runs for every k in `[k_min, k_max]` and keeps the
/// best run per k, scored with both validation indices.
pub fn sweep(matrix: &Matrix, algorithm: Algorithm, config: &SweepConfig) -> Result<SweepReport> {
    config.validate(matrix.nrows())?;
    if config.workers == 0 {
        return sweep_inner(matrix, algorithm, config);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build worker pool: {e}")))?;
    pool.install(|| sweep_inner(matrix, algorithm, config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn fixture() -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let mut rows = Vec::new();
        for c in [[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]] {
            for _ in 0..20 {
                rows.push([c[0] + noise.sample(&mut rng), c[1] + noise.sample(&mut rng)]);
            }
        }
        Matrix::from_rows(&rows).unwrap()
    }

    fn small_config() -> SweepConfig {
        SweepConfig {
            k_min: 2,
            k_max: 4,
            restarts: 8,
            base_seed: 42,
            ..Default::default()
        }
    }

    #[test]
    fn covers_requested_range_with_minimum() {
        let m = fixture();
        for algo in [Algorithm::KMeans, Algorithm::Clara] {
            let rep = sweep(&m, algo, &small_config()).unwrap();
            assert_eq!(rep.entries.iter().map(|e| e.k).collect::<Vec<_>>(), vec![2, 3, 4]);
            for e in &rep.entries {
                assert_eq!(e.restart_objectives.len(), 8);
                assert!(e.restart_objectives.iter().all(|&o| e.result.objective <= o));
                assert_eq!(e.result.objective, e.restart_objectives[e.best_restart]);
                assert!(e.silhouette.is_some() && e.calinski.is_some());
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_report() {
        let m = fixture();
        let one = sweep(&m, Algorithm::KMeans, &SweepConfig { workers: 1, ..small_config() }).unwrap();
        let three = sweep(&m, Algorithm::KMeans, &SweepConfig { workers: 3, ..small_config() }).unwrap();
        assert_eq!(one, three);
    }

    #[test]
    fn kmeans_objective_non_increasing_in_k_on_planted_data() {
        let rep = sweep(&fixture(), Algorithm::KMeans, &SweepConfig { k_max: 6, restarts: 20, ..small_config() }).unwrap();
        for w in rep.entries.windows(2) {
            assert!(w[1].result.objective <= w[0].result.objective);
        }
    }

    #[test]
    fn invalid_configs() {
        let m = fixture();
        let bad = [
            SweepConfig { k_min: 1, ..small_config() },
            SweepConfig { k_min: 5, k_max: 4, ..small_config() },
            SweepConfig { restarts: 0, ..small_config() },
            SweepConfig { k_max: 61, ..small_config() },
        ];
        for cfg in bad {
            assert!(sweep(&m, Algorithm::KMeans, &cfg).is_err(), "{cfg:?}");
        }
    }
}
