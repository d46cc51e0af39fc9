//! Partitional clustering: Lloyd's K-means, PAM, CLARA and the restart/k sweep.

mod clara;
mod kmeans;
mod pam;
mod seed;
mod sweep;

pub use clara::{clara, default_sample_size};
pub use kmeans::{kmeans, kmeans_with, KMeansInit, KMeansOptions};
pub use pam::{euclidean_dissimilarity, pam, PamResult};
pub use seed::run_seed;
pub use sweep::{sweep, SweepConfig, SweepEntry, SweepReport};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    KMeans,
    Clara,
}

impl Algorithm {
    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::KMeans => "kmeans",
            Algorithm::Clara => "clara",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "kmeans" | "k-means" => Ok(Algorithm::KMeans),
            "clara" => Ok(Algorithm::Clara),
            _ => Err(Error::InvalidArgument(format!("unknown algorithm `{s}` (kmeans, clara)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Centers {
    /// `k × d` cluster means.
    Means(Matrix),
    /// Row indices of the medoids in the clustered matrix.
    Medoids(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    pub algorithm: Algorithm,
    pub k: usize,
    pub assignments: Vec<usize>,
    pub centers: Centers,
    /// WCSS for K-means, mean distance to the assigned medoid for CLARA.
    pub objective: f64,
    pub seed: u64,
    pub iterations: usize,
    /// Objective after every Lloyd iteration (K-means) or swap (best CLARA sample).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<f64>,
}

impl ClusteringResult {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }

    /// Cluster centres as a `k × d` matrix; medoid rows are looked up in `data`.
    pub fn center_matrix(&self, data: &Matrix) -> Matrix {
        match &self.centers {
            Centers::Means(m) => m.clone(),
            Centers::Medoids(idx) => data.select_rows(idx),
        }
    }
}

/// Index of the nearest centre by squared Euclidean distance; ties go to the lowest index.
#[inline]
pub(crate) fn nearest(point: &[f64], centers: &Matrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.rows_iter().enumerate() {
        let d = crate::matrix::squared_euclidean(point, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}
