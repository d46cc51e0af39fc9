use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaProjection {
    /// `n × c` coordinates of the centred rows on the components.
    pub scores: Matrix,
    /// `d × c` orthonormal component directions.
    pub loadings: Matrix,
    /// Sample variance along each component, non-increasing.
    pub explained_variance: Vec<f64>,
    /// Total sample variance of the input, for ratios.
    pub total_variance: f64,
}

impl PcaProjection {
    pub fn explained_ratio(&self) -> Vec<f64> {
        self.explained_variance
            .iter()
            .map(|v| if self.total_variance > 0.0 { v / self.total_variance } else { 0.0 })
            .collect()
    }
}

/// Projects the mean-centred matrix onto its leading principal components.
///
/// Each loading vector is signed so that its largest-magnitude entry is positive.
pub fn pca_project(matrix: &Matrix, components: usize) -> Result<PcaProjection> {
    let (n, d) = (matrix.nrows(), matrix.ncols());
    if n < 2 || d < 1 {
        return Err(Error::InvalidArgument(format!("PCA needs n >= 2 and d >= 1 (n={n}, d={d})")));
    }
    if components == 0 || components > n.min(d) {
        return Err(Error::InvalidArgument(format!(
            "cannot extract {components} components from a {n}×{d} matrix"
        )));
    }
    let means = matrix.column_means();
    let centred = DMatrix::from_fn(n, d, |i, j| matrix.get(i, j) - means[j]);
    let cov = (centred.transpose() * &centred) / (n - 1) as f64;
    let total_variance = cov.trace();
    let eigen = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]).then(a.cmp(&b)));

    let mut loadings = Matrix::zeros(d, components);
    let mut explained_variance = Vec::with_capacity(components);
    for (c, &src) in order.iter().take(components).enumerate() {
        let v = eigen.eigenvectors.column(src);
        let pivot = (0..d).fold(0, |best, j| if v[j].abs() > v[best].abs() { j } else { best });
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..d {
            loadings.set(j, c, sign * v[j]);
        }
        explained_variance.push(eigen.eigenvalues[src].max(0.0));
    }

    let mut scores = Matrix::zeros(n, components);
    for i in 0..n {
        for c in 0..components {
            let s: f64 = (0..d).map(|j| centred[(i, j)] * loadings.get(j, c)).sum();
            scores.set(i, c, s);
        }
    }
    Ok(PcaProjection {
        scores,
        loadings,
        explained_variance,
        total_variance,
    })
}
