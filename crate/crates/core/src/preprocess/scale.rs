use crate::matrix::Matrix;

/// Centres each column and divides by its sample standard deviation.
/// Constant columns become all zeros.
pub fn scale(matrix: &Matrix) -> Matrix {
    let (n, d) = (matrix.nrows(), matrix.ncols());
    let mut out = matrix.clone();
    if n < 2 {
        return Matrix::zeros(n, d);
    }
    let means = matrix.column_means();
    for j in 0..d {
        let ss: f64 = (0..n).map(|i| (matrix.get(i, j) - means[j]).powi(2)).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        for i in 0..n {
            let v = if sd > 0.0 { (matrix.get(i, j) - means[j]) / sd } else { 0.0 };
            out.set(i, j, v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_point_column() {
        let m = scale(&Matrix::from_rows(&[[0.0], [10.0]]).unwrap());
        // mean 5, sample sd sqrt(50), so ±5/sqrt(50) = ±1/sqrt(2)
        let expect = 5.0 / 50f64.sqrt();
        assert!((m.get(0, 0) + expect).abs() < 1e-15);
        assert!((m.get(1, 0) - expect).abs() < 1e-15);
    }

    #[test]
    fn constant_column_zeroed() {
        let m = scale(&Matrix::from_rows(&[[5.0, 1.0], [5.0, 2.0], [5.0, 4.0]]).unwrap());
        assert_eq!(m.column(0), vec![0.0; 3]);
    }

    proptest! {
        #[test]
        fn standardised_columns(rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 2..30)) {
            let m = scale(&Matrix::from_rows(&rows).unwrap());
            let n = m.nrows() as f64;
            for j in 0..3 {
                let col = m.column(j);
                let mean = col.iter().sum::<f64>() / n;
                prop_assert!(mean.abs() < 1e-12);
                let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
                prop_assert!((sd - 1.0).abs() < 1e-9 || sd == 0.0);
            }
        }
    }
}
