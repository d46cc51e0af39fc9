use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::summary::BoxStats;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "0")]
    Zero,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
            Sign::Zero => "0",
        })
    }
}

/// Non-zero markers only: attribute to `+` or `-`.
pub type Signature = BTreeMap<String, Sign>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpressionProfile {
    pub cluster: usize,
    pub markers: BTreeMap<String, Sign>,
    pub effect: BTreeMap<String, f64>,
}

impl ExpressionProfile {
    pub fn signature(&self) -> Signature {
        self.markers
            .iter()
            .filter(|(_, s)| **s != Sign::Zero)
            .map(|(a, s)| (a.clone(), *s))
            .collect()
    }
}

/// Formats a signature as `{a:+, b:-}`.
pub fn format_signature(sig: &Signature) -> String {
    let parts: Vec<String> = sig.iter().map(|(a, s)| format!("{a}:{s}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Flags attributes whose cluster median sits at least `tau` global IQRs above (`+`)
/// or below (`-`) the global median.
pub fn expression_markers(stats: &BoxStats, global: &BoxStats, tau: f64) -> Result<Vec<ExpressionProfile>> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("marker threshold must be positive, got {tau}")));
    }
    let mut profiles = Vec::new();
    for cluster in stats.clusters() {
        let mut markers = BTreeMap::new();
        let mut effect = BTreeMap::new();
        for attr in &stats.attributes {
            let (Some(c), Some(g)) = (stats.get(cluster, attr), global.rows.iter().find(|r| &r.attribute == attr)) else {
                continue;
            };
            let floor = f64::EPSILON * g.median.abs().max(1.0);
            let e = (c.median - g.median) / g.iqr().max(floor);
            let sign = if e >= tau {
                Sign::Plus
            } else if e <= -tau {
                Sign::Minus
            } else {
                Sign::Zero
            };
            markers.insert(attr.clone(), sign);
            effect.insert(attr.clone(), e);
        }
        profiles.push(ExpressionProfile { cluster, markers, effect });
    }
    Ok(profiles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::profiling::{cluster_summary, global_summary};
    use proptest::prelude::*;

    fn profiles_of(m: &Matrix, attrs: &[String], a: &[usize], tau: f64) -> Vec<ExpressionProfile> {
        let s = cluster_summary(m, attrs, a).unwrap();
        let g = global_summary(m, attrs).unwrap();
        expression_markers(&s, &g, tau).unwrap()
    }

    #[test]
    fn constant_data_all_zero() {
        let m = Matrix::from_rows(&[[3.0, 7.0]; 10]).unwrap();
        let attrs = vec!["a".to_string(), "b".to_string()];
        let a: Vec<usize> = (0..10).map(|i| i % 3).collect();
        for p in profiles_of(&m, &attrs, &a, 0.5) {
            assert!(p.signature().is_empty());
            assert!(p.effect.values().all(|&e| e == 0.0));
        }
    }

    #[test]
    fn shifted_cluster_marked() {
        // cluster 1 sits well above the bulk on x, equal on y
        let mut rows = Vec::new();
        for i in 0..40 {
            rows.push([(i % 10) as f64, (i % 7) as f64]);
        }
        for i in 0..10 {
            rows.push([30.0 + i as f64, (i % 7) as f64]);
        }
        let a: Vec<usize> = (0..50).map(|i| usize::from(i >= 40)).collect();
        let p = profiles_of(&Matrix::from_rows(&rows).unwrap(), &["x".into(), "y".into()], &a, 0.5);
        assert_eq!(p[1].markers["x"], Sign::Plus);
        assert_eq!(p[1].markers["y"], Sign::Zero);
        assert_eq!(p[0].markers["x"], Sign::Zero);
    }

    #[test]
    fn boundary_is_inclusive() {
        // global median 2.5, IQR 1.5; cluster {4,4} sits exactly +1 IQR above
        let stats = |med: f64, q1: f64, q3: f64, c: usize| crate::profiling::BoxRow {
            cluster: c,
            attribute: "x".into(),
            min: q1,
            q1,
            median: med,
            q3,
            max: q3,
            mean: med,
            n: 2,
        };
        let g = BoxStats { attributes: vec!["x".into()], rows: vec![stats(2.5, 1.75, 3.25, 0)] };
        let s = BoxStats { attributes: vec!["x".into()], rows: vec![stats(4.0, 4.0, 4.0, 0)] };
        let p = expression_markers(&s, &g, 1.0).unwrap();
        assert_eq!(p[0].effect["x"], 1.0);
        assert_eq!(p[0].markers["x"], Sign::Plus);
    }

    #[test]
    fn rejects_nonpositive_tau() {
        let g = BoxStats { attributes: vec![], rows: vec![] };
        assert!(expression_markers(&g, &g, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn affine_invariance(
            v in prop::collection::vec(-100.0f64..100.0, 12..40),
            slope in 0.01f64..100.0,
            shift in -1e3f64..1e3,
        ) {
            let n = v.len();
            let a: Vec<usize> = (0..n).map(|i| i % 3).collect();
            let attrs = vec!["x".to_string()];
            let m = Matrix::from_vec(n, 1, v.clone()).unwrap();
            let t = Matrix::from_vec(n, 1, v.iter().map(|x| slope * x + shift).collect()).unwrap();
            let p = profiles_of(&m, &attrs, &a, 0.5);
            let q = profiles_of(&t, &attrs, &a, 0.5);
            let g = global_summary(&m, &attrs).unwrap();
            prop_assume!(g.rows[0].iqr() > 1e-6);
            for (x, y) in p.iter().zip(&q) {
                let (ex, ey) = (x.effect["x"], y.effect["x"]);
                prop_assert!((ex - ey).abs() <= 1e-9 * ex.abs().max(1.0), "{} vs {}", ex, ey);
                if (ex.abs() - 0.5).abs() > 1e-9 {
                    prop_assert_eq!(x.markers["x"], y.markers["x"]);
                }
            }
        }
    }
}
