//! Minimal static SVG renderings of box statistics, PCA biplots and index curves.

use std::fmt::Write;

use super::pca::PcaProjection;
use super::summary::BoxStats;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

fn colour(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64, px_lo: f64, px_hi: f64) -> Axis {
        let (lo, hi) = if hi - lo > 0.0 { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        Axis { lo, hi, px_lo, px_hi }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

/// One panel per attribute, one box per cluster.
pub fn boxplot_grid(stats: &BoxStats) -> String {
    let (pw, ph, cols) = (220.0, 160.0, 4usize);
    let clusters = stats.clusters();
    let nrows = stats.attributes.len().div_ceil(cols).max(1);
    let (w, h) = (pw * cols as f64, ph * nrows as f64);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="10">"#);
    for (a, attr) in stats.attributes.iter().enumerate() {
        let (ox, oy) = ((a % cols) as f64 * pw, (a / cols) as f64 * ph);
        let rows: Vec<_> = clusters.iter().filter_map(|&c| stats.get(c, attr)).collect();
        let lo = rows.iter().map(|r| r.min).fold(f64::INFINITY, f64::min);
        let hi = rows.iter().map(|r| r.max).fold(f64::NEG_INFINITY, f64::max);
        let y = Axis::new(lo, hi, oy + ph - 20.0, oy + 18.0);
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, ox + 6.0, oy + 12.0, escape(attr));
        let slot = (pw - 20.0) / rows.len().max(1) as f64;
        for (i, r) in rows.iter().enumerate() {
            let cx = ox + 10.0 + slot * (i as f64 + 0.5);
            let bw = (slot * 0.6).min(24.0);
            let c = colour(r.cluster);
            let _ = writeln!(
                out,
                r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="{c}"/>"#,
                y.map(r.min),
                y.map(r.max)
            );
            let _ = writeln!(
                out,
                r#"<rect x="{:.1}" y="{:.1}" width="{bw:.1}" height="{:.1}" fill="{c}" fill-opacity="0.35" stroke="{c}"/>"#,
                cx - bw / 2.0,
                y.map(r.q3),
                (y.map(r.q1) - y.map(r.q3)).max(0.5)
            );
            let _ = writeln!(
                out,
                r#"<line x1="{:.1}" y1="{m:.1}" x2="{:.1}" y2="{m:.1}" stroke="black"/>"#,
                cx - bw / 2.0,
                cx + bw / 2.0,
                m = y.map(r.median)
            );
            let _ = writeln!(out, r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, oy + ph - 6.0, r.cluster);
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Scores on the first two components coloured by cluster, loadings drawn as arrows.
pub fn biplot(pca: &PcaProjection, assignments: &[usize], attributes: &[String]) -> String {
    let (w, h, pad) = (640.0, 640.0, 40.0);
    let two = pca.scores.ncols() >= 2;
    let xy = |i: usize| (pca.scores.get(i, 0), if two { pca.scores.get(i, 1) } else { 0.0 });
    let n = pca.scores.nrows();
    let ext = (0..n)
        .map(|i| {
            let (a, b) = xy(i);
            a.abs().max(b.abs())
        })
        .fold(0.0, f64::max)
        .max(1e-12);
    let x = Axis::new(-ext, ext, pad, w - pad);
    let y = Axis::new(-ext, ext, h - pad, pad);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="10">"#);
    let ratio = pca.explained_ratio();
    let _ = writeln!(
        out,
        r#"<text x="{pad}" y="20">PC1 {:.1}%  PC2 {:.1}%</text>"#,
        100.0 * ratio[0],
        100.0 * ratio.get(1).copied().unwrap_or(0.0)
    );
    for i in 0..n {
        let (a, b) = xy(i);
        let c = colour(assignments.get(i).copied().unwrap_or(0));
        let _ = writeln!(out, r#"<circle cx="{:.1}" cy="{:.1}" r="2" fill="{c}" fill-opacity="0.6"/>"#, x.map(a), y.map(b));
    }
    for (j, attr) in attributes.iter().enumerate().take(pca.loadings.nrows()) {
        let lx = pca.loadings.get(j, 0) * ext;
        let ly = if two { pca.loadings.get(j, 1) * ext } else { 0.0 };
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black" stroke-width="0.8"/>"#,
            x.map(0.0),
            y.map(0.0),
            x.map(lx),
            y.map(ly)
        );
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, x.map(lx), y.map(ly), escape(attr));
    }
    out.push_str("</svg>\n");
    out
}

/// A named series of `(k, value)` points; missing values leave gaps.
pub struct Curve<'a> {
    pub name: &'a str,
    pub points: Vec<(usize, Option<f64>)>,
}

/// Index value against k, one line per series, each series scaled to its own range.
pub fn index_curves(title: &str, curves: &[Curve<'_>]) -> String {
    let (w, h, pad) = (640.0, 360.0, 40.0);
    let ks = curves.iter().flat_map(|c| c.points.iter().map(|p| p.0));
    let (kmin, kmax) = ks.fold((usize::MAX, 0), |(a, b), k| (a.min(k), b.max(k)));
    let x = Axis::new(kmin as f64, kmax as f64, pad, w - pad);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="10">"#);
    let _ = writeln!(out, r#"<text x="{pad}" y="16">{}</text>"#, escape(title));
    for (ci, c) in curves.iter().enumerate() {
        let vals: Vec<f64> = c.points.iter().filter_map(|p| p.1).filter(|v| v.is_finite()).collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if vals.is_empty() {
            continue;
        }
        let y = Axis::new(lo, hi, h - pad, pad + 20.0);
        let mut path = String::new();
        let mut pen_down = false;
        for &(k, v) in &c.points {
            match v.filter(|v| v.is_finite()) {
                Some(v) => {
                    let _ = write!(path, "{}{:.1},{:.1} ", if pen_down { "L" } else { "M" }, x.map(k as f64), y.map(v));
                    pen_down = true;
                }
                None => pen_down = false,
            }
        }
        let col = colour(ci);
        let _ = writeln!(out, r#"<path d="{}" fill="none" stroke="{col}"/>"#, path.trim_end());
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" fill="{col}">{} [{lo:.3}, {hi:.3}]</text>"#, w - 220.0, 16.0 + 12.0 * ci as f64, escape(c.name));
    }
    for k in kmin..=kmax {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{k}</text>"#, x.map(k as f64), h - pad + 14.0);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::profiling::{cluster_summary, pca_project};

    #[test]
    fn renders_wellformed_roots() {
        let m = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.5], [5.0, 4.0], [6.0, 5.0]]).unwrap();
        let attrs = vec!["a<b".to_string(), "c".to_string()];
        let a = [0, 0, 1, 1];
        let stats = cluster_summary(&m, &attrs, &a).unwrap();
        let docs = [
            boxplot_grid(&stats),
            biplot(&pca_project(&m, 2).unwrap(), &a, &attrs),
            index_curves("s", &[Curve { name: "sil", points: vec![(2, Some(0.5)), (3, None), (4, Some(0.1))] }]),
        ];
        for d in docs {
            assert!(d.starts_with("<svg") && d.trim_end().ends_with("</svg>"));
            assert!(!d.contains("a<b") && !d.contains("NaN"));
        }
    }
}
