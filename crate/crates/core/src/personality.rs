//! Selfishness weights from rater scores and Selfish/NonSelfish labelling of groups.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiling::{BehaviouralGroup, GroupLabel, Sign};

pub const MIN_SCORE: i64 = 1;
pub const MAX_SCORE: i64 = 7;

/// Per-rater integer scores in `1..=7`, one selfish and one non-selfish score per attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingsMatrix {
    raters: Vec<String>,
    attributes: Vec<String>,
    selfish: Vec<Vec<i64>>,
    nonselfish: Vec<Vec<i64>>,
}

impl RatingsMatrix {
    pub fn new(
        raters: Vec<String>,
        attributes: Vec<String>,
        selfish: Vec<Vec<i64>>,
        nonselfish: Vec<Vec<i64>>,
    ) -> Result<RatingsMatrix> {
        if raters.is_empty() || attributes.is_empty() {
            return Err(Error::EmptyRatings);
        }
        for m in [&selfish, &nonselfish] {
            if m.len() != raters.len() {
                return Err(Error::LengthMismatch(m.len(), raters.len()));
            }
            for (r, row) in m.iter().enumerate() {
                if row.len() != attributes.len() {
                    return Err(Error::LengthMismatch(row.len(), attributes.len()));
                }
                if let Some((a, &v)) = row.iter().enumerate().find(|(_, v)| !(MIN_SCORE..=MAX_SCORE).contains(*v)) {
                    return Err(Error::ScoreOutOfRange { rater: r, attribute: attributes[a].clone(), value: v });
                }
            }
        }
        Ok(RatingsMatrix { raters, attributes, selfish, nonselfish })
    }

    pub fn raters(&self) -> &[String] {
        &self.raters
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    /// The same raters with the two score matrices exchanged.
    pub fn swapped(&self) -> RatingsMatrix {
        RatingsMatrix {
            raters: self.raters.clone(),
            attributes: self.attributes.clone(),
            selfish: self.nonselfish.clone(),
            nonselfish: self.selfish.clone(),
        }
    }

    /// Reads one row per rater with `<attr>_selfish` and `<attr>_nonselfish` columns.
    /// An optional `rater` column names the rows.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<RatingsMatrix> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
        let headers = rdr.headers()?.clone();

        let mut attributes = Vec::new();
        let mut rater_col = None;
        for (i, h) in headers.iter().enumerate() {
            if h == "rater" {
                rater_col = Some(i);
            } else if let Some(a) = h.strip_suffix("_nonselfish") {
                if !attributes.iter().any(|x: &String| x == a) {
                    attributes.push(a.to_string());
                }
            } else if let Some(a) = h.strip_suffix("_selfish") {
                if !attributes.iter().any(|x: &String| x == a) {
                    attributes.push(a.to_string());
                }
            } else {
                return Err(Error::UnknownColumn(h.to_string()));
            }
        }
        let find = |name: String| headers.iter().position(|h| h == name).ok_or(Error::ColumnNotFound(name));
        let mut cols = Vec::with_capacity(attributes.len());
        for a in &attributes {
            cols.push((find(format!("{a}_selfish"))?, find(format!("{a}_nonselfish"))?));
        }

        let (mut raters, mut selfish, mut nonselfish) = (Vec::new(), Vec::new(), Vec::new());
        for (r, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |i: usize| -> Result<i64> {
                let v = &rec[i];
                i64::from_str(v).map_err(|_| Error::ParseNumeric {
                    row: r + 1,
                    column: headers[i].to_string(),
                    value: v.to_string(),
                })
            };
            raters.push(rater_col.map_or_else(|| (r + 1).to_string(), |c| rec[c].to_string()));
            let (mut s, mut n) = (Vec::new(), Vec::new());
            for &(cs, cn) in &cols {
                s.push(parse(cs)?);
                n.push(parse(cn)?);
            }
            selfish.push(s);
            nonselfish.push(n);
        }
        RatingsMatrix::new(raters, attributes, selfish, nonselfish)
    }

    /// Mean selfish score minus mean non-selfish score, per attribute.
    pub fn raw_weights(&self) -> Vec<f64> {
        let r = self.raters.len() as f64;
        (0..self.attributes.len())
            .map(|a| {
                let s: i64 = self.selfish.iter().map(|row| row[a]).sum();
                let n: i64 = self.nonselfish.iter().map(|row| row[a]).sum();
                (s - n) as f64 / r
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Normalization {
    #[default]
    None,
    /// Divide by the largest absolute weight.
    UnitMax,
    /// Subtract the mean, divide by the sample standard deviation.
    ZScore,
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "none" => Ok(Normalization::None),
            "unitmax" => Ok(Normalization::UnitMax),
            "zscore" => Ok(Normalization::ZScore),
            _ => Err(Error::InvalidArgument(format!("unknown normalization `{s}` (none, unit-max, z-score)"))),
        }
    }
}

fn normalize(raw: &[f64], mode: Normalization) -> Vec<f64> {
    match mode {
        Normalization::None => raw.to_vec(),
        Normalization::UnitMax => {
            let m = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if m > 0.0 {
                raw.iter().map(|v| v / m).collect()
            } else {
                raw.to_vec()
            }
        }
        Normalization::ZScore => {
            let n = raw.len() as f64;
            let mean = raw.iter().sum::<f64>() / n;
            let var = if raw.len() > 1 {
                raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            let sd = var.sqrt();
            raw.iter().map(|v| if sd > 0.0 { (v - mean) / sd } else { 0.0 }).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedAttribute {
    pub attribute: String,
    pub weight: f64,
}

/// Attributes in descending weight order; equal weights are ordered by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<RankedAttribute>", into = "Vec<RankedAttribute>")]
pub struct SelfishnessRanking {
    entries: Vec<RankedAttribute>,
}

impl TryFrom<Vec<RankedAttribute>> for SelfishnessRanking {
    type Error = Error;

    fn try_from(entries: Vec<RankedAttribute>) -> Result<Self> {
        SelfishnessRanking::new(entries)
    }
}

impl From<SelfishnessRanking> for Vec<RankedAttribute> {
    fn from(r: SelfishnessRanking) -> Self {
        r.entries
    }
}

impl SelfishnessRanking {
    /// Sorts the entries; fails on an empty list, duplicate names or non-finite weights.
    pub fn new(mut entries: Vec<RankedAttribute>) -> Result<SelfishnessRanking> {
        if entries.is_empty() {
            return Err(Error::EmptyRatings);
        }
        if let Some(e) = entries.iter().find(|e| !e.weight.is_finite()) {
            return Err(Error::InvalidArgument(format!("weight of `{}` is not finite", e.attribute)));
        }
        entries.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.attribute.cmp(&b.attribute)));
        let mut seen = BTreeSet::new();
        for e in &entries {
            if !seen.insert(&e.attribute) {
                return Err(Error::DuplicateColumn(e.attribute.clone()));
            }
        }
        Ok(SelfishnessRanking { entries })
    }

    /// The bundled published weights over nine expenditure attributes.
    pub fn bundled() -> SelfishnessRanking {
        serde_json::from_str(include_str!("../data/selfishness_weights.json")).expect("bundled weights are valid")
    }

    pub fn entries(&self) -> &[RankedAttribute] {
        &self.entries
    }

    pub fn order(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.attribute.as_str()).collect()
    }

    pub fn weight(&self, attribute: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.attribute == attribute).map(|e| e.weight)
    }

    /// Every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<SelfishnessRanking> {
        SelfishnessRanking::new(
            self.entries
                .iter()
                .map(|e| RankedAttribute { attribute: e.attribute.clone(), weight: e.weight * factor })
                .collect(),
        )
    }

    /// Writes `attribute,weight,rank` rows, rank starting at 1.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(["attribute", "weight", "rank"])?;
        for (i, e) in self.entries.iter().enumerate() {
            w.write_record([e.attribute.clone(), e.weight.to_string(), (i + 1).to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

pub fn selfishness_weights(ratings: &RatingsMatrix, normalization: Normalization) -> Result<SelfishnessRanking> {
    let weights = normalize(&ratings.raw_weights(), normalization);
    SelfishnessRanking::new(
        ratings
            .attributes
            .iter()
            .zip(weights)
            .map(|(a, weight)| RankedAttribute { attribute: a.clone(), weight })
            .collect(),
    )
}

pub const DEFAULT_EPSILON: f64 = 0.1;

/// Signed sum of the weights of the expenditure attributes in a group's signature.
pub fn group_score(group: &BehaviouralGroup, ranking: &SelfishnessRanking, expenditure: &BTreeSet<String>) -> Result<f64> {
    let mut score = 0.0;
    for (attr, sign) in &group.signature {
        if !expenditure.contains(attr) {
            continue;
        }
        let w = ranking.weight(attr).ok_or_else(|| Error::UnrankedAttribute(attr.clone()))?;
        match sign {
            Sign::Plus => score += w,
            Sign::Minus => score -= w,
            Sign::Zero => {}
        }
    }
    Ok(score)
}

/// Labels each group Selfish when its score exceeds `epsilon`, NonSelfish below `-epsilon`.
pub fn characterize_groups(
    groups: &[BehaviouralGroup],
    ranking: &SelfishnessRanking,
    expenditure: &BTreeSet<String>,
    epsilon: f64,
) -> Result<Vec<BehaviouralGroup>> {
    groups
        .iter()
        .map(|g| {
            let score = group_score(g, ranking, expenditure)?;
            let label = if score > epsilon {
                GroupLabel::Selfish
            } else if score < -epsilon {
                GroupLabel::NonSelfish
            } else {
                GroupLabel::Unlabeled
            };
            Ok(BehaviouralGroup { label, score: Some(score), ..g.clone() })
        })
        .collect()
}

/// Labels keyed by group id, for callers that only need the verdicts.
pub fn label_map(groups: &[BehaviouralGroup]) -> BTreeMap<usize, GroupLabel> {
    groups.iter().map(|g| (g.id, g.label)).collect()
}
