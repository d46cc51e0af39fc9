//! Synthetic tables in the consumer-survey schema with planted behavioural groups.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{AttributeKind, Cell, DataTable, Schema};

/// Upper quartile of the standard normal.
const Z75: f64 = 0.674_489_750_196_081_7;

/// Generating distribution of one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ColumnModel {
    /// Sequential row identifier starting at 1.
    Id,
    /// `median · exp(sigma · Z)`, rounded to cents.
    LogNormal { median: f64, sigma: f64 },
    /// Gaussian clamped to `[min, max]`, optionally rounded.
    Normal { mean: f64, sd: f64, min: f64, max: f64, integer: bool },
    UniformInt { lo: i64, hi: i64 },
    /// Uniform over `labels`, left blank with probability `missing`.
    Categorical { labels: Vec<String>, missing: f64 },
    /// `factor ·` an earlier column `·` log-normal noise.
    Proportional { of: String, factor: f64, noise: f64 },
}

impl ColumnModel {
    /// Interquartile range of the unshifted distribution, where defined.
    pub fn base_iqr(&self) -> Option<f64> {
        match *self {
            ColumnModel::LogNormal { median, sigma } => Some(median * ((Z75 * sigma).exp() - (-Z75 * sigma).exp())),
            ColumnModel::Normal { sd, .. } => Some(2.0 * Z75 * sd),
            _ => None,
        }
    }

    pub fn base_median(&self) -> Option<f64> {
        match *self {
            ColumnModel::LogNormal { median, .. } => Some(median),
            ColumnModel::Normal { mean, .. } => Some(mean),
            _ => None,
        }
    }

    /// The model with its median moved by `shift` base IQRs. Log-normal columns are
    /// rescaled, so the shifted values stay non-negative.
    fn shifted(&self, column: &str, shift: f64) -> Result<ColumnModel> {
        if !shift.is_finite() {
            return Err(Error::InvalidArgument(format!("shift for `{column}` is not finite")));
        }
        let iqr = self
            .base_iqr()
            .ok_or_else(|| Error::InvalidArgument(format!("column `{column}` cannot be shifted")))?;
        Ok(match self.clone() {
            ColumnModel::LogNormal { median, sigma } => {
                let moved = median + shift * iqr;
                if moved <= 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "shift {shift} would push the median of `{column}` below zero"
                    )));
                }
                ColumnModel::LogNormal { median: moved, sigma }
            }
            ColumnModel::Normal { mean, sd, min, max, integer } => ColumnModel::Normal {
                mean: mean + shift * iqr,
                sd,
                min,
                max,
                integer,
            },
            _ => unreachable!(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub id: usize,
    pub size: usize,
    /// Median shift per attribute, in multiples of the base IQR.
    #[serde(default)]
    pub shifts: BTreeMap<String, f64>,
    /// Per-group replacements of the base column models.
    #[serde(default)]
    pub base: BTreeMap<String, ColumnModel>,
}

impl GroupSpec {
    pub fn new(id: usize, size: usize, shifts: &[(&str, f64)]) -> GroupSpec {
        GroupSpec {
            id,
            size,
            shifts: shifts.iter().map(|(a, s)| (a.to_string(), *s)).collect(),
            base: BTreeMap::new(),
        }
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Vec<GroupSpec>> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_reader(file)?)
    }
}

fn labels(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn lognormal(median: f64) -> ColumnModel {
    ColumnModel::LogNormal { median, sigma: 0.3 }
}

const DEBT_KINDS: [&str; 8] = ["cat", "coll", "cc", "gec", "od", "pl", "oth", "sc"];

/// Column models for the bundled schema.
pub fn default_models() -> BTreeMap<String, ColumnModel> {
    let mut m = BTreeMap::new();
    let mut put = |name: &str, model: ColumnModel| {
        m.insert(name.to_string(), model);
    };
    put("pid", ColumnModel::Id);
    put("month", ColumnModel::UniformInt { lo: 1, hi: 12 });
    put("year", ColumnModel::UniformInt { lo: 2004, hi: 2006 });
    put("age", ColumnModel::Normal { mean: 45.0, sd: 13.0, min: 18.0, max: 90.0, integer: true });
    put("ndep", ColumnModel::UniformInt { lo: 0, hi: 6 });
    put("gender", ColumnModel::Categorical { labels: labels(&["female", "male"]), missing: 0.0 });
    put(
        "marital",
        ColumnModel::Categorical { labels: labels(&["divorced", "married", "single", "widowed"]), missing: 0.0 },
    );
    put("tenure", ColumnModel::Categorical { labels: labels(&["mortgage", "outright", "rent"]), missing: 0.0 });
    put(
        "region",
        ColumnModel::Categorical {
            labels: labels(&["east", "london", "midlands", "north", "scotland", "south", "wales"]),
            missing: 0.0,
        },
    );
    put(
        "employment",
        ColumnModel::Categorical { labels: labels(&["employed", "retired", "selfemployed", "unemployed"]), missing: 0.0 },
    );
    put(
        "occupation",
        ColumnModel::Categorical { labels: labels(&["clerical", "manual", "professional", "sales", "technical"]), missing: 0.45 },
    );
    put("udebt", lognormal(5_000.0));
    put("hvalue", lognormal(150_000.0));
    put("finasset", lognormal(20_000.0));
    put("carvalue", lognormal(8_000.0));
    put("mortdebt", ColumnModel::Proportional { of: "hvalue".into(), factor: 0.6, noise: 0.02 });
    put("mortterm", ColumnModel::UniformInt { lo: 0, hi: 30 });
    for (i, kind) in DEBT_KINDS.iter().enumerate() {
        put(
            &format!("ud{kind}"),
            ColumnModel::Proportional { of: "udebt".into(), factor: 0.05 + 0.02 * i as f64, noise: 0.5 },
        );
        put(&format!("cp{kind}"), ColumnModel::Proportional { of: format!("ud{kind}"), factor: 0.03, noise: 0.01 });
        put(&format!("tc{kind}"), lognormal(12.0 + 6.0 * i as f64));
    }
    for (name, median) in [
        ("clothing", 100.0),
        ("travel", 80.0),
        ("food", 300.0),
        ("services", 150.0),
        ("housing", 600.0),
        ("motoring", 150.0),
        ("leisure", 120.0),
        ("priority", 400.0),
        ("sundries", 60.0),
        ("sempspend", 50.0),
        ("other", 70.0),
        ("income", 2_500.0),
    ] {
        put(name, lognormal(median));
    }
    m
}

/// The six planted groups: size and shifts of ±2 base IQRs.
pub fn default_specs() -> Vec<GroupSpec> {
    const S: f64 = 2.0;
    vec![
        GroupSpec::new(1, 120, &[("hvalue", S), ("carvalue", S), ("priority", S), ("other", S)]),
        GroupSpec::new(2, 80, &[("income", -S), ("carvalue", -S), ("travel", S)]),
        GroupSpec::new(3, 80, &[("hvalue", S), ("travel", S)]),
        GroupSpec::new(4, 120, &[("income", S), ("hvalue", -S), ("priority", S), ("other", S), ("motoring", S)]),
        GroupSpec::new(5, 120, &[("income", S), ("finasset", S), ("carvalue", S)]),
        GroupSpec::new(6, 80, &[("udebt", S), ("travel", S)]),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub table: DataTable,
    /// Planted group id of every table row, duplicates included.
    pub truth: Vec<usize>,
}

impl Generated {
    pub fn write_truth_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(["group"])?;
        for g in &self.truth {
            w.write_record([g.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn sample(model: &ColumnModel, row: &BTreeMap<&str, f64>, pid: usize, rng: &mut ChaCha8Rng) -> Result<Cell> {
    let z = |rng: &mut ChaCha8Rng| -> f64 { Normal::new(0.0, 1.0).unwrap().sample(rng) };
    let cents = |v: f64| (v * 100.0).round() / 100.0;
    Ok(match model {
        ColumnModel::Id => Cell::Number(pid as f64),
        ColumnModel::LogNormal { median, sigma } => Cell::Number(cents(median * (sigma * z(rng)).exp())),
        ColumnModel::Normal { mean, sd, min, max, integer } => {
            let v = (mean + sd * z(rng)).clamp(*min, *max);
            Cell::Number(if *integer { v.round() } else { v })
        }
        ColumnModel::UniformInt { lo, hi } => Cell::Number(rng.random_range(*lo..=*hi) as f64),
        ColumnModel::Categorical { labels, missing } => {
            let pick = labels.choose(rng).cloned();
            if rng.random::<f64>() < *missing {
                Cell::Missing
            } else {
                pick.map_or(Cell::Missing, Cell::Label)
            }
        }
        ColumnModel::Proportional { of, factor, noise } => {
            let base = row
                .get(of.as_str())
                .ok_or_else(|| Error::InvalidArgument(format!("column model refers to `{of}`, which is not generated earlier")))?;
            Cell::Number(cents(factor * base * (noise * z(rng)).exp()))
        }
    })
}

/// Draws `size` rows per group, then blanks cells at `missing_rate` and appends
/// `round(duplicate_rate · n)` copies of random rows (same pid).
pub fn generate(schema: &Schema, specs: &[GroupSpec], seed: u64, missing_rate: f64, duplicate_rate: f64) -> Result<Generated> {
    generate_with(schema, &default_models(), specs, seed, missing_rate, duplicate_rate)
}

pub fn generate_with(
    schema: &Schema,
    models: &BTreeMap<String, ColumnModel>,
    specs: &[GroupSpec],
    seed: u64,
    missing_rate: f64,
    duplicate_rate: f64,
) -> Result<Generated> {
    if specs.is_empty() {
        return Err(Error::EmptySpecs);
    }
    for (name, rate) in [("missing_rate", missing_rate), ("duplicate_rate", duplicate_rate)] {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1), got {rate}")));
        }
    }

    let mut group_models = Vec::with_capacity(specs.len());
    for spec in specs {
        if spec.size == 0 {
            return Err(Error::InvalidArgument(format!("group {} has size 0", spec.id)));
        }
        let mut cols = Vec::with_capacity(schema.len());
        for col in schema.columns() {
            let base = spec
                .base
                .get(&col.name)
                .or_else(|| models.get(&col.name))
                .ok_or_else(|| Error::InvalidArgument(format!("no generator for column `{}`", col.name)))?;
            let model = match spec.shifts.get(&col.name) {
                Some(&s) => base.shifted(&col.name, s)?,
                None => base.clone(),
            };
            let nominal = matches!(model, ColumnModel::Categorical { .. });
            if nominal != (col.kind == AttributeKind::Nominal) {
                return Err(Error::CellKind(col.name.clone()));
            }
            cols.push(model);
        }
        if let Some(a) = spec.shifts.keys().find(|a| schema.position(a).is_none()) {
            return Err(Error::UnknownColumn(a.clone()));
        }
        group_models.push(cols);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<Cell>> = Vec::new();
    let mut truth = Vec::new();
    for (spec, cols) in specs.iter().zip(&group_models) {
        for _ in 0..spec.size {
            let pid = rows.len() + 1;
            let mut values: BTreeMap<&str, f64> = BTreeMap::new();
            let mut row = Vec::with_capacity(cols.len());
            for (col, model) in schema.columns().iter().zip(cols) {
                let cell = sample(model, &values, pid, &mut rng)?;
                if let Cell::Number(v) = cell {
                    values.insert(col.name.as_str(), v);
                }
                row.push(cell);
            }
            rows.push(row);
            truth.push(spec.id);
        }
    }

    let id_cols: Vec<bool> = schema.columns().iter().map(|c| matches!(models.get(&c.name), Some(ColumnModel::Id))).collect();
    if missing_rate > 0.0 {
        for row in &mut rows {
            for (cell, &is_id) in row.iter_mut().zip(&id_cols) {
                if !is_id && rng.random::<f64>() < missing_rate {
                    *cell = Cell::Missing;
                }
            }
        }
    }

    let n = rows.len();
    let dups = (duplicate_rate * n as f64).round() as usize;
    for _ in 0..dups {
        let src = rng.random_range(0..n);
        rows.push(rows[src].clone());
        truth.push(truth[src]);
    }

    Ok(Generated {
        table: DataTable::from_rows(schema.clone(), rows)?,
        truth,
    })
}
