//! End-to-end orchestration: preprocess, sweep, select k, profile, match and label.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cluster::{sweep, Algorithm, SweepConfig, SweepReport};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::personality::{characterize_groups, SelfishnessRanking};
use crate::preprocess::{preprocess, scale, PreprocessLog, PreprocessOptions};
use crate::profiling::{
    cluster_summary, expression_markers, global_summary, match_groups, BehaviouralGroup, BoxStats, ClusterRef,
    SourcedProfile,
};
use crate::table::{AttributeCategory, DataTable};
use crate::validation::{select_best_k, KSelection, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineOptions {
    pub preprocess: PreprocessOptions,
    pub algorithms: Vec<Algorithm>,
    /// Cluster the column-standardised matrix rather than raw values.
    pub scale: bool,
    pub sweep: SweepConfig,
    /// Overrides index-driven k selection for profiling.
    pub profile_k: Option<usize>,
    pub tau: f64,
    pub threshold: f64,
    pub epsilon: f64,
    /// Fail on expenditure markers the ranking does not cover instead of skipping them.
    pub strict_ranking: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            preprocess: PreprocessOptions::default(),
            algorithms: vec![Algorithm::KMeans, Algorithm::Clara],
            scale: true,
            sweep: SweepConfig::default(),
            profile_k: None,
            tau: 0.5,
            threshold: 0.5,
            epsilon: 0.1,
            strict_ranking: false,
        }
    }
}

/// How the profiled k was reached for one algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KSource {
    Override,
    Agreed,
    /// Indices disagreed; the Calinski-Harabasz peak was used.
    CalinskiPeak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub algorithm: Algorithm,
    pub selection: KSelection,
    pub k: usize,
    pub source: KSource,
}

/// Index verdict, then the profiled k: the override if given, else the agreed k,
/// else the Calinski-Harabasz peak.
pub fn choose_k(algorithm: Algorithm, report: &SweepReport, profile_k: Option<usize>) -> Result<Selection> {
    let selection = select_best_k(report)?;
    let (k, source) = match (profile_k, selection.verdict) {
        (Some(k), _) => {
            if report.entry(k).is_none() {
                return Err(Error::InvalidArgument(format!("profile k {k} was not swept")));
            }
            (k, KSource::Override)
        }
        (None, Verdict::Agreed(k)) => (k, KSource::Agreed),
        (None, Verdict::Range(..)) => (selection.calinski_k, KSource::CalinskiPeak),
    };
    Ok(Selection { algorithm, selection, k, source })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfiledClustering {
    pub algorithm: Algorithm,
    pub k: usize,
    pub assignments: Vec<usize>,
    pub stats: BoxStats,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub log: PreprocessLog,
    pub table: DataTable,
    pub attributes: Vec<String>,
    /// Unscaled stage matrix; profiling statistics are computed on it.
    pub raw: Matrix,
    /// Matrix fed to clustering: standardised, or a copy of `raw` when scaling is off.
    pub clustered: Matrix,
    pub reports: Vec<SweepReport>,
    pub selections: Vec<Selection>,
    pub global: BoxStats,
    pub clusterings: Vec<ProfiledClustering>,
    pub profiles: Vec<SourcedProfile>,
    pub groups: Vec<BehaviouralGroup>,
    pub notes: Vec<String>,
}

pub fn prepare(table: &DataTable, opts: &PreprocessOptions) -> Result<(DataTable, PreprocessLog, Matrix, Matrix, Vec<String>)> {
    let (t, log) = preprocess(table, opts)?;
    let names = t.numeric_column_names();
    let (raw, names) = t.to_matrix(&names)?;
    let scaled = scale(&raw);
    Ok((t, log, raw, scaled, names))
}

/// Profiles one clustering of `raw` against the global statistics.
pub fn profile_clustering(
    stage: &str,
    algorithm: Algorithm,
    raw: &Matrix,
    attributes: &[String],
    assignments: &[usize],
    global: &BoxStats,
    tau: f64,
) -> Result<(BoxStats, Vec<SourcedProfile>)> {
    let stats = cluster_summary(raw, attributes, assignments)?;
    let profiles = expression_markers(&stats, global, tau)?
        .into_iter()
        .map(|profile| SourcedProfile {
            source: ClusterRef { stage: stage.to_string(), algorithm, cluster: profile.cluster },
            profile,
        })
        .collect();
    Ok((stats, profiles))
}

pub fn expenditure_columns(table: &DataTable) -> BTreeSet<String> {
    table.schema().in_category(AttributeCategory::Expenditure).into_iter().collect()
}

/// Labels groups by selfishness score. Unless `strict`, expenditure attributes the ranking
/// does not cover are skipped, and a note names any that occur in a signature.
pub fn label_groups(
    groups: &[BehaviouralGroup],
    ranking: &SelfishnessRanking,
    expenditure: &BTreeSet<String>,
    epsilon: f64,
    strict: bool,
) -> Result<(Vec<BehaviouralGroup>, Vec<String>)> {
    let mut expenditure = expenditure.clone();
    let mut notes = Vec::new();
    if !strict {
        let unranked: BTreeSet<String> = expenditure.iter().filter(|a| ranking.weight(a).is_none()).cloned().collect();
        let used: Vec<&String> = unranked
            .iter()
            .filter(|a| groups.iter().any(|g| g.signature.contains_key(*a)))
            .collect();
        if !used.is_empty() {
            notes.push(format!("unranked expenditure markers ignored when labelling: {used:?}"));
        }
        expenditure.retain(|a| !unranked.contains(a));
    }
    Ok((characterize_groups(groups, ranking, &expenditure, epsilon)?, notes))
}

pub fn run(table: &DataTable, opts: &PipelineOptions, ranking: &SelfishnessRanking) -> Result<PipelineOutput> {
    if opts.algorithms.is_empty() {
        return Err(Error::InvalidArgument("no clustering algorithm selected".into()));
    }
    let (t, log, raw, scaled, attributes) = prepare(table, &opts.preprocess)?;
    let clustered = if opts.scale { scaled } else { raw.clone() };
    let stage = opts.preprocess.stage.name.clone();
    let global = global_summary(&raw, &attributes)?;

    let mut reports = Vec::new();
    let mut selections = Vec::new();
    let mut clusterings = Vec::new();
    let mut profiles = Vec::new();
    for &algorithm in &opts.algorithms {
        let report = sweep(&clustered, algorithm, &opts.sweep)?;
        let sel = choose_k(algorithm, &report, opts.profile_k)?;
        let assignments = report.entry(sel.k).expect("selected k was swept").result.assignments.clone();
        let (stats, p) = profile_clustering(&stage, algorithm, &raw, &attributes, &assignments, &global, opts.tau)?;
        profiles.extend(p);
        clusterings.push(ProfiledClustering { algorithm, k: sel.k, assignments, stats });
        reports.push(report);
        selections.push(sel);
    }

    let groups = match_groups(&profiles, opts.threshold);
    let (groups, notes) = label_groups(&groups, ranking, &expenditure_columns(&t), opts.epsilon, opts.strict_ranking)?;
    Ok(PipelineOutput {
        log,
        table: t,
        attributes,
        raw,
        clustered,
        reports,
        selections,
        global,
        clusterings,
        profiles,
        groups,
        notes,
    })
}
