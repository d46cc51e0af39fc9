use std::path::{Path, PathBuf};

use clap::Subcommand;
use serde::Serialize;

use segmint_core::cluster::{sweep, Algorithm, SweepReport};
use segmint_core::matrix::Matrix;
use segmint_core::personality::{selfishness_weights, RatingsMatrix, SelfishnessRanking};
use segmint_core::pipeline::{self, choose_k, label_groups, profile_clustering, PipelineOutput, Selection};
use segmint_core::preprocess::PreprocessLog;
use segmint_core::profiling::svg::{self, Curve};
use segmint_core::profiling::{global_summary, match_groups, pca_project, BehaviouralGroup, BoxStats, SourcedProfile};
use segmint_core::report::{assignment_file_name, read_assignments, write_assignments, write_scores_csv, write_sweep};
use segmint_core::synthgen::{default_specs, generate, GroupSpec};
use segmint_core::table::{read_csv, write_csv, AttributeCategory, DataTable, Schema, DEFAULT_MISSING_TOKEN};

use crate::config::RunConfig;
use crate::error::{CliError, Context, Result};
use crate::output::{write_json, write_text, Staging};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Write a synthetic table with planted groups
    Generate,
    /// Clean, impute, prune, encode and select a stage
    Preprocess,
    /// Cluster over a range of k with restarts and score each k
    Sweep,
    /// Box statistics, markers and behavioural groups from a sweep directory
    Profile,
    /// Selfishness ranking, optionally labelling a groups file
    Selfish,
    /// Preprocess, sweep, profile and label in one run
    Pipeline,
}

/// Runs `command` and returns the committed output directory.
pub fn run(command: Command, cfg: &RunConfig) -> Result<PathBuf> {
    let st = Staging::new(&cfg.out)?;
    write_json(&st.join("run_config.json"), cfg)?;
    match command {
        Command::Generate => generate_cmd(cfg, &st)?,
        Command::Preprocess => preprocess_cmd(cfg, &st)?,
        Command::Sweep => sweep_cmd(cfg, &st)?,
        Command::Profile => profile_cmd(cfg, &st)?,
        Command::Selfish => selfish_cmd(cfg, &st)?,
        Command::Pipeline => pipeline_cmd(cfg, &st)?,
    }
    st.commit()
}

fn schema(cfg: &RunConfig) -> Result<Schema> {
    match &cfg.schema {
        Some(p) => Schema::from_json_file(p).context(|| format!("loading schema {}", p.display())),
        None => Ok(Schema::bundled()),
    }
}

fn input_table(cfg: &RunConfig, schema: &Schema) -> Result<DataTable> {
    let path = cfg.require_input()?;
    read_csv(path, schema, DEFAULT_MISSING_TOKEN).context(|| format!("reading input {}", path.display()))
}

fn write_table(path: &Path, table: &DataTable) -> Result<()> {
    write_csv(table, path).context(|| format!("writing {}", path.display()))
}

fn write_matrix(path: &Path, m: &Matrix, names: &[String]) -> Result<()> {
    let mut text = names.join(",");
    text.push('\n');
    for row in m.rows_iter() {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    write_text(path, &text)
}

fn generate_cmd(cfg: &RunConfig, st: &Staging) -> Result<()> {
    let schema = schema(cfg)?;
    let specs = match &cfg.specs {
        Some(p) => GroupSpec::from_json_file(p).context(|| format!("loading specs {}", p.display()))?,
        None => default_specs(),
    };
    let g = generate(&schema, &specs, cfg.seed, cfg.missing_rate, cfg.duplicate_rate).context(|| "generating data".into())?;
    write_table(&st.join("data.csv"), &g.table)?;
    g.write_truth_csv(st.join("truth.csv")).context(|| "writing truth.csv".into())?;
    write_json(&st.join("specs.json"), &specs)
}

struct Prepared {
    table: DataTable,
    log: PreprocessLog,
    raw: Matrix,
    clustered: Matrix,
    attributes: Vec<String>,
}

fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let schema = schema(cfg)?;
    let input = input_table(cfg, &schema)?;
    let (table, log, raw, scaled, attributes) =
        pipeline::prepare(&input, &cfg.preprocess_options()?).context(|| "preprocessing".into())?;
    let clustered = if cfg.scale { scaled } else { raw.clone() };
    Ok(Prepared { table, log, raw, clustered, attributes })
}

fn preprocess_cmd(cfg: &RunConfig, st: &Staging) -> Result<()> {
    let p = prepare(cfg)?;
    write_table(&st.join("preprocessed.csv"), &p.table)?;
    write_json(&st.join("preprocess_log.json"), &p.log)?;
    write_matrix(&st.join("matrix.csv"), &p.clustered, &p.attributes)
}

fn write_sweeps(st: &Staging, reports: &[SweepReport], selections: &[Selection]) -> Result<()> {
    for r in reports {
        write_sweep(st.path(), r).context(|| format!("writing {} sweep", r.algorithm))?;
        let sil = Curve { name: "silhouette", points: r.entries.iter().map(|e| (e.k, e.silhouette)).collect() };
        let ch = Curve { name: "calinski-harabasz", points: r.entries.iter().map(|e| (e.k, e.calinski)).collect() };
        let doc = svg::index_curves(&format!("{} validation indices", r.algorithm), &[sil, ch]);
        write_text(&st.join(&format!("index_curves_{}.svg", r.algorithm)), &doc)?;
    }
    write_scores_csv(st.join("scores.csv"), reports).context(|| "writing scores.csv".into())?;
    write_json(&st.join("selection.json"), selections)
}

fn sweep_cmd(cfg: &RunConfig, st: &Staging) -> Result<()> {
    let p = prepare(cfg)?;
    write_json(&st.join("preprocess_log.json"), &p.log)?;
    let mut reports = Vec::new();
    let mut selections = Vec::new();
    for algorithm in cfg.algo.algorithms() {
        let r = sweep(&p.clustered, algorithm, &cfg.sweep).context(|| format!("{algorithm} sweep"))?;
        selections.push(choose_k(algorithm, &r, cfg.profile_k).context(|| format!("{algorithm} k selection"))?);
        reports.push(r);
    }
    write_sweeps(st, &reports, &selections)
}

#[derive(Serialize)]
struct PcaSummary<'a> {
    attributes: &'a [String],
    explained_variance: &'a [f64],
    explained_ratio: Vec<f64>,
    loadings: Vec<Vec<f64>>,
}

struct Profiled<'a> {
    algorithm: Algorithm,
    assignments: &'a [usize],
    stats: &'a BoxStats,
}

fn write_profiling(
    st: &Staging,
    clustered: &Matrix,
    attributes: &[String],
    global: &BoxStats,
    runs: &[Profiled<'_>],
    profiles: &[SourcedProfile],
) -> Result<()> {
    global.write_csv(st.join("global_stats.csv")).context(|| "writing global_stats.csv".into())?;
    let components = 2.min(clustered.ncols()).min(clustered.nrows());
    let pca = if clustered.nrows() >= 2 && components >= 1 {
        Some(pca_project(clustered, components).context(|| "PCA".into())?)
    } else {
        None
    };
    if let Some(p) = &pca {
        write_json(
            &st.join("pca.json"),
            &PcaSummary {
                attributes,
                explained_variance: &p.explained_variance,
                explained_ratio: p.explained_ratio(),
                loadings: p.loadings.rows_iter().map(<[f64]>::to_vec).collect(),
            },
        )?;
    }
    for r in runs {
        r.stats
            .write_csv(st.join(&format!("boxstats_{}.csv", r.algorithm)))
            .context(|| format!("writing {} box statistics", r.algorithm))?;
        write_assignments(st.join(&format!("profiled_{}.csv", r.algorithm)), r.assignments)
            .context(|| "writing profiled assignments".into())?;
        write_text(&st.join(&format!("boxplots_{}.svg", r.algorithm)), &svg::boxplot_grid(r.stats))?;
        if let Some(p) = &pca {
            write_text(&st.join(&format!("biplot_{}.svg", r.algorithm)), &svg::biplot(p, r.assignments, attributes))?;
        }
    }
    write_json(&st.join("profiles.json"), profiles)
}

fn profile_cmd(cfg: &RunConfig, st: &Staging) -> Result<()> {
    let dir = cfg
        .sweep_dir
        .as_deref()
        .ok_or_else(|| CliError::config("sweep_dir", "profile needs the output directory of a sweep"))?;
    let p = prepare(cfg)?;
    let selection_path = dir.join("selection.json");
    let selections: Vec<Selection> = segmint_core::report::read_json(&selection_path)
        .context(|| format!("reading {}", selection_path.display()))?;
    let global = global_summary(&p.raw, &p.attributes).context(|| "global statistics".into())?;
    let stage = cfg.stage_spec()?.name;

    let mut loaded = Vec::new();
    let mut profiles = Vec::new();
    for algorithm in cfg.algo.algorithms() {
        let sel = selections
            .iter()
            .find(|s| s.algorithm == algorithm)
            .ok_or_else(|| CliError::config("algo", format!("{} has no sweep in {}", algorithm, dir.display())))?;
        let k = cfg.profile_k.unwrap_or(sel.k);
        let path = dir.join(assignment_file_name(algorithm, k));
        let a = read_assignments(&path).context(|| format!("reading {}", path.display()))?;
        if a.len() != p.raw.nrows() {
            return Err(CliError::config(
                "sweep_dir",
                format!("{} has {} rows but the preprocessed input has {}", path.display(), a.len(), p.raw.nrows()),
            ));
        }
        let (stats, prof) = profile_clustering(&stage, algorithm, &p.raw, &p.attributes, &a, &global, cfg.tau)
            .context(|| format!("profiling {algorithm}"))?;
        profiles.extend(prof);
        loaded.push((algorithm, a, stats));
    }
    let runs: Vec<Profiled> = loaded
        .iter()
        .map(|(algorithm, a, stats)| Profiled { algorithm: *algorithm, assignments: a, stats })
        .collect();
    write_profiling(st, &p.clustered, &p.attributes, &global, &runs, &profiles)?;
    write_json(&st.join("groups.json"), &match_groups(&profiles, cfg.threshold))
}

fn ranking(cfg: &RunConfig) -> Result<SelfishnessRanking> {
    match &cfg.ratings {
        Some(path) => {
            let r = RatingsMatrix::from_csv(path).context(|| format!("reading ratings {}", path.display()))?;
            selfishness_weights(&r, cfg.normalization).context(|| "computing selfishness weights".into())
        }
        None => Ok(SelfishnessRanking::bundled()),
    }
}

fn write_ranking(st: &Staging, r: &SelfishnessRanking) -> Result<()> {
    r.write_csv(st.join("ranking.csv")).context(|| "writing ranking.csv".into())?;
    write_json(&st.join("ranking.json"), r)
}

fn selfish_cmd(cfg: &RunConfig, st: &Staging) -> Result<()> {
    let r = ranking(cfg)?;
    write_ranking(st, &r)?;
    if let Some(path) = &cfg.groups {
        let groups: Vec<BehaviouralGroup> =
            segmint_core::report::read_json(path).context(|| format!("reading groups {}", path.display()))?;
        let expenditure = schema(cfg)?.in_category(AttributeCategory::Expenditure).into_iter().collect();
        let (labelled, notes) = label_groups(&groups, &r, &expenditure, cfg.epsilon, cfg.strict_ranking)
            .context(|| "labelling groups".into())?;
        write_json(&st.join("groups.json"), &labelled)?;
        write_json(&st.join("notes.json"), &notes)?;
    }
    Ok(())
}

fn pipeline_cmd(cfg: &RunConfig, st: &Staging) -> Result<()> {
    let schema = schema(cfg)?;
    let input = input_table(cfg, &schema)?;
    let r = ranking(cfg)?;
    let out: PipelineOutput = pipeline::run(&input, &cfg.pipeline_options()?, &r).context(|| "pipeline".into())?;

    write_table(&st.join("preprocessed.csv"), &out.table)?;
    write_json(&st.join("preprocess_log.json"), &out.log)?;
    write_sweeps(st, &out.reports, &out.selections)?;
    let runs: Vec<Profiled> = out
        .clusterings
        .iter()
        .map(|c| Profiled { algorithm: c.algorithm, assignments: &c.assignments, stats: &c.stats })
        .collect();
    write_profiling(st, &out.clustered, &out.attributes, &out.global, &runs, &out.profiles)?;
    write_ranking(st, &r)?;
    write_json(&st.join("groups.json"), &out.groups)?;
    write_json(&st.join("notes.json"), &out.notes)
}
