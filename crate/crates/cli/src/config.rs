use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use segmint_core::cluster::{Algorithm, SweepConfig};
use segmint_core::personality::Normalization;
use segmint_core::pipeline::PipelineOptions;
use segmint_core::preprocess::{DuplicatePolicy, PreprocessOptions, StageSpec};

use crate::error::{CliError, Context, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AlgoChoice {
    Kmeans,
    Clara,
    Both,
}

impl AlgoChoice {
    pub fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgoChoice::Kmeans => vec![Algorithm::KMeans],
            AlgoChoice::Clara => vec![Algorithm::Clara],
            AlgoChoice::Both => vec![Algorithm::KMeans, Algorithm::Clara],
        }
    }
}

/// Everything a run depends on. Written verbatim to `run_config.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub stage: String,
    /// Custom stage definition; replaces `stage` when set.
    pub stage_file: Option<PathBuf>,
    pub algo: AlgoChoice,
    pub scale: bool,
    pub id_column: String,
    pub duplicate_policy: DuplicatePolicy,
    pub drop_columns: Vec<String>,
    pub max_missing_fraction: f64,
    pub correlation_threshold: f64,
    pub sweep: SweepConfig,
    pub profile_k: Option<usize>,
    pub tau: f64,
    pub threshold: f64,
    pub epsilon: f64,
    pub normalization: Normalization,
    pub ratings: Option<PathBuf>,
    pub strict_ranking: bool,
    /// Output of an earlier `sweep`, read by `profile`.
    pub sweep_dir: Option<PathBuf>,
    /// Groups JSON labelled by `selfish`.
    pub groups: Option<PathBuf>,
    pub specs: Option<PathBuf>,
    pub missing_rate: f64,
    pub duplicate_rate: f64,
    pub out: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PipelineOptions::default();
        RunConfig {
            input: None,
            schema: None,
            stage: "A".into(),
            stage_file: None,
            algo: AlgoChoice::Both,
            scale: p.scale,
            id_column: p.preprocess.id_column,
            duplicate_policy: p.preprocess.duplicate_policy,
            drop_columns: p.preprocess.drop_columns,
            max_missing_fraction: p.preprocess.max_missing_fraction,
            correlation_threshold: p.preprocess.correlation_threshold,
            sweep: p.sweep,
            profile_k: None,
            tau: p.tau,
            threshold: p.threshold,
            epsilon: p.epsilon,
            normalization: Normalization::None,
            ratings: None,
            strict_ranking: p.strict_ranking,
            sweep_dir: None,
            groups: None,
            specs: None,
            missing_rate: 0.02,
            duplicate_rate: 0.01,
            out: PathBuf::from("segmint-out"),
            seed: 0,
        }
    }
}

/// Flags that override the config file.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// JSON run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// A, B or C
    #[arg(long, global = true)]
    pub stage: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub algo: Option<AlgoChoice>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true)]
    pub schema: Option<PathBuf>,
    #[arg(long, global = true)]
    pub ratings: Option<PathBuf>,
    #[arg(long, global = true)]
    pub specs: Option<PathBuf>,
    #[arg(long, global = true)]
    pub sweep_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub groups: Option<PathBuf>,
    /// Sweep worker threads (0 = all cores); results do not depend on it
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub k_min: Option<usize>,
    #[arg(long, global = true)]
    pub k_max: Option<usize>,
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    #[arg(long, global = true)]
    pub profile_k: Option<usize>,
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// none, unit-max or z-score
    #[arg(long, global = true)]
    pub normalization: Option<String>,
    #[arg(long, global = true)]
    pub missing_rate: Option<f64>,
    #[arg(long, global = true)]
    pub duplicate_rate: Option<f64>,
    /// Cluster raw rather than standardised values
    #[arg(long, global = true)]
    pub no_scale: bool,
    /// Fail on expenditure markers missing from the ranking
    #[arg(long, global = true)]
    pub strict_ranking: bool,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| CliError::ConfigFile { path: path.to_path_buf(), source })
    }

    /// Loads the config file if given, then applies flags. The seed also becomes the sweep base seed.
    pub fn resolve(o: &Overrides) -> Result<RunConfig> {
        let mut c = match &o.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $field:expr),* $(,)?) => {
                $(if let Some(v) = o.$flag.clone() { $field = v.into(); })*
            };
        }
        set!(
            seed => c.seed,
            stage => c.stage,
            algo => c.algo,
            out => c.out,
            k_min => c.sweep.k_min,
            k_max => c.sweep.k_max,
            restarts => c.sweep.restarts,
            tau => c.tau,
            threshold => c.threshold,
            epsilon => c.epsilon,
            missing_rate => c.missing_rate,
            duplicate_rate => c.duplicate_rate,
        );
        set!(
            input => c.input,
            schema => c.schema,
            ratings => c.ratings,
            specs => c.specs,
            sweep_dir => c.sweep_dir,
            groups => c.groups,
            profile_k => c.profile_k,
        );
        if let Some(n) = &o.normalization {
            c.normalization = n.parse().map_err(|e: segmint_core::Error| CliError::config("normalization", e.to_string()))?;
        }
        if o.no_scale {
            c.scale = false;
        }
        if o.strict_ranking {
            c.strict_ranking = true;
        }
        c.sweep.base_seed = c.seed;
        c.sweep.workers = o.workers.unwrap_or(0);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, field: &'static str, message: &str| if ok { Ok(()) } else { Err(CliError::config(field, message)) };
        check(self.tau > 0.0 && self.tau.is_finite(), "tau", "must be a positive number")?;
        check(self.threshold > 0.0 && self.threshold <= 1.0, "threshold", "must lie in (0, 1]")?;
        check(self.epsilon >= 0.0 && self.epsilon.is_finite(), "epsilon", "must be non-negative")?;
        check((0.0..1.0).contains(&self.missing_rate), "missing_rate", "must lie in [0, 1)")?;
        check((0.0..1.0).contains(&self.duplicate_rate), "duplicate_rate", "must lie in [0, 1)")?;
        check(
            (0.0..=1.0).contains(&self.max_missing_fraction),
            "max_missing_fraction",
            "must lie in [0, 1]",
        )?;
        check(
            self.correlation_threshold > 0.0 && self.correlation_threshold <= 1.0,
            "correlation_threshold",
            "must lie in (0, 1]",
        )?;
        check(self.sweep.k_min >= 1 && self.sweep.k_min <= self.sweep.k_max, "sweep.k_min", "must satisfy 1 <= k_min <= k_max")?;
        check(self.sweep.restarts >= 1, "sweep.restarts", "must be at least 1")?;
        if let Some(k) = self.profile_k {
            check(
                (self.sweep.k_min..=self.sweep.k_max).contains(&k),
                "profile_k",
                "must lie within the swept k range",
            )?;
        }
        self.stage_spec().map(|_| ())
    }

    pub fn stage_spec(&self) -> Result<StageSpec> {
        match &self.stage_file {
            Some(p) => StageSpec::from_json_file(p).context(|| format!("loading stage file {}", p.display())),
            None => StageSpec::named(&self.stage).map_err(|e| CliError::config("stage", e.to_string())),
        }
    }

    pub fn require_input(&self) -> Result<&Path> {
        self.input.as_deref().ok_or_else(|| CliError::config("input", "an input CSV is required for this command"))
    }

    pub fn preprocess_options(&self) -> Result<PreprocessOptions> {
        Ok(PreprocessOptions {
            id_column: self.id_column.clone(),
            duplicate_policy: self.duplicate_policy,
            drop_columns: self.drop_columns.clone(),
            max_missing_fraction: self.max_missing_fraction,
            correlation_threshold: self.correlation_threshold,
            stage: self.stage_spec()?,
        })
    }

    pub fn pipeline_options(&self) -> Result<PipelineOptions> {
        Ok(PipelineOptions {
            preprocess: self.preprocess_options()?,
            algorithms: self.algo.algorithms(),
            scale: self.scale,
            sweep: self.sweep.clone(),
            profile_k: self.profile_k,
            tau: self.tau,
            threshold: self.threshold,
            epsilon: self.epsilon,
            strict_ranking: self.strict_ranking,
        })
    }
}
