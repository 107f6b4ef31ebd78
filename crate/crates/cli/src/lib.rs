//! Library side of the `credible` command: experiment orchestration, CSV
//! training and artifact emission. `main.rs` only parses flags.

pub mod csv_io;
pub mod manifest;

use std::path::{Path, PathBuf};

use credible::data::{DataSplits, Dataset, KnowledgeVector, SplitIndices, WeightVector};
use credible::experiments::{
    correlation_sweep, expert_mistake, known_fraction, mean_group_symkl, summarize, two_feature_grid, ExperimentConfig,
    LogRatioCell, MethodSummary, SeedOutcome,
};
use credible::metrics::{average_precision, roc_auc};
use credible::optimizer::{predict_scores, LossKind, TrainConfig};
use credible::penalties::PenaltySpec;
use credible::selection::{bootstrap_filter, select_sparsest, train_grid, FailedCandidate, PenaltyFamily};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csv_io::format_f64;
use crate::manifest::{unix_now, ArtifactWriter, RunManifest, Tsv};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Model(#[from] credible::Error),
}

impl CliError {
    pub fn data(path: &Path, message: impl Into<String>) -> Self {
        CliError::Data {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }

    /// 1 for usage errors, 2 for bad input data or files.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data { .. } | CliError::Io { .. } | CliError::Model(_) => 2,
        }
    }
}

/// Exit code for a run whose audits failed.
pub const AUDIT_FAILURE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentName {
    TwoFeature,
    CorrelationSweep,
    KnownFraction,
    ExpertMistake,
}

impl ExperimentName {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "two_feature" => Ok(Self::TwoFeature),
            "correlation_sweep" => Ok(Self::CorrelationSweep),
            "known_fraction" => Ok(Self::KnownFraction),
            "expert_mistake" => Ok(Self::ExpertMistake),
            _ => Err(CliError::Usage(format!(
                "unknown experiment `{s}`; expected two_feature, correlation_sweep, known_fraction or expert_mistake"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::TwoFeature => "two_feature",
            Self::CorrelationSweep => "correlation_sweep",
            Self::KnownFraction => "known_fraction",
            Self::ExpertMistake => "expert_mistake",
        }
    }
}

/// Parses `0..20` (half-open) or a comma-separated list.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse seeds `{s}`; use a list like 0,1,2 or a range like 0..20"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a >= b {
            return Err(bad());
        }
        return Ok((a..b).collect());
    }
    s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect()
}

/// Parses `lo:hi:count` (log10 exponents) or a comma-separated list of values.
pub fn parse_lambda_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse lambda grid `{s}`; use lo:hi:count (log10) or a list"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if count == 0 {
            return Err(bad());
        }
        return Ok(credible::selection::log_spaced(lo, hi, count));
    }
    s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect()
}

pub fn parse_families(s: &str) -> Result<Vec<PenaltyFamily>, CliError> {
    s.split(',')
        .map(|p| {
            PenaltyFamily::parse(p.trim()).ok_or_else(|| CliError::Usage(format!("unknown penalty `{}`", p.trim())))
        })
        .collect()
}

/// Settings shared by both subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub seeds: Vec<u64>,
    pub out: PathBuf,
    pub experiment: ExperimentConfig,
}

impl RunOptions {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.seeds.is_empty() {
            return Err(CliError::Usage("at least one seed is required".into()));
        }
        if self.experiment.families.is_empty() {
            return Err(CliError::Usage("at least one penalty is required".into()));
        }
        if !(0.0..=1.0).contains(&self.experiment.alpha) {
            return Err(CliError::Usage("--alpha must lie in [0, 1]".into()));
        }
        if !(self.experiment.symkl_epsilon > 0.0) {
            return Err(CliError::Usage("--epsilon-symkl must be positive".into()));
        }
        if self.experiment.train.max_epochs == 0 {
            return Err(CliError::Usage("--max-epochs must be positive".into()));
        }
        self.experiment
            .grid
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

/// Fixed facts about how every run is set up, recorded in each report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignFlags {
    pub loss: LossKind,
    pub standardized: bool,
    pub intercept: bool,
    pub split: String,
    pub symkl_normalization: String,
    pub lambda_path_warm_start: bool,
    pub bootstrap_replicates: usize,
}

impl DesignFlags {
    fn current(train: &TrainConfig) -> Self {
        Self {
            loss: LossKind::Logistic,
            standardized: true,
            intercept: train.fit_intercept,
            split: "60/20/20 train/validation/test, shuffled by seed".into(),
            symkl_normalization: "per_group".into(),
            lambda_path_warm_start: true,
            bootstrap_replicates: credible::selection::BOOTSTRAP_REPLICATES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditLine {
    pub name: String,
    pub seed: u64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentName,
    pub design: DesignFlags,
    pub config: ExperimentConfig,
    pub outcomes: Vec<SeedOutcome>,
    pub log_ratio_grid: Vec<(u64, Vec<LogRatioCell>)>,
    pub summary: Vec<MethodSummary>,
    pub audits: Vec<AuditLine>,
}

fn opt_f64(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), format_f64)
}

fn beta_of(spec: &PenaltySpec) -> Option<f64> {
    match spec {
        PenaltySpec::NaiveQ { beta } | PenaltySpec::ElasticNet { beta } => Some(*beta),
        _ => None,
    }
}

/// Generates data, runs every requested method through selection and writes
/// `report.json`, plot-ready TSV tables and `manifest.json` into `out`.
pub fn run_experiment(name: ExperimentName, options: &RunOptions) -> Result<RunManifest, CliError> {
    options.validate()?;
    let started = unix_now();
    let cfg = &options.experiment;
    let mut writer = ArtifactWriter::new(&options.out)?;
    let mut outcomes = Vec::new();
    let mut grids = Vec::new();
    let mut audits = Vec::new();

    for &seed in &options.seeds {
        match name {
            ExperimentName::TwoFeature => {
                let cells = two_feature_grid(seed, &cfg.grid.lambdas, &cfg.grid.betas, &cfg.train)?;
                let eye_ok = cells
                    .iter()
                    .filter(|c| c.penalty == PenaltySpec::Eye && c.nontrivial)
                    .all(|c| c.log_ratio >= 0.0);
                audits.push(AuditLine {
                    name: "eye_log_ratio_nonnegative".into(),
                    seed,
                    passed: eye_ok,
                    detail: "EYE keeps |θ_known| ≥ |θ_unknown| at every nontrivial λ".into(),
                });
                grids.push((seed, cells));
            }
            ExperimentName::CorrelationSweep => outcomes.push(correlation_sweep(seed, cfg)?),
            ExperimentName::ExpertMistake => outcomes.push(expert_mistake(seed, cfg)?),
            ExperimentName::KnownFraction => {
                let o = known_fraction(seed, cfg)?;
                if let Some(reports) = &o.eye_structure {
                    let failing: Vec<usize> = reports.iter().filter(|r| !r.passes).map(|r| r.group_id).collect();
                    audits.push(AuditLine {
                        name: "perfect_correlation_structure".into(),
                        seed,
                        passed: failing.is_empty(),
                        detail: format!("groups failing: {failing:?}"),
                    });
                }
                outcomes.push(o);
            }
        }
    }

    if !grids.is_empty() {
        let mut t = Tsv::new(&["seed", "penalty", "beta", "lambda", "theta_known", "theta_unknown", "log_ratio"]);
        for (seed, cells) in &grids {
            for c in cells {
                t.row([
                    seed.to_string(),
                    c.penalty.name().to_string(),
                    opt_f64(beta_of(&c.penalty)),
                    format_f64(c.lambda),
                    format_f64(c.theta[0]),
                    format_f64(c.theta[1]),
                    format_f64(c.log_ratio),
                ]);
            }
        }
        writer.write("log_ratio_grid.tsv", &t.into_bytes())?;
    }

    if !outcomes.is_empty() {
        let mut t = Tsv::new(&["seed", "method", "lambda", "beta", "symkl_sum", "test_auc", "average_precision", "gini"]);
        let mut g = Tsv::new(&["seed", "method", "group", "correlation", "n_known", "symkl"]);
        for o in &outcomes {
            for m in &o.methods {
                t.row([
                    o.seed.to_string(),
                    m.family.name().to_string(),
                    format_f64(m.lambda),
                    opt_f64(beta_of(&m.spec)),
                    format_f64(m.report.symkl_sum),
                    format_f64(m.test_auc),
                    opt_f64(m.report.average_precision),
                    format_f64(m.report.gini),
                ]);
                for (gid, v) in &m.report.per_group_symkl {
                    let spec = o.groups[*gid];
                    g.row([
                        o.seed.to_string(),
                        m.family.name().to_string(),
                        gid.to_string(),
                        format_f64(spec.correlation),
                        spec.n_known.to_string(),
                        format_f64(*v),
                    ]);
                }
            }
        }
        writer.write("per_seed.tsv", &t.into_bytes())?;
        writer.write("group_symkl.tsv", &g.into_bytes())?;

        let mut s = Tsv::new(&["method", "symkl_mean", "symkl_std", "auc_mean", "auc_std"]);
        for row in summarize(&outcomes) {
            s.row([
                row.family.name().to_string(),
                format_f64(row.symkl_sum.mean),
                format_f64(row.symkl_sum.std),
                format_f64(row.auc.mean),
                format_f64(row.auc.std),
            ]);
        }
        writer.write("method_summary.tsv", &s.into_bytes())?;

        // Per-group means only make sense when every seed shares the layout.
        if name != ExperimentName::ExpertMistake {
            let groups = &outcomes[0].groups;
            let mut f = Tsv::new(&["method", "group", "correlation", "n_known", "mean_symkl"]);
            for (family, means) in mean_group_symkl(&outcomes) {
                for (gid, v) in means.iter().enumerate() {
                    f.row([
                        family.name().to_string(),
                        gid.to_string(),
                        format_f64(groups[gid].correlation),
                        groups[gid].n_known.to_string(),
                        format_f64(*v),
                    ]);
                }
            }
            writer.write("mean_group_symkl.tsv", &f.into_bytes())?;
        }
    }

    let audits_passed = audits.iter().all(|a| a.passed);
    let report = ExperimentReport {
        experiment: name,
        design: DesignFlags::current(&cfg.train),
        config: cfg.clone(),
        summary: summarize(&outcomes),
        outcomes,
        log_ratio_grid: grids,
        audits,
    };
    writer.write_json("report.json", &report)?;
    let config = serde_json::to_value(options).expect("options serialize");
    writer.finish(
        &format!("run_experiment {}", name.name()),
        config,
        options.seeds.clone(),
        started,
        audits_passed,
    )
}

/// The model one penalty family selects on user data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedModel {
    pub family: PenaltyFamily,
    pub spec: PenaltySpec,
    pub lambda: f64,
    pub weights: WeightVector,
    pub test_auc: f64,
    pub average_precision: Option<f64>,
    /// Why average precision is missing, when it is.
    pub average_precision_error: Option<String>,
    pub gini: f64,
    pub candidates: usize,
    pub retained: usize,
    pub failures: Vec<FailedCandidate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvReport {
    pub design: DesignFlags,
    pub seed: u64,
    pub feature_names: Vec<String>,
    pub known_features: Vec<String>,
    pub models: Vec<SelectedModel>,
}

/// Runs selection for every requested family on an in-memory dataset.
pub fn train_dataset(
    data: &Dataset,
    r: &KnowledgeVector,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<CsvReport, CliError> {
    if data.y.iter().any(|&y| y != 0.0 && y != 1.0) {
        return Err(CliError::Usage("labels must be 0 or 1".into()));
    }
    let idx = SplitIndices::shuffled(data.n_rows(), seed)?;
    let splits = DataSplits::standardized(data, &idx);
    let mut models = Vec::new();
    for &family in &cfg.families {
        let outcome = train_grid(family, &cfg.grid, &splits, r, &cfg.train, seed)?;
        let retained = bootstrap_filter(&outcome.candidates, cfg.alpha)?;
        let chosen = select_sparsest(&retained)?;
        let scores = predict_scores(LossKind::Logistic, &chosen.fit.weights, &splits.test.x)?;
        let test_auc = roc_auc(scores.view(), splits.test.y.view())?;
        let (average_precision, average_precision_error) = match average_precision(chosen.fit.weights.theta.view(), r) {
            Ok(ap) => (Some(ap), None),
            Err(e) => (None, Some(e.to_string())),
        };
        models.push(SelectedModel {
            family,
            spec: chosen.spec.clone(),
            lambda: chosen.lambda,
            weights: chosen.fit.weights.clone(),
            test_auc,
            average_precision,
            average_precision_error,
            gini: chosen.gini,
            candidates: outcome.candidates.len(),
            retained: retained.len(),
            failures: outcome.failures,
        });
    }
    let known_features = data
        .feature_names
        .iter()
        .zip(r.as_slice())
        .filter(|(_, &v)| v == 1.0)
        .map(|(n, _)| n.clone())
        .collect();
    Ok(CsvReport {
        design: DesignFlags::current(&cfg.train),
        seed,
        feature_names: data.feature_names.clone(),
        known_features,
        models,
    })
}

/// Loads a CSV dataset and known-feature list, selects a model per family
/// and writes `report.json`, `weights.tsv` and `manifest.json`.
pub fn train_on_csv(data_path: &Path, r_path: &Path, options: &RunOptions) -> Result<RunManifest, CliError> {
    options.validate()?;
    let started = unix_now();
    let data = csv_io::read_dataset(data_path)?;
    let r = csv_io::read_knowledge(r_path, &data.feature_names)?;
    let seed = options.seeds[0];
    let report = train_dataset(&data, &r, &options.experiment, seed)?;

    let mut writer = ArtifactWriter::new(&options.out)?;
    let mut w = Tsv::new(&["method", "feature", "weight"]);
    for m in &report.models {
        for (name, &v) in data.feature_names.iter().zip(&m.weights.theta) {
            w.row([m.family.name().to_string(), name.clone(), format_f64(v)]);
        }
        w.row([m.family.name().to_string(), "(intercept)".into(), format_f64(m.weights.intercept)]);
    }
    writer.write("weights.tsv", &w.into_bytes())?;
    writer.write_json("report.json", &report)?;
    let config = serde_json::json!({
        "data": data_path,
        "knowledge": r_path,
        "options": options,
    });
    writer.finish("train_on_csv", config, vec![seed], started, true)
}
