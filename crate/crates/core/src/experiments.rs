//! End-to-end benchmark runs on the synthetic generators.
//!
//! Each run generates data from a seed, splits it 60/20/20, standardizes with
//! training statistics, then pushes every penalty family through
//! [`train_grid`], [`bootstrap_filter`] and [`select_sparsest`]. The selected
//! model is scored on the test split.

use serde::{Deserialize, Serialize};

use crate::data::{DataSplits, GroupLayout, KnowledgeVector, SplitIndices, WeightVector};
use crate::error::Result;
use crate::metrics::{log_weight_ratio, roc_auc, CredibilityReport, ModelProvenance, DEFAULT_SYMKL_EPSILON};
use crate::optimizer::{adadelta_fit, predict_scores, LossKind, ObjectiveSpec, TrainConfig};
use crate::oracle::{perfect_correlation_audit, StructureAuditReport};
use crate::penalties::PenaltySpec;
use crate::selection::{bootstrap_filter, select_sparsest, train_grid, FailedCandidate, GridSpec, PenaltyFamily};
use crate::synthetic::{
    gen_correlation_sweep, gen_expert_mistake_process, gen_known_fraction_sweep, gen_two_feature_perfect, GroupSpec,
    SyntheticDataset,
};

/// Relative tolerance of the perfect-correlation structure audit.
pub const STRUCTURE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    pub train: TrainConfig,
    /// Significance level of the bootstrap filter.
    pub alpha: f64,
    pub symkl_epsilon: f64,
    pub families: Vec<PenaltyFamily>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::desk_scale(),
            train: TrainConfig::default(),
            alpha: 0.05,
            symkl_epsilon: DEFAULT_SYMKL_EPSILON,
            families: PenaltyFamily::BENCHMARK.to_vec(),
        }
    }
}

/// The model a family ends up with after filtering and selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub family: PenaltyFamily,
    pub spec: PenaltySpec,
    pub lambda: f64,
    pub weights: WeightVector,
    pub report: CredibilityReport,
    pub test_auc: f64,
    pub candidates: usize,
    pub retained: usize,
    pub failures: Vec<FailedCandidate>,
}

/// Runs the selection pipeline for one family on prepared splits.
pub fn run_pipeline(
    family: PenaltyFamily,
    splits: &DataSplits,
    r: &KnowledgeVector,
    layout: &GroupLayout,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<MethodOutcome> {
    let outcome = train_grid(family, &config.grid, splits, r, &config.train, seed)?;
    let retained = bootstrap_filter(&outcome.candidates, config.alpha)?;
    let chosen = select_sparsest(&retained)?;
    let scores = predict_scores(LossKind::Logistic, &chosen.fit.weights, &splits.test.x)?;
    let test_auc = roc_auc(scores.view(), splits.test.y.view())?;
    let model = ModelProvenance {
        penalty: chosen.spec.clone(),
        lambda: chosen.lambda,
        seed,
    };
    let report = CredibilityReport::evaluate(&chosen.fit.weights, r, layout, config.symkl_epsilon, test_auc, model)?;
    Ok(MethodOutcome {
        family,
        spec: chosen.spec.clone(),
        lambda: chosen.lambda,
        weights: chosen.fit.weights.clone(),
        report,
        test_auc,
        candidates: outcome.candidates.len(),
        retained: retained.len(),
        failures: outcome.failures,
    })
}

/// All methods on one generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub groups: Vec<GroupSpec>,
    pub methods: Vec<MethodOutcome>,
    /// Structure audit of the selected EYE model, for perfectly correlated designs.
    pub eye_structure: Option<Vec<StructureAuditReport>>,
}

impl SeedOutcome {
    pub fn method(&self, family: PenaltyFamily) -> Option<&MethodOutcome> {
        self.methods.iter().find(|m| m.family == family)
    }
}

fn run_all(data: &SyntheticDataset, seed: u64, config: &ExperimentConfig) -> Result<SeedOutcome> {
    let idx = SplitIndices::shuffled(data.dataset.n_rows(), seed)?;
    let splits = DataSplits::standardized(&data.dataset, &idx);
    let layout = data.layout();
    let methods = config
        .families
        .iter()
        .map(|&f| run_pipeline(f, &splits, &data.r, &layout, config, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(SeedOutcome {
        seed,
        groups: data.groups.iter().map(|(g, _)| *g).collect(),
        methods,
        eye_structure: None,
    })
}

/// Random groups and expert indicators that may flag irrelevant groups.
pub fn expert_mistake(seed: u64, config: &ExperimentConfig) -> Result<SeedOutcome> {
    run_all(&gen_expert_mistake_process(seed), seed, config)
}

/// Ten groups with correlation rising from 0 to 0.9.
pub fn correlation_sweep(seed: u64, config: &ExperimentConfig) -> Result<SeedOutcome> {
    run_all(&gen_correlation_sweep(seed), seed, config)
}

/// Eleven duplicated-column groups with 0 to 10 known members. The selected
/// EYE model is also run through the structure audit.
pub fn known_fraction(seed: u64, config: &ExperimentConfig) -> Result<SeedOutcome> {
    let data = gen_known_fraction_sweep(seed);
    let mut out = run_all(&data, seed, config)?;
    if let Some(eye) = out.method(PenaltyFamily::Eye) {
        out.eye_structure = Some(perfect_correlation_audit(&eye.weights, &data.r, &data.layout(), STRUCTURE_TOL)?);
    }
    Ok(out)
}

/// One cell of the two-feature log-ratio grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRatioCell {
    pub penalty: PenaltySpec,
    pub lambda: f64,
    pub theta: [f64; 2],
    pub log_ratio: f64,
    /// At least one weight is nonzero.
    pub nontrivial: bool,
}

/// Trains EYE and the naïve penalty for every `β` over `lambdas` on the
/// two-feature data, recording `log|θ_known / θ_unknown|`.
pub fn two_feature_grid(seed: u64, lambdas: &[f64], betas: &[f64], train: &TrainConfig) -> Result<Vec<LogRatioCell>> {
    let data = gen_two_feature_perfect(seed);
    let idx = SplitIndices::shuffled(data.dataset.n_rows(), seed)?;
    let splits = DataSplits::standardized(&data.dataset, &idx);
    let mut specs = vec![PenaltySpec::Eye];
    specs.extend(betas.iter().map(|&beta| PenaltySpec::NaiveQ { beta }));
    let mut cells = Vec::with_capacity(specs.len() * lambdas.len());
    for spec in specs {
        for &lambda in lambdas {
            let objective = ObjectiveSpec::new(LossKind::Logistic, spec.clone(), data.r.clone(), lambda);
            let fit = adadelta_fit(&objective, &splits.train, train)?;
            let t = &fit.weights.theta;
            cells.push(LogRatioCell {
                penalty: spec.clone(),
                lambda,
                theta: [t[0], t[1]],
                log_ratio: log_weight_ratio(&fit.weights, &data.r)?,
                nontrivial: t.iter().any(|&v| v != 0.0),
            });
        }
    }
    Ok(cells)
}

/// Mean and sample standard deviation across seeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

/// One row of the across-seed summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub family: PenaltyFamily,
    pub symkl_sum: MeanStd,
    pub auc: MeanStd,
}

/// Per-method mean ± stdev of the summed symKL and of the test AUC.
pub fn summarize(outcomes: &[SeedOutcome]) -> Vec<MethodSummary> {
    let Some(first) = outcomes.first() else {
        return Vec::new();
    };
    first
        .methods
        .iter()
        .map(|m| {
            let pick = |f: fn(&MethodOutcome) -> f64| -> Vec<f64> {
                outcomes.iter().filter_map(|o| o.method(m.family)).map(f).collect()
            };
            MethodSummary {
                family: m.family,
                symkl_sum: MeanStd::of(&pick(|m| m.report.symkl_sum)),
                auc: MeanStd::of(&pick(|m| m.test_auc)),
            }
        })
        .collect()
}

/// Per-group symKL averaged over seeds: `[method][group]`. All outcomes must
/// share the same group layout.
pub fn mean_group_symkl(outcomes: &[SeedOutcome]) -> Vec<(PenaltyFamily, Vec<f64>)> {
    let Some(first) = outcomes.first() else {
        return Vec::new();
    };
    first
        .methods
        .iter()
        .map(|m| {
            let groups = m.report.per_group_symkl.len();
            let mut sums = vec![0.0; groups];
            let mut count = 0.0;
            for o in outcomes {
                if let Some(mo) = o.method(m.family) {
                    for (g, v) in &mo.report.per_group_symkl {
                        sums[*g] += v;
                    }
                    count += 1.0;
                }
            }
            (m.family, sums.into_iter().map(|s| s / count).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std() {
        let s = MeanStd::of(&[1.0, 2.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.std - 1.0).abs() < 1e-15);
        assert_eq!(MeanStd::of(&[4.0]).std, 0.0);
    }
}
