//! Hyperparameter grids, paired bootstrap filtering and sparsest-model choice.
//!
//! The pipeline for one penalty family is: train every grid point, score
//! each fit on the same bootstrap resamples of the validation split, drop the
//! candidates that are significantly worse than the best one, and keep the
//! sparsest survivor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use ndarray::Array1;

use crate::data::{DataSplits, KnowledgeVector, WeightVector};
use crate::error::{Error, Result};
use crate::metrics::{gini_sparsity, roc_auc};
use crate::optimizer::{adadelta_fit_from, predict_scores, FitResult, LossKind, ObjectiveSpec, TrainConfig};
use crate::penalties::PenaltySpec;

/// Validation resamples per candidate.
pub const BOOTSTRAP_REPLICATES: usize = 100;

/// How OWL weights are laid out over sorted magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OwlScheme {
    /// Only the largest magnitude is penalized, which is the l∞ norm.
    LInfinity,
    /// The `m` largest magnitudes weigh twice the rest, `m` being the number
    /// of known features.
    TopKnownDouble,
}

impl OwlScheme {
    pub fn weights(self, r: &KnowledgeVector) -> Vec<f64> {
        let d = r.len();
        match self {
            OwlScheme::LInfinity => (0..d).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect(),
            OwlScheme::TopKnownDouble => {
                let m = r.known_count();
                (0..d).map(|i| if i < m { 2.0 } else { 1.0 }).collect()
            }
        }
    }
}

/// Penalty families that a grid sweeps over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyFamily {
    Eye,
    NaiveQ,
    Lasso,
    Ridge,
    ElasticNet,
    Owl,
    WeightedLasso,
    WeightedRidge,
}

impl PenaltyFamily {
    pub const ALL: [PenaltyFamily; 8] = [
        PenaltyFamily::Eye,
        PenaltyFamily::NaiveQ,
        PenaltyFamily::Lasso,
        PenaltyFamily::Ridge,
        PenaltyFamily::ElasticNet,
        PenaltyFamily::Owl,
        PenaltyFamily::WeightedLasso,
        PenaltyFamily::WeightedRidge,
    ];

    /// The methods compared in the benchmark tables.
    pub const BENCHMARK: [PenaltyFamily; 6] = [
        PenaltyFamily::Eye,
        PenaltyFamily::WeightedLasso,
        PenaltyFamily::WeightedRidge,
        PenaltyFamily::Lasso,
        PenaltyFamily::ElasticNet,
        PenaltyFamily::Owl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PenaltyFamily::Eye => "eye",
            PenaltyFamily::NaiveQ => "naive_q",
            PenaltyFamily::Lasso => "lasso",
            PenaltyFamily::Ridge => "ridge",
            PenaltyFamily::ElasticNet => "elastic_net",
            PenaltyFamily::Owl => "owl",
            PenaltyFamily::WeightedLasso => "weighted_lasso",
            PenaltyFamily::WeightedRidge => "weighted_ridge",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Every non-λ hyperparameter setting of this family on `grid`.
    pub fn specs(self, grid: &GridSpec, r: &KnowledgeVector) -> Vec<PenaltySpec> {
        let weighted = |m: f64| -> Vec<f64> { r.view().iter().map(|&ri| ri + (1.0 - ri) * m).collect() };
        match self {
            PenaltyFamily::Eye => vec![PenaltySpec::Eye],
            PenaltyFamily::Lasso => vec![PenaltySpec::Lasso],
            PenaltyFamily::Ridge => vec![PenaltySpec::Ridge],
            PenaltyFamily::NaiveQ => grid
                .betas
                .iter()
                .filter(|&&b| b > 0.0 && b < 1.0)
                .map(|&beta| PenaltySpec::NaiveQ { beta })
                .collect(),
            PenaltyFamily::ElasticNet => grid.betas.iter().map(|&beta| PenaltySpec::ElasticNet { beta }).collect(),
            PenaltyFamily::Owl => grid
                .owl_schemes
                .iter()
                .map(|s| PenaltySpec::Owl { weights: s.weights(r) })
                .collect(),
            PenaltyFamily::WeightedLasso => grid
                .weight_multipliers
                .iter()
                .map(|&m| PenaltySpec::WeightedLasso { weights: weighted(m) })
                .collect(),
            PenaltyFamily::WeightedRidge => grid
                .weight_multipliers
                .iter()
                .map(|&m| PenaltySpec::WeightedRidge { weights: weighted(m) })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Ascending, positive.
    pub lambdas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Penalty weight of unknown features relative to known ones.
    pub weight_multipliers: Vec<f64>,
    pub owl_schemes: Vec<OwlScheme>,
}

/// `count` log-spaced values from `10^lo` to `10^hi`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![10f64.powf(lo)],
        _ => (0..count)
            .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (count - 1) as f64))
            .collect(),
    }
}

impl GridSpec {
    /// 13 λ values from 1e-6 to 1, sized for synthetic benchmarks.
    pub fn desk_scale() -> Self {
        Self {
            lambdas: log_spaced(-6.0, 0.0, 13),
            betas: vec![0.25, 0.5, 0.75],
            weight_multipliers: vec![1.0, 2.0, 3.0],
            owl_schemes: vec![OwlScheme::LInfinity, OwlScheme::TopKnownDouble],
        }
    }

    /// 21 λ values from 1e-10 to 1e10 for data of unknown scale.
    pub fn wide() -> Self {
        Self {
            lambdas: log_spaced(-10.0, 10.0, 21),
            ..Self::desk_scale()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.lambdas.is_empty() {
            return bad("lambda grid is empty");
        }
        if self.lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return bad("lambda grid values must be positive and finite");
        }
        if self.lambdas.windows(2).any(|w| w[1] < w[0]) {
            return bad("lambda grid must be sorted ascending");
        }
        if self.betas.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return bad("beta values must lie in [0, 1]");
        }
        if self.weight_multipliers.iter().any(|m| !(1.0..=3.0).contains(m)) {
            return bad("weight multipliers must lie in [1, 3]");
        }
        Ok(())
    }
}

/// One trained grid point with its validation bootstrap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateModel {
    pub spec: PenaltySpec,
    pub lambda: f64,
    /// Position in the grid, used to break ties deterministically.
    pub grid_index: usize,
    pub fit: FitResult,
    pub val_auc_bootstrap: Vec<f64>,
    pub gini: f64,
}

impl CandidateModel {
    pub fn mean_val_auc(&self) -> f64 {
        self.val_auc_bootstrap.iter().sum::<f64>() / self.val_auc_bootstrap.len() as f64
    }
}

/// A grid point whose training failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedCandidate {
    pub spec: PenaltySpec,
    pub lambda: f64,
    pub grid_index: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridOutcome {
    pub candidates: Vec<CandidateModel>,
    pub failures: Vec<FailedCandidate>,
}

/// Row resamples shared by every candidate, so bootstrap AUCs are paired.
/// Replicate `b` draws from a generator seeded with `base_seed + b`; a draw
/// holding a single class is redrawn from the same generator.
pub fn bootstrap_resamples(labels: &[f64], base_seed: u64, replicates: usize) -> Result<Vec<Vec<usize>>> {
    let n = labels.len();
    let positives = labels.iter().filter(|&&l| l == 1.0).count();
    if positives == 0 || positives == n {
        return Err(Error::Undefined("validation split needs both classes for AUC".into()));
    }
    Ok((0..replicates as u64)
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(b));
            loop {
                let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                let pos = idx.iter().filter(|&&i| labels[i] == 1.0).count();
                if pos > 0 && pos < n {
                    return idx;
                }
            }
        })
        .collect())
}

/// Trains one candidate per (hyperparameter setting, λ) of `family` and
/// scores each on the shared validation resamples. Failed fits are reported
/// separately instead of aborting the grid.
///
/// For each hyperparameter setting the λ values are visited from largest to
/// smallest, each fit starting from the previous solution.
pub fn train_grid(
    family: PenaltyFamily,
    grid: &GridSpec,
    splits: &DataSplits,
    r: &KnowledgeVector,
    config: &TrainConfig,
    bootstrap_seed: u64,
) -> Result<GridOutcome> {
    grid.validate()?;
    let resamples = bootstrap_resamples(&splits.validation.y.to_vec(), bootstrap_seed, BOOTSTRAP_REPLICATES)?;
    let specs = family.specs(grid, r);
    let n_lambda = grid.lambdas.len();
    let paths: Vec<Vec<std::result::Result<CandidateModel, FailedCandidate>>> = specs
        .into_par_iter()
        .enumerate()
        .map(|(s, spec)| {
            let mut path = Vec::with_capacity(n_lambda);
            let mut start = WeightVector::zeros(splits.train.n_features());
            for (k, &lambda) in grid.lambdas.iter().enumerate().rev() {
                let grid_index = s * n_lambda + k;
                let candidate = train_candidate(&spec, lambda, grid_index, &start, splits, r, config, &resamples);
                if let Ok(c) = &candidate {
                    start = c.fit.weights.clone();
                }
                path.push(candidate);
            }
            path.reverse();
            path
        })
        .collect();
    let results = paths.into_iter().flatten();

    let mut outcome = GridOutcome {
        candidates: Vec::new(),
        failures: Vec::new(),
    };
    for r in results {
        match r {
            Ok(c) => outcome.candidates.push(c),
            Err(f) => outcome.failures.push(f),
        }
    }
    Ok(outcome)
}

#[allow(clippy::too_many_arguments)]
fn train_candidate(
    spec: &PenaltySpec,
    lambda: f64,
    grid_index: usize,
    start: &WeightVector,
    splits: &DataSplits,
    r: &KnowledgeVector,
    config: &TrainConfig,
    resamples: &[Vec<usize>],
) -> std::result::Result<CandidateModel, FailedCandidate> {
    let fail = |e: Error| FailedCandidate {
        spec: spec.clone(),
        lambda,
        grid_index,
        error: e.to_string(),
    };
    let objective = ObjectiveSpec::new(LossKind::Logistic, spec.clone(), r.clone(), lambda);
    let fit = adadelta_fit_from(&objective, &splits.train, config, start).map_err(fail)?;
    let scores = predict_scores(LossKind::Logistic, &fit.weights, &splits.validation.x).map_err(fail)?;
    let labels = &splits.validation.y;
    let val_auc_bootstrap = resamples
        .iter()
        .map(|idx| {
            let s: Array1<f64> = idx.iter().map(|&i| scores[i]).collect();
            let y: Array1<f64> = idx.iter().map(|&i| labels[i]).collect();
            roc_auc(s.view(), y.view())
        })
        .collect::<Result<Vec<f64>>>()
        .map_err(fail)?;
    Ok(CandidateModel {
        gini: gini_sparsity(fit.weights.theta.view()),
        spec: spec.clone(),
        lambda,
        grid_index,
        fit,
        val_auc_bootstrap,
    })
}

/// Index of the candidate with the highest mean bootstrap AUC (first on ties).
pub fn best_index(candidates: &[CandidateModel]) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidates to compare".into()));
    }
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate().skip(1) {
        if c.mean_val_auc() > candidates[best].mean_val_auc() {
            best = i;
        }
    }
    Ok(best)
}

/// Drops candidates significantly worse than the best one: `c` survives iff
/// the best candidate beats it in at most a `1 − alpha` fraction of the
/// paired replicates.
pub fn bootstrap_filter(candidates: &[CandidateModel], alpha: f64) -> Result<Vec<CandidateModel>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let best = &candidates[best_index(candidates)?];
    let b = best.val_auc_bootstrap.len();
    if candidates.iter().any(|c| c.val_auc_bootstrap.len() != b) {
        return Err(Error::InvalidParameter("candidates must share the bootstrap replicates".into()));
    }
    Ok(candidates
        .iter()
        .filter(|c| {
            let wins = best
                .val_auc_bootstrap
                .iter()
                .zip(&c.val_auc_bootstrap)
                .filter(|(bst, other)| *bst - *other > 0.0)
                .count();
            wins as f64 / b as f64 <= 1.0 - alpha
        })
        .cloned()
        .collect())
}

/// The candidate with the largest Gini sparsity; ties go to the larger λ,
/// then to the earlier grid position.
pub fn select_sparsest(filtered: &[CandidateModel]) -> Result<&CandidateModel> {
    filtered
        .iter()
        .reduce(|best, c| {
            let better = c
                .gini
                .total_cmp(&best.gini)
                .then(c.lambda.total_cmp(&best.lambda))
                .then(best.grid_index.cmp(&c.grid_index));
            if better.is_gt() {
                c
            } else {
                best
            }
        })
        .ok_or_else(|| Error::InvalidParameter("no candidates to select from".into()))
}
