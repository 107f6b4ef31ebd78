//! Credibility and predictive-performance metrics.
//!
//! Logarithms are natural throughout.

use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use crate::data::{GroupLayout, KnowledgeVector, WeightVector};
use crate::error::{check_len, Error, Result};
use crate::penalties::PenaltySpec;

/// Floor applied to every entry before normalizing in [`sym_kl`].
pub const DEFAULT_SYMKL_EPSILON: f64 = 1e-8;

const LOG_RATIO_FLOOR: f64 = 1e-12;

fn floored_distribution(v: impl Iterator<Item = f64>, epsilon: f64) -> Vec<f64> {
    let floored: Vec<f64> = v.map(|x| x.abs().max(epsilon)).collect();
    let total: f64 = floored.iter().sum();
    floored.into_iter().map(|x| x / total).collect()
}

fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(&a, &b)| a * (a / b).ln()).sum()
}

/// Symmetric KL divergence `½(KL(p‖q) + KL(q‖p))` between the shapes of two
/// vectors. Both are taken in absolute value, floored at `epsilon` and
/// normalized to sum to one.
pub fn sym_kl(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>, epsilon: f64) -> Result<f64> {
    check_len("symKL operands", a.len(), b.len())?;
    if a.is_empty() {
        return Err(Error::Undefined("symKL of empty vectors".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("symKL epsilon must be positive, got {epsilon}")));
    }
    let p = floored_distribution(a.iter().copied(), epsilon);
    let q = floored_distribution(b.iter().copied(), epsilon);
    // Rounding can leave a tiny negative value for equal shapes.
    Ok((0.5 * (kl(&p, &q) + kl(&q, &p))).max(0.0))
}

/// Per-group structural score. Groups with known members are compared to
/// their slice of `r`; groups without any are compared to the closest one-hot
/// vector, which rewards picking a single representative.
pub fn group_credibility(
    weights: &WeightVector,
    r: &KnowledgeVector,
    groups: &GroupLayout,
    epsilon: f64,
) -> Result<Vec<(usize, f64)>> {
    let d = weights.dim();
    check_len("knowledge vector", d, r.len())?;
    groups.validate(d)?;
    groups
        .ranges()
        .iter()
        .enumerate()
        .map(|(g, range)| {
            let theta = weights.theta.slice(ndarray::s![range.clone()]);
            let rg = r.slice(range.clone());
            let score = if rg.view().iter().any(|&v| v > 0.0) {
                sym_kl(theta, rg.view(), epsilon)?
            } else {
                let mut best = f64::INFINITY;
                let mut one_hot = ndarray::Array1::zeros(range.len());
                for k in 0..range.len() {
                    one_hot[k] = 1.0;
                    best = best.min(sym_kl(one_hot.view(), theta, epsilon)?);
                    one_hot[k] = 0.0;
                }
                best
            };
            Ok((g, score))
        })
        .collect()
}

/// Average precision of ranking features by `abs_weights` (descending, ties
/// by ascending index) against the known features `r_i = 1`.
pub fn average_precision(abs_weights: ArrayView1<'_, f64>, r: &KnowledgeVector) -> Result<f64> {
    check_len("knowledge vector", abs_weights.len(), r.len())?;
    let relevant = r.known_count();
    if relevant == 0 {
        return Err(Error::Undefined("average precision needs at least one known feature".into()));
    }
    let mut order: Vec<usize> = (0..abs_weights.len()).collect();
    order.sort_by(|&i, &j| abs_weights[j].abs().total_cmp(&abs_weights[i].abs()).then(i.cmp(&j)));
    let rv = r.as_slice();
    let mut hits = 0usize;
    let mut total = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        if rv[i] == 1.0 {
            hits += 1;
            total += hits as f64 / (rank + 1) as f64;
        }
    }
    Ok(total / relevant as f64)
}

/// Area under the ROC curve as the Mann–Whitney statistic: the fraction of
/// (positive, negative) pairs ranked correctly, ties counting one half.
pub fn roc_auc(scores: ArrayView1<'_, f64>, labels: ArrayView1<'_, f64>) -> Result<f64> {
    check_len("labels", scores.len(), labels.len())?;
    if labels.iter().any(|&l| l != 0.0 && l != 1.0) {
        return Err(Error::InvalidParameter("AUC labels must be 0 or 1".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l == 1.0).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Undefined("AUC needs both positive and negative labels".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[i].total_cmp(&scores[j]));
    // Sum of midranks of the positives.
    let mut rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let midrank = (start + end + 1) as f64 / 2.0;
        let positives = order[start..end].iter().filter(|&&i| labels[i] == 1.0).count();
        rank_sum += midrank * positives as f64;
        start = end;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Highest score of each entity. Thresholding the maxima is the same as
/// flagging an entity whose score ever exceeds the threshold.
pub fn max_aggregate_scores(per_entity: &[Vec<f64>]) -> Result<Vec<f64>> {
    per_entity
        .iter()
        .enumerate()
        .map(|(i, scores)| {
            scores
                .iter()
                .copied()
                .reduce(f64::max)
                .ok_or_else(|| Error::Undefined(format!("entity {i} has no scores")))
        })
        .collect()
}

/// Hurley–Rickard Gini index of `|θ|`: 0 for equal magnitudes, `1 − 1/d` for
/// a single nonzero. The all-zero vector counts as maximally sparse (1).
pub fn gini_sparsity(theta: ArrayView1<'_, f64>) -> f64 {
    let mut c: Vec<f64> = theta.iter().map(|v| v.abs()).collect();
    let total: f64 = c.iter().sum();
    if total == 0.0 {
        return 1.0;
    }
    c.sort_by(f64::total_cmp);
    let d = c.len() as f64;
    let weighted: f64 = c
        .iter()
        .enumerate()
        .map(|(k, &ck)| (ck / total) * ((d - (k + 1) as f64 + 0.5) / d))
        .sum();
    1.0 - 2.0 * weighted
}

/// `log(|θ_known| / |θ_unknown|)` for a two-feature model with exactly one
/// known feature. Both magnitudes are floored at `1e-12`.
pub fn log_weight_ratio(weights: &WeightVector, r: &KnowledgeVector) -> Result<f64> {
    check_len("knowledge vector", weights.dim(), r.len())?;
    let rv = r.as_slice();
    let known = match rv {
        [1.0, 0.0] => 0,
        [0.0, 1.0] => 1,
        _ => {
            return Err(Error::InvalidParameter(
                "log weight ratio needs two features with exactly one known".into(),
            ))
        }
    };
    let t = &weights.theta;
    let k = t[known].abs().max(LOG_RATIO_FLOOR);
    let u = t[1 - known].abs().max(LOG_RATIO_FLOOR);
    Ok((k / u).ln())
}

/// Which model a report describes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelProvenance {
    pub penalty: PenaltySpec,
    pub lambda: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CredibilityReport {
    pub per_group_symkl: Vec<(usize, f64)>,
    pub symkl_sum: f64,
    /// `None` when no feature is known.
    pub average_precision: Option<f64>,
    pub auc: f64,
    pub gini: f64,
    pub model: ModelProvenance,
}

impl CredibilityReport {
    /// Scores `weights` against `r` and `groups`, with `auc` measured
    /// elsewhere (typically on the test split).
    pub fn evaluate(
        weights: &WeightVector,
        r: &KnowledgeVector,
        groups: &GroupLayout,
        epsilon: f64,
        auc: f64,
        model: ModelProvenance,
    ) -> Result<Self> {
        let per_group_symkl = group_credibility(weights, r, groups, epsilon)?;
        let symkl_sum = per_group_symkl.iter().map(|(_, v)| v).sum();
        let average_precision = if r.known_count() > 0 {
            Some(average_precision(weights.theta.view(), r)?)
        } else {
            None
        };
        Ok(Self {
            per_group_symkl,
            symkl_sum,
            average_precision,
            auc,
            gini: gini_sparsity(weights.theta.view()),
            model,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn symkl_rejects_bad_input() {
        assert!(sym_kl(array![1.0].view(), array![1.0, 2.0].view(), 1e-8).is_err());
        assert!(sym_kl(array![1.0].view(), array![1.0].view(), 0.0).is_err());
        assert!(sym_kl(ndarray::Array1::zeros(0).view(), ndarray::Array1::zeros(0).view(), 1e-8).is_err());
    }

    #[test]
    fn symkl_of_two_zero_vectors_is_zero() {
        let z = array![0.0, 0.0, 0.0];
        assert_eq!(sym_kl(z.view(), z.view(), 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn log_ratio_shape_checks() {
        let w = WeightVector::from_theta(array![1.0, 2.0]);
        assert!(log_weight_ratio(&w, &KnowledgeVector::ones(2)).is_err());
        let w3 = WeightVector::from_theta(array![1.0, 2.0, 3.0]);
        assert!(log_weight_ratio(&w3, &KnowledgeVector::from_mask(&[true, false, false])).is_err());
        let flipped = log_weight_ratio(&w, &KnowledgeVector::from_mask(&[false, true])).unwrap();
        assert!((flipped - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn auc_rejects_non_binary_labels() {
        assert!(roc_auc(array![0.1, 0.2].view(), array![0.0, 2.0].view()).is_err());
    }

    #[test]
    fn report_sums_groups() {
        let w = WeightVector::from_theta(array![1.0, 0.0, 0.3, 0.3]);
        let r = KnowledgeVector::from_mask(&[true, false, false, false]);
        let groups = GroupLayout::from_sizes(&[2, 2]);
        let model = ModelProvenance {
            penalty: PenaltySpec::Eye,
            lambda: 0.1,
            seed: 0,
        };
        let rep = CredibilityReport::evaluate(&w, &r, &groups, 1e-8, 0.7, model).unwrap();
        let total: f64 = rep.per_group_symkl.iter().map(|(_, v)| v).sum();
        assert!((rep.symkl_sum - total).abs() < 1e-12);
        assert_eq!(rep.average_precision, Some(1.0));
        let none = CredibilityReport::evaluate(&w, &KnowledgeVector::zeros(4), &groups, 1e-8, 0.7, rep.model.clone()).unwrap();
        assert_eq!(none.average_precision, None);
    }
}
