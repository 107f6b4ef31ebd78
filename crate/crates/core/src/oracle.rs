//! Independent closed-form checks for trained EYE models.
//!
//! Nothing here trains anything. These functions take a fitted weight vector
//! (or the least-squares solution of an orthonormal design) and compare it
//! against what the theory says an exact optimum must look like.

use ndarray::{Array1, Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, GroupLayout, KnowledgeVector, WeightVector};
use crate::error::{check_finite, check_len, Error, Result};
use crate::penalties::{eye_decompose, eye_dual_norm};

const DAMPING: f64 = 0.5;
const MAX_ITERATIONS: usize = 10_000;

/// Solution of the orthonormal-design shrinkage equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub theta: Array1<f64>,
    /// The solution is the origin, where `Z = 0` and the map is undefined.
    pub degenerate: bool,
    pub iterations: usize,
    pub residual: f64,
}

/// One step of the shrinkage map for `XᵀX = I`:
/// `θ_i ← θᴼᴸˢ_i / (1 + nλ r_i² / Z) · max(0, 1 − nλ (1−r_i)(1 + a/Z) / |θᴼᴸˢ_i|)`.
///
/// Returns `None` when `Z = 0`.
pub fn orthonormal_map(
    theta: &Array1<f64>,
    theta_ols: &Array1<f64>,
    r: &KnowledgeVector,
    n_lambda: f64,
) -> Result<Option<Array1<f64>>> {
    let dec = eye_decompose(theta.view(), r)?;
    if dec.z == 0.0 {
        return Ok(None);
    }
    let unknown_pull = 1.0 + dec.l1_unknown / dec.z;
    let next = theta_ols
        .iter()
        .zip(r.view())
        .map(|(&ols, &ri)| {
            if ols == 0.0 {
                return 0.0;
            }
            let keep = (1.0 - n_lambda * (1.0 - ri) * unknown_pull / ols.abs()).max(0.0);
            ols / (1.0 + n_lambda * ri * ri / dec.z) * keep
        })
        .collect();
    Ok(Some(next))
}

/// Solves the EYE least-squares problem for an orthonormal design, given the
/// unpenalized solution `θᴼᴸˢ = Xᵀy`, by damped fixed-point iteration started
/// at `θᴼᴸˢ`.
///
/// When the dual norm of `θᴼᴸˢ` is at most `nλ` the origin is optimal and is
/// returned with `degenerate` set.
pub fn orthonormal_fixed_point(
    theta_ols: &Array1<f64>,
    r: &KnowledgeVector,
    n_lambda: f64,
    tol: f64,
) -> Result<FixedPoint> {
    check_len("knowledge vector", theta_ols.len(), r.len())?;
    check_finite("least-squares solution", theta_ols.iter())?;
    if !(n_lambda >= 0.0 && n_lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("nλ must be finite and ≥ 0, got {n_lambda}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let origin = |iterations| FixedPoint {
        theta: Array1::zeros(theta_ols.len()),
        degenerate: true,
        iterations,
        residual: 0.0,
    };
    if n_lambda == 0.0 {
        return Ok(FixedPoint {
            theta: theta_ols.clone(),
            degenerate: false,
            iterations: 0,
            residual: 0.0,
        });
    }
    if eye_dual_norm(theta_ols.view(), r)? <= n_lambda {
        return Ok(origin(0));
    }

    let mut theta = theta_ols.clone();
    let mut residual = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        let Some(mapped) = orthonormal_map(&theta, theta_ols, r, n_lambda)? else {
            return Ok(origin(it));
        };
        residual = inf_dist(&mapped, &theta);
        if residual < tol {
            return Ok(FixedPoint {
                theta: mapped,
                degenerate: false,
                iterations: it,
                residual,
            });
        }
        theta = &theta * DAMPING + &mapped * (1.0 - DAMPING);
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

fn inf_dist(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// An `n × d` matrix with orthonormal columns (`XᵀX = I`), from modified
/// Gram–Schmidt on Gaussian draws.
pub fn random_orthonormal_design(n: usize, d: usize, seed: u64) -> Result<Array2<f64>> {
    if d == 0 || n < d {
        return Err(Error::InvalidParameter(format!(
            "orthonormal design needs 0 < d ≤ n, got n = {n}, d = {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Array2<f64> = Array2::from_shape_fn((n, d), |_| StandardNormal.sample(&mut rng));
    for j in 0..d {
        for k in 0..j {
            let proj: f64 = x.column(j).dot(&x.column(k));
            let basis = x.column(k).to_owned();
            x.column_mut(j).scaled_add(-proj, &basis);
        }
        let norm = x.column(j).dot(&x.column(j)).sqrt();
        x.column_mut(j).mapv_inplace(|v| v / norm);
    }
    Ok(x)
}

/// Grouping-effect check for one pair of same-signed coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupingBoundReport {
    pub pair: (usize, usize),
    /// `|r_i²θ̂_i − r_j²θ̂_j| / Z`
    pub lhs: f64,
    pub rhs: f64,
    /// Sample correlation of the two columns.
    pub rho: f64,
    pub holds: bool,
    /// `(|θ̂_i − θ̂_j| / Z, bound)` when `r_i = r_j ≠ 0`.
    pub corollary: Option<(f64, f64)>,
    pub corollary_holds: Option<bool>,
}

const BOUND_SLACK: f64 = 1e-9;

/// Checks the grouping bound on every pair `i < j` with `θ̂_iθ̂_j > 0`.
///
/// `weights` must be an intercept-free optimum of the EYE least-squares
/// objective `½‖y − Xθ‖² + nλ·eye(θ)` on standardized columns. The bound is
/// `|r_i²θ̂_i − r_j²θ̂_j| / Z ≤ ‖x_i − x_j‖‖y‖ / (nλ) + |r_i − r_j|(1 + a/Z)`,
/// with `‖x_i − x_j‖ = √(2n(1−ρ))` for unit-variance columns.
pub fn grouping_bound_audit(
    weights: &WeightVector,
    r: &KnowledgeVector,
    data: &Dataset,
    n_lambda: f64,
) -> Result<Vec<GroupingBoundReport>> {
    let d = data.n_features();
    check_len("weights", d, weights.dim())?;
    check_len("knowledge vector", d, r.len())?;
    if !(n_lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("nλ must be positive, got {n_lambda}")));
    }
    check_standardized(&data.x)?;
    let n = data.n_rows() as f64;
    let theta = &weights.theta;
    let dec = eye_decompose(theta.view(), r)?;
    let y_norm = data.y.dot(&data.y).sqrt();
    let rv = r.as_slice();
    let mut reports = Vec::new();
    if dec.z == 0.0 {
        return Ok(reports);
    }
    let unknown_pull = 1.0 + dec.l1_unknown / dec.z;
    for i in 0..d {
        for j in i + 1..d {
            if theta[i] * theta[j] <= 0.0 {
                continue;
            }
            let rho = (data.x.column(i).dot(&data.x.column(j)) / n).clamp(-1.0, 1.0);
            // Equal to √(2n(1−ρ)) for standardized columns, but exact for twins.
            let gap = data
                .x
                .column(i)
                .iter()
                .zip(data.x.column(j))
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            let spread = gap * y_norm / n_lambda;
            let lhs = (rv[i] * rv[i] * theta[i] - rv[j] * rv[j] * theta[j]).abs() / dec.z;
            let rhs = spread + (rv[i] - rv[j]).abs() * unknown_pull;
            let corollary = (rv[i] == rv[j] && rv[i] != 0.0)
                .then(|| ((theta[i] - theta[j]).abs() / dec.z, spread / (rv[i] * rv[i])));
            reports.push(GroupingBoundReport {
                pair: (i, j),
                lhs,
                rhs,
                rho,
                holds: lhs <= rhs + BOUND_SLACK,
                corollary,
                corollary_holds: corollary.map(|(l, b)| l <= b + BOUND_SLACK),
            });
        }
    }
    Ok(reports)
}

fn check_standardized(x: &Array2<f64>) -> Result<()> {
    let n = x.nrows() as f64;
    for (column, col) in x.axis_iter(Axis(1)).enumerate() {
        let mean = col.sum() / n;
        let variance = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        if mean.abs() > 1e-6 || (variance - 1.0).abs() > 1e-6 {
            return Err(Error::NotStandardized {
                column,
                mean,
                variance,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StructureCase {
    KnownVsUnknown,
    AllKnown,
    AllUnknown,
}

/// Structure of one perfectly correlated group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureAuditReport {
    pub group_id: usize,
    pub max_unknown_abs: f64,
    /// Largest pairwise gap between known weights over the group's largest
    /// magnitude.
    pub known_spread: f64,
    pub case: StructureCase,
    pub passes: bool,
}

/// Checks that within each perfectly correlated group the unknown members are
/// zeroed out whenever a known member exists, and that known members share a
/// common weight. Groups without known members carry no assertion.
///
/// `r` must be binary. An all-zero `θ̂` passes trivially.
pub fn perfect_correlation_audit(
    weights: &WeightVector,
    r: &KnowledgeVector,
    groups: &GroupLayout,
    tol: f64,
) -> Result<Vec<StructureAuditReport>> {
    let d = weights.dim();
    check_len("knowledge vector", d, r.len())?;
    groups.validate(d)?;
    if !r.is_binary() {
        return Err(Error::InvalidParameter("structure audit needs a binary knowledge vector".into()));
    }
    let theta = &weights.theta;
    let global_max = theta.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let rv = r.as_slice();
    let reports = groups
        .ranges()
        .iter()
        .enumerate()
        .map(|(group_id, range)| {
            let known: Vec<f64> = range.clone().filter(|&i| rv[i] == 1.0).map(|i| theta[i]).collect();
            let unknown_count = range.len() - known.len();
            let max_unknown_abs = range
                .clone()
                .filter(|&i| rv[i] == 0.0)
                .fold(0.0_f64, |m, i| m.max(theta[i].abs()));
            let group_max = range.clone().fold(0.0_f64, |m, i| m.max(theta[i].abs()));
            let known_spread = if known.is_empty() || group_max == 0.0 {
                0.0
            } else {
                let hi = known.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lo = known.iter().copied().fold(f64::INFINITY, f64::min);
                (hi - lo) / group_max
            };
            let case = match (known.is_empty(), unknown_count == 0) {
                (true, _) => StructureCase::AllUnknown,
                (false, true) => StructureCase::AllKnown,
                (false, false) => StructureCase::KnownVsUnknown,
            };
            let passes = match case {
                StructureCase::AllUnknown => true,
                StructureCase::AllKnown => known_spread <= tol,
                StructureCase::KnownVsUnknown => {
                    max_unknown_abs <= tol * global_max && known_spread <= tol
                }
            };
            StructureAuditReport {
                group_id,
                max_unknown_abs,
                known_spread,
                case,
                passes,
            }
        })
        .collect();
    Ok(reports)
}
