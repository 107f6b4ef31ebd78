//! Penalized linear model training by full-batch subgradient descent with
//! ADADELTA step sizes.
//!
//! The objective is `L(θ, b) + n·λ·J(θ)` where `L` is a summed loss over the
//! `n` training rows and `J` is one of the penalties in [`crate::penalties`].
//! Internally everything is divided by `n`, which leaves the minimizer
//! unchanged and keeps gradient magnitudes independent of the row count.
//!
//! Plain subgradient steps never land on zero, so the descent direction is
//! refined in three places where the objective is not differentiable:
//!
//! * a coordinate at zero whose penalty has a kink there stays put unless the
//!   loss gradient exceeds the kink (minimum-norm subgradient);
//! * a step that would carry such a coordinate across zero stops at zero;
//! * whenever the origin is optimal for the current intercept, `θ` is set to 0.

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, KnowledgeVector, WeightVector};
use crate::error::{check_len, Error, Result};
use crate::penalties::PenaltySpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// Bernoulli negative log-likelihood of `sigmoid(θᵀx + b)`.
    Logistic,
    /// `½‖y − Xθ − b‖₂²`
    LeastSquares,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub loss: LossKind,
    pub penalty: PenaltySpec,
    pub knowledge: KnowledgeVector,
    /// Regularization strength; the penalty is multiplied by `n·lambda`.
    pub lambda: f64,
}

impl ObjectiveSpec {
    pub fn new(loss: LossKind, penalty: PenaltySpec, knowledge: KnowledgeVector, lambda: f64) -> Self {
        Self {
            loss,
            penalty,
            knowledge,
            lambda,
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and nonnegative, got {}",
                self.lambda
            )));
        }
        check_len("objective knowledge vector", d, self.knowledge.len())?;
        self.penalty.validate(d)
    }

    /// `L(θ, b) + n·λ·J(θ)` on `data`.
    pub fn evaluate(&self, weights: &WeightVector, data: &Dataset) -> Result<f64> {
        let lg = loss_and_gradient(self.loss, weights, data)?;
        let penalty = self.penalty.value(weights.theta.view(), &self.knowledge)?;
        Ok(lg.value + data.n_rows() as f64 * self.lambda * penalty)
    }

    /// A subgradient of the full objective (sign convention `sgn(0) = 0`).
    pub fn subgradient(&self, weights: &WeightVector, data: &Dataset) -> Result<(Array1<f64>, f64)> {
        let lg = loss_and_gradient(self.loss, weights, data)?;
        let pen = self.penalty.subgradient(weights.theta.view(), &self.knowledge)?;
        let scale = data.n_rows() as f64 * self.lambda;
        Ok((lg.theta + &(pen * scale), lg.intercept))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub max_epochs: usize,
    pub adadelta_decay: f64,
    pub adadelta_epsilon: f64,
    /// Relative objective change per epoch treated as converged.
    pub convergence_tol: f64,
    /// Number of consecutive epochs that must satisfy `convergence_tol`.
    pub patience: usize,
    pub fit_intercept: bool,
    /// Recorded for provenance. Full-batch training draws no random numbers.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_epochs: 5000,
            adadelta_decay: 0.95,
            adadelta_epsilon: 1e-6,
            convergence_tol: 1e-7,
            patience: 5,
            fit_intercept: true,
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1".into());
        }
        if !(self.adadelta_decay > 0.0 && self.adadelta_decay < 1.0) {
            return bad(format!("adadelta_decay must lie in (0, 1), got {}", self.adadelta_decay));
        }
        if !(self.adadelta_epsilon > 0.0) {
            return bad(format!("adadelta_epsilon must be positive, got {}", self.adadelta_epsilon));
        }
        if !(self.convergence_tol > 0.0) {
            return bad(format!("convergence_tol must be positive, got {}", self.convergence_tol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub weights: WeightVector,
    /// Objective at the starting point followed by the objective after every epoch.
    pub objective_trace: Vec<f64>,
    pub converged: bool,
    pub epochs_run: usize,
}

impl FitResult {
    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace is never empty")
    }
}

/// Loss value with its gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGradient {
    pub value: f64,
    pub theta: Array1<f64>,
    pub intercept: f64,
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `Xᵀv`, accumulated row by row so the row-major design matrix is read
/// contiguously.
fn transpose_mul(x: &Array2<f64>, v: ArrayView1<'_, f64>) -> Array1<f64> {
    let mut out = Array1::zeros(x.ncols());
    for (row, &vi) in x.outer_iter().zip(v) {
        if vi != 0.0 {
            out.scaled_add(vi, &row);
        }
    }
    out
}

fn linear_scores(weights: &WeightVector, x: &Array2<f64>) -> Array1<f64> {
    let mut z = x.dot(&weights.theta);
    z += weights.intercept;
    z
}

/// Dot product with independent partial sums so the compiler can vectorize.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (xa, xb) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += xa[k] * xb[k];
        }
    }
    acc.iter().sum::<f64>() + tail
}

/// Summed loss over all rows and its exact gradient in `(θ, b)`.
///
/// One pass over the design matrix: each row is dotted with `θ` and then
/// immediately accumulated into the gradient while it is still in cache.
pub fn loss_and_gradient(loss: LossKind, weights: &WeightVector, data: &Dataset) -> Result<LossGradient> {
    if data.n_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    check_len("weights vs features", data.n_features(), weights.dim())?;
    let theta = weights.theta.to_vec();
    let mut grad = vec![0.0; theta.len()];
    let mut value = 0.0;
    let mut intercept = 0.0;
    for (row, &yi) in data.x.outer_iter().zip(&data.y) {
        let row = row.to_slice().expect("design matrix rows are contiguous");
        let zi = dot(row, &theta) + weights.intercept;
        let resid = match loss {
            LossKind::LeastSquares => {
                let e = zi - yi;
                value += 0.5 * e * e;
                e
            }
            LossKind::Logistic => {
                value += softplus(zi) - yi * zi;
                sigmoid(zi) - yi
            }
        };
        intercept += resid;
        if resid != 0.0 {
            for (g, &xij) in grad.iter_mut().zip(row) {
                *g += resid * xij;
            }
        }
    }
    Ok(LossGradient {
        value,
        theta: Array1::from(grad),
        intercept,
    })
}

/// `θᵀx + b` per row for least squares, `sigmoid(θᵀx + b)` for logistic.
pub fn predict_scores(loss: LossKind, weights: &WeightVector, x: &Array2<f64>) -> Result<Array1<f64>> {
    check_len("weights vs features", x.ncols(), weights.dim())?;
    let z = linear_scores(weights, x);
    Ok(match loss {
        LossKind::LeastSquares => z,
        LossKind::Logistic => z.mapv(sigmoid),
    })
}

/// Per-coordinate ADADELTA accumulators.
#[derive(Clone)]
struct Adadelta {
    decay: f64,
    eps: f64,
    sq_grad: Array1<f64>,
    sq_step: Array1<f64>,
}

impl Adadelta {
    fn new(dim: usize, config: &TrainConfig) -> Self {
        Self {
            decay: config.adadelta_decay,
            eps: config.adadelta_epsilon,
            sq_grad: Array1::zeros(dim),
            sq_step: Array1::zeros(dim),
        }
    }

    fn proposed_step(&mut self, i: usize, grad: f64) -> f64 {
        let rho = self.decay;
        self.sq_grad[i] = rho * self.sq_grad[i] + (1.0 - rho) * grad * grad;
        -((self.sq_step[i] + self.eps).sqrt() / (self.sq_grad[i] + self.eps).sqrt()) * grad
    }

    fn record_step(&mut self, i: usize, step: f64) {
        let rho = self.decay;
        self.sq_step[i] = rho * self.sq_step[i] + (1.0 - rho) * step * step;
    }
}

/// Column means and `Xᵀy / n`, enough to get the loss gradient at `θ = 0`
/// for any intercept in O(d).
struct OriginProbe {
    col_means: Array1<f64>,
    xty_mean: Array1<f64>,
}

impl OriginProbe {
    fn new(data: &Dataset) -> Self {
        let n = data.n_rows() as f64;
        Self {
            col_means: data.x.mean_axis(ndarray::Axis(0)).expect("nonempty"),
            xty_mean: transpose_mul(&data.x, data.y.view()) / n,
        }
    }

    fn gradient(&self, loss: LossKind, intercept: f64) -> Array1<f64> {
        let fitted = match loss {
            LossKind::LeastSquares => intercept,
            LossKind::Logistic => sigmoid(intercept),
        };
        &self.col_means * fitted - &self.xty_mean
    }
}

/// An evaluated iterate: objective value and the per-row descent direction.
struct Evaluated {
    weights: WeightVector,
    objective: f64,
    theta_dir: Array1<f64>,
    intercept_dir: f64,
}

struct Trainer<'a> {
    objective: &'a ObjectiveSpec,
    data: &'a Dataset,
    origin: OriginProbe,
    n: f64,
}

impl Trainer<'_> {
    /// Objective and minimum-norm subgradient (divided by `n`) at `weights`.
    fn evaluate(&self, weights: WeightVector) -> Result<Evaluated> {
        let lambda = self.objective.lambda;
        let r = &self.objective.knowledge;
        let penalty = &self.objective.penalty;
        let lg = loss_and_gradient(self.objective.loss, &weights, self.data)?;
        let objective = lg.value + self.n * lambda * penalty.value(weights.theta.view(), r)?;
        let mut dir = lg.theta / self.n;
        if lambda > 0.0 {
            let at_origin = weights.theta.iter().all(|&t| t == 0.0);
            let loss_grad = at_origin.then(|| dir.clone());
            if !at_origin {
                dir.scaled_add(lambda, &penalty.subgradient(weights.theta.view(), r)?);
            }
            let kinks = penalty.kink_weights(weights.theta.view(), r)?;
            for (g, &k) in dir.iter_mut().zip(&kinks) {
                if k > 0.0 {
                    let bound = lambda * k;
                    *g = if g.abs() <= bound { 0.0 } else { *g - bound * g.signum() };
                }
            }
            if let Some(g) = loss_grad {
                if dir.iter().all(|&v| v == 0.0) && !penalty.origin_is_stationary(g.view(), r, lambda)? {
                    dir = self.escape_direction(g.view(), lambda)?;
                }
            }
        }
        Ok(Evaluated {
            weights,
            objective,
            theta_dir: dir,
            intercept_dir: lg.intercept / self.n,
        })
    }

    /// Direction out of a non-stationary origin whose per-coordinate kinks
    /// all hold. Searches the supports of the `k` largest gradient entries,
    /// with either sign or gradient values on the support, for the best
    /// ratio `gᵀv / J(v)`; any ratio above `λ` gives a descent direction.
    fn escape_direction(&self, g: ArrayView1<'_, f64>, lambda: f64) -> Result<Array1<f64>> {
        let penalty = &self.objective.penalty;
        let r = &self.objective.knowledge;
        let mut order: Vec<usize> = (0..g.len()).collect();
        order.sort_by(|&i, &j| g[j].abs().total_cmp(&g[i].abs()));
        let mut best = (lambda, Array1::zeros(g.len()));
        let mut signs = Array1::zeros(g.len());
        let mut values = Array1::zeros(g.len());
        for &i in &order {
            if g[i] == 0.0 {
                break;
            }
            signs[i] = g[i].signum();
            values[i] = g[i];
            for v in [&signs, &values] {
                let ratio = g.dot(v) / penalty.value(v.view(), r)?;
                if ratio > best.0 {
                    best = (ratio, v.clone());
                }
            }
        }
        let (ratio, v) = best;
        let norm = v.dot(&v).sqrt();
        Ok(if norm > 0.0 { v * ((ratio - lambda) / norm) } else { v })
    }

    /// Sets `θ` to zero when the origin is optimal for the current intercept.
    fn snap_to_origin(&self, weights: &mut WeightVector) -> Result<()> {
        let lambda = self.objective.lambda;
        if lambda > 0.0 && weights.theta.iter().any(|&t| t != 0.0) {
            let g0 = self.origin.gradient(self.objective.loss, weights.intercept);
            if self
                .objective
                .penalty
                .origin_is_stationary(g0.view(), &self.objective.knowledge, lambda)?
            {
                weights.theta.fill(0.0);
            }
        }
        Ok(())
    }
}

/// Trains `objective` on `data` starting from `θ = 0, b = 0`.
///
/// Each epoch proposes one ADADELTA step along the minimum-norm subgradient,
/// scaled by a global multiplier. A proposal that raises the objective is
/// discarded and the multiplier halved; accepted steps let it recover. The
/// objective trace is therefore nonincreasing. Training stops once the
/// relative change of accepted steps stays below `convergence_tol` for
/// `patience` epochs, or when the multiplier underflows.
///
/// Fails with [`Error::Divergence`] if the objective becomes non-finite.
pub fn adadelta_fit(objective: &ObjectiveSpec, data: &Dataset, config: &TrainConfig) -> Result<FitResult> {
    adadelta_fit_from(objective, data, config, &WeightVector::zeros(data.n_features()))
}

/// [`adadelta_fit`] started from `start` instead of the origin, with fresh
/// ADADELTA accumulators. Useful along a decreasing λ path, where the
/// previous solution is already close.
pub fn adadelta_fit_from(
    objective: &ObjectiveSpec,
    data: &Dataset,
    config: &TrainConfig,
    start: &WeightVector,
) -> Result<FitResult> {
    let d = data.n_features();
    check_len("starting weights", d, start.dim())?;
    objective.validate(d)?;
    config.validate()?;
    if data.n_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    let trainer = Trainer {
        objective,
        data,
        origin: OriginProbe::new(data),
        n: data.n_rows() as f64,
    };
    let kinked: Vec<bool> = objective
        .penalty
        .kink_weights(Array1::zeros(d).view(), &objective.knowledge)?
        .iter()
        .map(|&k| objective.lambda > 0.0 && k > 0.0)
        .collect();

    let mut current = trainer.evaluate(start.clone())?;
    if !current.objective.is_finite() {
        return Err(Error::Divergence { epoch: 0 });
    }
    let mut state = Adadelta::new(d + 1, config);
    let mut multiplier = 1.0_f64;
    let mut trace = Vec::with_capacity(config.max_epochs.min(100_000) + 1);
    trace.push(current.objective);
    let mut calm_epochs = 0;
    let mut converged = false;
    let mut epochs_run = 0;

    for epoch in 1..=config.max_epochs {
        epochs_run = epoch;
        let saved = state.clone();
        let mut proposal = current.weights.clone();
        for i in 0..d {
            let old = proposal.theta[i];
            let mut new = old + multiplier * state.proposed_step(i, current.theta_dir[i]);
            if kinked[i] && old != 0.0 && new * old < 0.0 {
                new = 0.0;
            }
            state.record_step(i, new - old);
            proposal.theta[i] = new;
        }
        if config.fit_intercept {
            let step = multiplier * state.proposed_step(d, current.intercept_dir);
            state.record_step(d, step);
            proposal.intercept += step;
        }
        trainer.snap_to_origin(&mut proposal)?;

        let candidate = trainer.evaluate(proposal)?;
        if !candidate.objective.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        if candidate.objective <= current.objective {
            let change = (current.objective - candidate.objective) / current.objective.abs().max(1e-300);
            calm_epochs = if change < config.convergence_tol { calm_epochs + 1 } else { 0 };
            current = candidate;
            multiplier = (multiplier * 1.1).min(1.0);
        } else {
            state = saved;
            multiplier *= 0.5;
        }
        trace.push(current.objective);
        if calm_epochs >= config.patience || multiplier < 1e-12 {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        weights: current.weights,
        objective_trace: trace,
        converged,
        epochs_run,
    })
}
