//! Penalty values and subgradients for the EYE norm and the benchmark
//! regularizers it is compared against.
//!
//! Every function here is pure. Coefficients are passed as the bare `theta`
//! vector; intercepts are never penalized.
//!
//! Subgradients use the convention `sgn(0) = 0`, so a coordinate sitting at
//! zero receives no penalty pull. The optimizer layers a minimum-norm choice
//! on top of that (see [`PenaltySpec::kink_weights`] and
//! [`PenaltySpec::origin_is_stationary`]).

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::data::KnowledgeVector;
use crate::error::{check_finite, check_len, Error, Result};

/// Which regularizer to apply, together with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PenaltySpec {
    /// `‖(1−r)⊙θ‖₁ + √(‖(1−r)⊙θ‖₁² + ‖r⊙θ‖₂²)`
    Eye,
    /// `(1−β)‖r⊙θ‖₂² + 2β‖(1−r)⊙θ‖₁`
    NaiveQ { beta: f64 },
    Lasso,
    Ridge,
    /// `β‖θ‖₁ + ½(1−β)‖θ‖₂²`
    ElasticNet { beta: f64 },
    /// Ordered weighted l1 with nonincreasing weights applied to sorted magnitudes.
    Owl { weights: Vec<f64> },
    WeightedLasso { weights: Vec<f64> },
    WeightedRidge { weights: Vec<f64> },
}

/// The pieces of the EYE value at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EyeDecomposition {
    /// `‖(1−r)⊙θ‖₁`
    pub l1_unknown: f64,
    /// `‖r⊙θ‖₂²`
    pub l2sq_known: f64,
    /// `√(l1_unknown² + l2sq_known)`
    pub z: f64,
}

impl EyeDecomposition {
    pub fn value(&self) -> f64 {
        self.l1_unknown + self.z
    }
}

fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn check_pair(theta: ArrayView1<'_, f64>, r: &KnowledgeVector) -> Result<()> {
    check_len("penalty knowledge vector", theta.len(), r.len())?;
    check_finite("penalty coefficients", theta.iter())
}

pub fn eye_decompose(theta: ArrayView1<'_, f64>, r: &KnowledgeVector) -> Result<EyeDecomposition> {
    check_pair(theta, r)?;
    let (mut l1, mut l2sq) = (0.0, 0.0);
    for (&t, &ri) in theta.iter().zip(r.view()) {
        l1 += (1.0 - ri) * t.abs();
        l2sq += (ri * t).powi(2);
    }
    Ok(EyeDecomposition {
        l1_unknown: l1,
        l2sq_known: l2sq,
        z: l1.hypot(l2sq.sqrt()),
    })
}

/// EYE penalty value and its decomposition.
pub fn eye_value(theta: ArrayView1<'_, f64>, r: &KnowledgeVector) -> Result<(f64, EyeDecomposition)> {
    let dec = eye_decompose(theta, r)?;
    Ok((dec.value(), dec))
}

/// A subgradient of the EYE penalty,
/// `g_i = (1−r_i)s_i + (‖(1−r)⊙θ‖₁(1−r_i)s_i + r_i²θ_i) / Z`.
///
/// Returns the zero vector at `θ = 0`.
pub fn eye_subgradient(theta: ArrayView1<'_, f64>, r: &KnowledgeVector) -> Result<Array1<f64>> {
    let dec = eye_decompose(theta, r)?;
    if dec.z == 0.0 {
        return Ok(Array1::zeros(theta.len()));
    }
    Ok(theta
        .iter()
        .zip(r.view())
        .map(|(&t, &ri)| {
            let s = sgn(t);
            (1.0 - ri) * s + (dec.l1_unknown * (1.0 - ri) * s + ri * ri * t) / dec.z
        })
        .collect())
}

/// Dual norm of EYE, `sup { gᵀθ : eye(θ) ≤ 1 }`.
///
/// The EYE unit ball is `{θ : 2‖(1−r)⊙θ‖₁ + ‖r⊙θ‖₂² ≤ 1}`, so by Lagrange
/// duality the dual norm is `min_{μ ≥ μ₀} μ + Σ_i h_i(μ)` with
/// `h_i(μ) = (|g_i| − 2μ(1−r_i))₊² / (4μr_i²)` and `μ₀ = max_{r_i=0} |g_i|/2`.
/// The one-dimensional convex problem is solved by golden-section search.
pub fn eye_dual_norm(g: ArrayView1<'_, f64>, r: &KnowledgeVector) -> Result<f64> {
    check_pair(g, r)?;
    let gmax = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if gmax == 0.0 {
        return Ok(0.0);
    }
    let mu_floor = g
        .iter()
        .zip(r.view())
        .filter(|(_, &ri)| ri == 0.0)
        .fold(0.0_f64, |m, (v, _)| m.max(v.abs() / 2.0));
    let phi = |mu: f64| -> f64 {
        mu + g
            .iter()
            .zip(r.view())
            .filter(|(_, &ri)| ri > 0.0)
            .map(|(&gi, &ri)| {
                let excess = (gi.abs() - 2.0 * mu * (1.0 - ri)).max(0.0);
                excess * excess / (4.0 * mu * ri * ri)
            })
            .sum::<f64>()
    };
    // The minimizer is bounded above by any attained value of phi.
    let mut lo = mu_floor;
    let mut hi = phi(mu_floor.max(gmax));
    if hi <= lo {
        return Ok(phi(lo));
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (phi(a), phi(b));
    for _ in 0..200 {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = phi(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = phi(b);
        }
        if hi - lo <= 1e-15 * hi.max(1e-300) {
            break;
        }
    }
    let mut best = fa.min(fb);
    if mu_floor > 0.0 {
        best = best.min(phi(mu_floor));
    }
    Ok(best)
}

/// The non-homogeneous mixture `(1−β)‖r⊙θ‖₂² + 2β‖(1−r)⊙θ‖₁`, `β ∈ (0, 1)`.
pub fn naive_q_value(theta: ArrayView1<'_, f64>, r: &KnowledgeVector, beta: f64) -> Result<f64> {
    check_open_unit("naive penalty beta", beta)?;
    check_pair(theta, r)?;
    Ok(theta
        .iter()
        .zip(r.view())
        .map(|(&t, &ri)| (1.0 - beta) * (ri * t).powi(2) + 2.0 * beta * (1.0 - ri) * t.abs())
        .sum())
}

fn naive_q_subgradient(theta: ArrayView1<'_, f64>, r: &KnowledgeVector, beta: f64) -> Result<Array1<f64>> {
    check_open_unit("naive penalty beta", beta)?;
    check_pair(theta, r)?;
    Ok(theta
        .iter()
        .zip(r.view())
        .map(|(&t, &ri)| 2.0 * (1.0 - beta) * ri * ri * t + 2.0 * beta * (1.0 - ri) * sgn(t))
        .collect())
}

fn check_open_unit(what: &str, beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must lie in (0, 1), got {beta}")))
    }
}

/// Indices of `theta` ordered by decreasing magnitude; equal magnitudes keep
/// index order.
fn magnitude_order(theta: ArrayView1<'_, f64>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..theta.len()).collect();
    idx.sort_by(|&a, &b| theta[b].abs().total_cmp(&theta[a].abs()));
    idx
}

/// Value of one of the knowledge-free baseline penalties.
pub fn baseline_value(spec: &PenaltySpec, theta: ArrayView1<'_, f64>) -> Result<f64> {
    spec.validate(theta.len())?;
    check_finite("penalty coefficients", theta.iter())?;
    let l1 = || theta.iter().map(|t| t.abs()).sum::<f64>();
    let l2sq = || theta.iter().map(|t| t * t).sum::<f64>();
    Ok(match spec {
        PenaltySpec::Lasso => l1(),
        PenaltySpec::Ridge => 0.5 * l2sq(),
        PenaltySpec::ElasticNet { beta } => beta * l1() + 0.5 * (1.0 - beta) * l2sq(),
        PenaltySpec::Owl { weights } => magnitude_order(theta)
            .iter()
            .zip(weights)
            .map(|(&i, w)| w * theta[i].abs())
            .sum(),
        PenaltySpec::WeightedLasso { weights } => {
            theta.iter().zip(weights).map(|(t, w)| (w * t).abs()).sum()
        }
        PenaltySpec::WeightedRidge { weights } => {
            0.5 * theta.iter().zip(weights).map(|(t, w)| (w * t).powi(2)).sum::<f64>()
        }
        PenaltySpec::Eye | PenaltySpec::NaiveQ { .. } => {
            return Err(Error::InvalidParameter(
                "knowledge-based penalties need an expert vector".into(),
            ))
        }
    })
}

/// A subgradient of one of the knowledge-free baseline penalties.
///
/// For OWL each coordinate receives the weight of its magnitude rank, and
/// ties go to the lower index first (which receives the larger weight).
pub fn baseline_subgradient(spec: &PenaltySpec, theta: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
    spec.validate(theta.len())?;
    check_finite("penalty coefficients", theta.iter())?;
    Ok(match spec {
        PenaltySpec::Lasso => theta.mapv(sgn),
        PenaltySpec::Ridge => theta.to_owned(),
        PenaltySpec::ElasticNet { beta } => theta.mapv(|t| beta * sgn(t) + (1.0 - beta) * t),
        PenaltySpec::Owl { weights } => {
            let mut g = Array1::zeros(theta.len());
            for (&i, w) in magnitude_order(theta).iter().zip(weights) {
                g[i] = w * sgn(theta[i]);
            }
            g
        }
        PenaltySpec::WeightedLasso { weights } => theta
            .iter()
            .zip(weights)
            .map(|(&t, w)| w * sgn(t))
            .collect(),
        PenaltySpec::WeightedRidge { weights } => theta
            .iter()
            .zip(weights)
            .map(|(&t, w)| w * w * t)
            .collect(),
        PenaltySpec::Eye | PenaltySpec::NaiveQ { .. } => {
            return Err(Error::InvalidParameter(
                "knowledge-based penalties need an expert vector".into(),
            ))
        }
    })
}

impl PenaltySpec {
    pub fn name(&self) -> &'static str {
        match self {
            PenaltySpec::Eye => "eye",
            PenaltySpec::NaiveQ { .. } => "naive_q",
            PenaltySpec::Lasso => "lasso",
            PenaltySpec::Ridge => "ridge",
            PenaltySpec::ElasticNet { .. } => "elastic_net",
            PenaltySpec::Owl { .. } => "owl",
            PenaltySpec::WeightedLasso { .. } => "weighted_lasso",
            PenaltySpec::WeightedRidge { .. } => "weighted_ridge",
        }
    }

    /// Checks hyperparameters against the feature dimension `d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        let per_feature = |what: &str, w: &[f64]| -> Result<()> {
            check_len("penalty weights", d, w.len())?;
            if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidParameter(format!("{what} weights must be finite and nonnegative")));
            }
            Ok(())
        };
        match self {
            PenaltySpec::Eye | PenaltySpec::Lasso | PenaltySpec::Ridge => Ok(()),
            PenaltySpec::NaiveQ { beta } => check_open_unit("naive penalty beta", *beta),
            PenaltySpec::ElasticNet { beta } => {
                if (0.0..=1.0).contains(beta) {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("elastic net beta must lie in [0, 1], got {beta}")))
                }
            }
            PenaltySpec::Owl { weights } => {
                per_feature("OWL", weights)?;
                if weights.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::InvalidParameter("OWL weights must be nonincreasing".into()));
                }
                Ok(())
            }
            PenaltySpec::WeightedLasso { weights } | PenaltySpec::WeightedRidge { weights } => {
                per_feature(self.name(), weights)
            }
        }
    }

    /// Penalty value; `r` is ignored by the knowledge-free penalties.
    pub fn value(&self, theta: ArrayView1<'_, f64>, r: &KnowledgeVector) -> Result<f64> {
        match self {
            PenaltySpec::Eye => eye_value(theta, r).map(|(v, _)| v),
            PenaltySpec::NaiveQ { beta } => naive_q_value(theta, r, *beta),
            _ => baseline_value(self, theta),
        }
    }

    pub fn subgradient(&self, theta: ArrayView1<'_, f64>, r: &KnowledgeVector) -> Result<Array1<f64>> {
        match self {
            PenaltySpec::Eye => eye_subgradient(theta, r),
            PenaltySpec::NaiveQ { beta } => naive_q_subgradient(theta, r, *beta),
            _ => baseline_subgradient(self, theta),
        }
    }

    /// Half-width of the subdifferential along each coordinate that is
    /// currently zero: the directional derivative of the penalty when that
    /// coordinate alone leaves zero. Entries for nonzero coordinates are 0.
    pub fn kink_weights(&self, theta: ArrayView1<'_, f64>, r: &KnowledgeVector) -> Result<Array1<f64>> {
        self.validate(theta.len())?;
        check_pair(theta, r)?;
        let d = theta.len();
        let mut kinks = Array1::zeros(d);
        let at_zero = |i: usize| theta[i] == 0.0;
        match self {
            PenaltySpec::Eye => {
                let dec = eye_decompose(theta, r)?;
                for i in (0..d).filter(|&i| at_zero(i)) {
                    let u = 1.0 - r.view()[i];
                    kinks[i] = if dec.z > 0.0 {
                        u * (1.0 + dec.l1_unknown / dec.z)
                    } else {
                        u + u.hypot(r.view()[i])
                    };
                }
            }
            PenaltySpec::NaiveQ { beta } => {
                for i in (0..d).filter(|&i| at_zero(i)) {
                    kinks[i] = 2.0 * beta * (1.0 - r.view()[i]);
                }
            }
            PenaltySpec::Lasso => kinks.iter_mut().enumerate().filter(|(i, _)| at_zero(*i)).for_each(|(_, k)| *k = 1.0),
            PenaltySpec::ElasticNet { beta } => {
                kinks.iter_mut().enumerate().filter(|(i, _)| at_zero(*i)).for_each(|(_, k)| *k = *beta)
            }
            PenaltySpec::WeightedLasso { weights } => {
                for i in (0..d).filter(|&i| at_zero(i)) {
                    kinks[i] = weights[i];
                }
            }
            PenaltySpec::Owl { weights } => {
                let nonzero = theta.iter().filter(|t| **t != 0.0).count();
                let w = weights.get(nonzero).copied().unwrap_or(0.0);
                for i in (0..d).filter(|&i| at_zero(i)) {
                    kinks[i] = w;
                }
            }
            PenaltySpec::Ridge | PenaltySpec::WeightedRidge { .. } => {}
        }
        Ok(kinks)
    }

    /// Whether `θ = 0` minimizes `f + scale·penalty` for a convex `f` whose
    /// gradient at the origin is `g`, i.e. whether `−g ∈ scale·∂penalty(0)`.
    pub fn origin_is_stationary(&self, g: ArrayView1<'_, f64>, r: &KnowledgeVector, scale: f64) -> Result<bool> {
        self.validate(g.len())?;
        check_pair(g, r)?;
        let tol = 1e-12 * scale.max(1e-300);
        let within = |gi: f64, bound: f64| gi.abs() <= scale * bound + tol;
        Ok(match self {
            PenaltySpec::Eye => eye_dual_norm(g, r)? <= scale * (1.0 + 1e-12),
            PenaltySpec::NaiveQ { beta } => g
                .iter()
                .zip(r.view())
                .all(|(&gi, &ri)| within(gi, 2.0 * beta * (1.0 - ri))),
            PenaltySpec::Lasso => g.iter().all(|&gi| within(gi, 1.0)),
            PenaltySpec::Ridge => g.iter().all(|&gi| within(gi, 0.0)),
            PenaltySpec::ElasticNet { beta } => g.iter().all(|&gi| within(gi, *beta)),
            PenaltySpec::WeightedLasso { weights } => {
                g.iter().zip(weights).all(|(&gi, &w)| within(gi, w))
            }
            PenaltySpec::WeightedRidge { .. } => g.iter().all(|&gi| within(gi, 0.0)),
            PenaltySpec::Owl { weights } => {
                // Dual of OWL: every prefix sum of sorted |g| is bounded by the
                // matching prefix sum of weights.
                let mut mags: Vec<f64> = g.iter().map(|v| v.abs()).collect();
                mags.sort_by(|a, b| b.total_cmp(a));
                let (mut sg, mut sw) = (0.0, 0.0);
                mags.iter().zip(weights).all(|(m, w)| {
                    sg += m;
                    sw += w;
                    sg <= scale * sw + tol
                })
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn r(v: &[f64]) -> KnowledgeVector {
        KnowledgeVector::from_vec(v.to_vec()).unwrap()
    }

    #[test]
    fn eye_hand_example() {
        let (v, dec) = eye_value(array![3.0, 4.0].view(), &r(&[0.0, 1.0])).unwrap();
        assert_eq!(v, 8.0);
        assert_eq!(dec.l1_unknown, 3.0);
        assert_eq!(dec.z, 5.0);
        let g = eye_subgradient(array![3.0, 4.0].view(), &r(&[0.0, 1.0])).unwrap();
        assert!((g[0] - 1.6).abs() < 1e-15 && (g[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn eye_at_origin() {
        let zero = Array1::zeros(4);
        let rv = r(&[0.0, 1.0, 0.5, 1.0]);
        assert_eq!(eye_value(zero.view(), &rv).unwrap().0, 0.0);
        assert_eq!(eye_subgradient(zero.view(), &rv).unwrap(), Array1::<f64>::zeros(4));
    }

    #[test]
    fn eye_errors() {
        assert!(matches!(
            eye_value(array![1.0].view(), &r(&[0.0, 1.0])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            eye_value(array![f64::INFINITY, 1.0].view(), &r(&[0.0, 1.0])),
            Err(Error::NonFinite("penalty coefficients"))
        );
        assert!(eye_subgradient(array![1.0].view(), &r(&[0.0, 1.0])).is_err());
    }

    #[test]
    fn naive_q_examples() {
        let rv = r(&[0.0, 1.0]);
        assert_eq!(naive_q_value(array![3.0, 4.0].view(), &rv, 0.5).unwrap(), 11.0);
        assert_eq!(naive_q_value(array![0.0, 0.0].view(), &rv, 0.5).unwrap(), 0.0);
        assert_eq!(naive_q_value(array![0.0, 4.0].view(), &rv, 0.5).unwrap(), 8.0);
        assert_eq!(naive_q_value(array![0.0, 8.0].view(), &rv, 0.5).unwrap(), 32.0);
        for beta in [0.0, 1.0, -0.5, 1.5] {
            assert!(naive_q_value(array![1.0, 1.0].view(), &rv, beta).is_err());
        }
    }

    #[test]
    fn baseline_examples() {
        let t = array![3.0, -4.0];
        assert_eq!(baseline_value(&PenaltySpec::Lasso, t.view()).unwrap(), 7.0);
        assert_eq!(baseline_value(&PenaltySpec::Ridge, t.view()).unwrap(), 12.5);
        assert_eq!(
            baseline_value(&PenaltySpec::ElasticNet { beta: 0.5 }, t.view()).unwrap(),
            9.75
        );
        let owl = PenaltySpec::Owl { weights: vec![2.0, 1.0] };
        assert_eq!(baseline_value(&owl, t.view()).unwrap(), 11.0);
        assert_eq!(baseline_subgradient(&PenaltySpec::Ridge, t.view()).unwrap(), array![3.0, -4.0]);
        assert_eq!(baseline_subgradient(&PenaltySpec::Lasso, t.view()).unwrap(), array![1.0, -1.0]);
        assert_eq!(baseline_subgradient(&owl, t.view()).unwrap(), array![1.0, -2.0]);
        let wl = PenaltySpec::WeightedLasso { weights: vec![1.0, 3.0] };
        assert_eq!(baseline_value(&wl, t.view()).unwrap(), 15.0);
        let wr = PenaltySpec::WeightedRidge { weights: vec![1.0, 2.0] };
        assert_eq!(baseline_value(&wr, t.view()).unwrap(), 0.5 * (9.0 + 64.0));
        assert_eq!(baseline_subgradient(&wr, t.view()).unwrap(), array![3.0, -16.0]);
    }

    #[test]
    fn owl_ties_favor_lower_index() {
        let owl = PenaltySpec::Owl { weights: vec![2.0, 1.0, 0.5] };
        let g = baseline_subgradient(&owl, array![-1.0, 1.0, 1.0].view()).unwrap();
        assert_eq!(g, array![-2.0, 1.0, 0.5]);
    }

    #[test]
    fn invalid_specs() {
        assert!(PenaltySpec::Owl { weights: vec![1.0, 2.0] }.validate(2).is_err());
        assert!(PenaltySpec::Owl { weights: vec![1.0] }.validate(2).is_err());
        assert!(PenaltySpec::WeightedLasso { weights: vec![1.0, -1.0] }.validate(2).is_err());
        assert!(PenaltySpec::ElasticNet { beta: 1.2 }.validate(2).is_err());
        assert!(baseline_value(&PenaltySpec::Eye, array![1.0].view()).is_err());
        assert!(baseline_subgradient(&PenaltySpec::Owl { weights: vec![1.0, 2.0] }, array![1.0, 1.0].view()).is_err());
    }

    #[test]
    fn eye_dual_norm_matches_binary_closed_form() {
        // For binary r the dual norm is B when B ≥ A, else (A² + B²)/(2A),
        // with A = ‖g_unknown‖∞ and B = ‖g_known‖₂.
        let cases: [(&[f64], &[f64]); 4] = [
            (&[3.0, 4.0], &[0.0, 1.0]),
            (&[5.0, 1.0, -2.0], &[0.0, 1.0, 1.0]),
            (&[0.5, -2.0, 1.0], &[1.0, 1.0, 0.0]),
            (&[1.0, -3.0], &[0.0, 0.0]),
        ];
        for (g, rv) in cases {
            let a = g.iter().zip(rv).filter(|(_, &k)| k == 0.0).fold(0.0_f64, |m, (v, _)| m.max(v.abs()));
            let b = g.iter().zip(rv).filter(|(_, &k)| k == 1.0).map(|(v, _)| v * v).sum::<f64>().sqrt();
            let expected = if b >= a { b } else { (a * a + b * b) / (2.0 * a) };
            let got = eye_dual_norm(Array1::from(g.to_vec()).view(), &r(rv)).unwrap();
            assert!((got - expected).abs() < 1e-9 * expected, "{got} vs {expected}");
        }
    }

    #[test]
    fn origin_stationarity() {
        let rv = r(&[0.0, 1.0]);
        // dual norm of [3, 4] with r = [0, 1] is 4
        let g = array![3.0, 4.0];
        assert!(PenaltySpec::Eye.origin_is_stationary(g.view(), &rv, 4.0 + 1e-9).unwrap());
        assert!(!PenaltySpec::Eye.origin_is_stationary(g.view(), &rv, 3.9).unwrap());
        assert!(PenaltySpec::Lasso.origin_is_stationary(g.view(), &rv, 4.0).unwrap());
        assert!(!PenaltySpec::Ridge.origin_is_stationary(g.view(), &rv, 1e9).unwrap());
        // OWL with weights [1, 0] is the l-infinity norm, whose dual is l1.
        let owl = PenaltySpec::Owl { weights: vec![1.0, 0.0] };
        assert!(owl.origin_is_stationary(array![3.0, 0.0].view(), &rv, 3.0).unwrap());
        assert!(!owl.origin_is_stationary(array![3.0, 0.1].view(), &rv, 3.05).unwrap());
    }

    #[test]
    fn kinks_only_on_zero_coordinates() {
        let rv = r(&[0.0, 1.0, 0.0]);
        let k = PenaltySpec::Eye.kink_weights(array![0.0, 4.0, 3.0].view(), &rv).unwrap();
        assert_eq!(k[1], 0.0);
        assert_eq!(k[2], 0.0);
        assert!((k[0] - (1.0 + 3.0 / 5.0)).abs() < 1e-15);
        let k = PenaltySpec::Owl { weights: vec![3.0, 2.0, 1.0] }
            .kink_weights(array![0.0, 4.0, 0.0].view(), &rv)
            .unwrap();
        assert_eq!(k, array![2.0, 0.0, 2.0]);
    }
}
