use credible::data::{Dataset, GroupLayout, KnowledgeVector, WeightVector};
use credible::optimizer::{adadelta_fit, LossKind, ObjectiveSpec, TrainConfig};
use credible::oracle::{
    grouping_bound_audit, orthonormal_fixed_point, orthonormal_map, perfect_correlation_audit, random_orthonormal_design,
    StructureCase,
};
use credible::penalties::PenaltySpec;
use credible::Error;
use ndarray::{array, Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn intercept_free() -> TrainConfig {
    TrainConfig {
        max_epochs: 20_000,
        convergence_tol: 1e-12,
        fit_intercept: false,
        ..TrainConfig::default()
    }
}

/// Stationarity residual of `½‖θ − θᴼᴸˢ‖² + nλ·eye(θ)`, written out from the
/// penalty's definition rather than through the library's subgradient.
fn stationarity_residual(theta: &Array1<f64>, ols: &Array1<f64>, r: &[f64], n_lambda: f64) -> f64 {
    let a: f64 = theta.iter().zip(r).map(|(t, ri)| ((1.0 - ri) * t).abs()).sum();
    let b: f64 = theta.iter().zip(r).map(|(t, ri)| (ri * t).powi(2)).sum();
    let z = (a * a + b).sqrt();
    theta
        .iter()
        .zip(ols)
        .zip(r)
        .map(|((&t, &o), &ri)| {
            if t == 0.0 {
                // Zero coordinates only need the gradient inside the kink.
                let bound = n_lambda * (1.0 - ri) * (1.0 + a / z);
                ((t - o).abs() - bound).max(0.0)
            } else {
                let g = (1.0 - ri) * t.signum() * (1.0 + a / z) + ri * ri * t / z;
                (t - o + n_lambda * g).abs()
            }
        })
        .fold(0.0, f64::max)
}

#[test]
fn fixed_point_examples() {
    let ols = array![1.5, -2.0, 0.3];
    let r = KnowledgeVector::from_mask(&[true, false, false]);
    assert_eq!(orthonormal_fixed_point(&ols, &r, 0.0, 1e-12).unwrap().theta, ols);

    let fp = orthonormal_fixed_point(&array![2.0], &KnowledgeVector::zeros(1), 0.5, 1e-12).unwrap();
    assert!((fp.theta[0] - 1.0).abs() < 1e-10);
}

#[test]
fn fixed_points_are_self_consistent_and_stationary() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let d = 8;
        let ols: Array1<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let rv: Vec<f64> = (0..d).map(|_| rng.random_range(0..2) as f64).collect();
        let r = KnowledgeVector::from_vec(rv.clone()).unwrap();
        let n_lambda = rng.random_range(0.05..1.0);
        let fp = orthonormal_fixed_point(&ols, &r, n_lambda, 1e-13).unwrap();
        if fp.degenerate {
            assert!(fp.theta.iter().all(|&t| t == 0.0));
            continue;
        }
        let again = orthonormal_map(&fp.theta, &ols, &r, n_lambda).unwrap().unwrap();
        assert!(again.iter().zip(&fp.theta).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!(stationarity_residual(&fp.theta, &ols, &rv, n_lambda) < 1e-8);
    }
}

#[test]
fn fixed_point_agrees_with_training_on_orthonormal_designs() {
    for seed in 0..3 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let x = random_orthonormal_design(50, 10, seed).unwrap();
        let y: Array1<f64> = (0..50).map(|_| StandardNormal.sample(&mut rng)).collect::<Vec<f64>>().into();
        let r = KnowledgeVector::from_vec((0..10).map(|_| rng.random_range(0..2) as f64).collect()).unwrap();
        let lambda = 0.01;
        let ols = x.t().dot(&y);
        let fp = orthonormal_fixed_point(&ols, &r, 50.0 * lambda, 1e-12).unwrap();
        let data = Dataset::new(x, y).unwrap();
        let obj = ObjectiveSpec::new(LossKind::LeastSquares, PenaltySpec::Eye, r, lambda);
        let fit = adadelta_fit(&obj, &data, &intercept_free()).unwrap();
        for (a, b) in fit.weights.theta.iter().zip(&fp.theta) {
            assert!((a - b).abs() < 1e-3, "seed {seed}: {a} vs {b}");
            if *b == 0.0 {
                assert!(a.abs() < 1e-6);
            }
        }
    }
}

fn standardize(mut x: Array2<f64>) -> Array2<f64> {
    let n = x.nrows() as f64;
    for mut col in x.columns_mut() {
        let mean = col.sum() / n;
        col.mapv_inplace(|v| v - mean);
        let sd = (col.dot(&col) / n).sqrt();
        col.mapv_inplace(|v| v / sd);
    }
    x
}

#[test]
fn grouping_bound_holds_on_trained_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let n = 200;
    let shared: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let x = Array2::from_shape_fn((n, 6), |(i, j)| {
        let e: f64 = StandardNormal.sample(&mut rng);
        if j < 4 { shared[i] + 0.3 * e } else { e }
    });
    let x = standardize(x);
    let truth = array![1.0, 1.0, 0.5, 0.5, -1.0, 0.0];
    let y = x.dot(&truth) + Array1::from_shape_fn(n, |_| { let e: f64 = StandardNormal.sample(&mut rng); 0.5 * e });
    let y = &y - y.mean().unwrap();
    let data = Dataset::new(x, y).unwrap();
    let r = KnowledgeVector::from_mask(&[true, true, false, true, false, false]);
    let mut audited = 0;
    for lambda in [0.005, 0.02, 0.1] {
        let obj = ObjectiveSpec::new(LossKind::LeastSquares, PenaltySpec::Eye, r.clone(), lambda);
        let fit = adadelta_fit(&obj, &data, &intercept_free()).unwrap();
        assert!(fit.converged);
        for rep in grouping_bound_audit(&fit.weights, &r, &data, n as f64 * lambda).unwrap() {
            assert!(rep.holds, "λ={lambda} {rep:?}");
            assert_ne!(rep.corollary_holds, Some(false), "λ={lambda} {rep:?}");
            audited += 1;
        }
    }
    assert!(audited > 0);
}

#[test]
fn duplicated_known_columns_get_equal_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let n = 150;
    let base: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let other: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let x = standardize(Array2::from_shape_fn((n, 3), |(i, j)| if j < 2 { base[i] } else { other[i] }));
    let y = x.column(0).to_owned() * 2.0 + &x.column(2);
    let data = Dataset::new(x, y).unwrap();
    let r = KnowledgeVector::ones(3);
    let fit = adadelta_fit(
        &ObjectiveSpec::new(LossKind::LeastSquares, PenaltySpec::Eye, r.clone(), 0.01),
        &data,
        &intercept_free(),
    )
    .unwrap();
    let reports = grouping_bound_audit(&fit.weights, &r, &data, n as f64 * 0.01).unwrap();
    let twin = reports.iter().find(|rep| rep.pair == (0, 1)).unwrap();
    assert!((twin.rho - 1.0).abs() < 1e-12);
    let (lhs, rhs) = twin.corollary.unwrap();
    assert!(rhs < 1e-6);
    assert!(lhs <= rhs + 1e-6, "{lhs} > {rhs}");
}

#[test]
fn grouping_audit_demands_standardized_columns() {
    let data = Dataset::new(array![[1.0, 2.0], [3.0, 5.0], [4.0, 4.0]], array![1.0, 0.0, 1.0]).unwrap();
    let w = WeightVector::from_theta(array![1.0, 1.0]);
    let err = grouping_bound_audit(&w, &KnowledgeVector::ones(2), &data, 1.0).unwrap_err();
    assert!(matches!(err, Error::NotStandardized { column: 0, .. }));
}

#[test]
fn structure_audit_cases() {
    let layout = GroupLayout::from_sizes(&[2, 2, 2]);
    let r = KnowledgeVector::from_mask(&[true, false, true, true, false, false]);
    let good = WeightVector::from_theta(array![1.0, 0.0, 0.5, 0.5, 0.3, 0.0]);
    let reports = perfect_correlation_audit(&good, &r, &layout, 1e-3).unwrap();
    let cases: Vec<StructureCase> = reports.iter().map(|rep| rep.case).collect();
    assert_eq!(cases, [StructureCase::KnownVsUnknown, StructureCase::AllKnown, StructureCase::AllUnknown]);
    assert!(reports.iter().all(|rep| rep.passes));

    let bad = WeightVector::from_theta(array![1.0, 0.1, 0.5, 0.2, 0.0, 0.0]);
    let reports = perfect_correlation_audit(&bad, &r, &layout, 1e-3).unwrap();
    assert!(!reports[0].passes);
    assert!(!reports[1].passes);
    assert!((reports[1].known_spread - 0.6).abs() < 1e-12);

    let zero = WeightVector::zeros(6);
    assert!(perfect_correlation_audit(&zero, &r, &layout, 1e-3).unwrap().iter().all(|rep| rep.passes));

    let fractional = KnowledgeVector::from_vec(vec![0.5; 6]).unwrap();
    assert!(perfect_correlation_audit(&good, &fractional, &layout, 1e-3).is_err());
    assert!(perfect_correlation_audit(&good, &r, &GroupLayout::from_sizes(&[2, 2]), 1e-3).is_err());
}
