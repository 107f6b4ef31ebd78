use credible::data::{DataSplits, Dataset, KnowledgeVector, SplitIndices, WeightVector};
use credible::optimizer::{sigmoid, FitResult, TrainConfig};
use credible::penalties::PenaltySpec;
use credible::selection::{
    bootstrap_filter, select_sparsest, train_grid, CandidateModel, GridSpec, PenaltyFamily, BOOTSTRAP_REPLICATES,
};
use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn candidate(grid_index: usize, lambda: f64, gini: f64, aucs: Vec<f64>) -> CandidateModel {
    CandidateModel {
        spec: PenaltySpec::Lasso,
        lambda,
        grid_index,
        fit: FitResult {
            weights: WeightVector::zeros(1),
            objective_trace: vec![1.0],
            converged: true,
            epochs_run: 0,
        },
        val_auc_bootstrap: aucs,
        gini,
    }
}

fn splits(seed: u64) -> (DataSplits, KnowledgeVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, d) = (300, 6);
    let x = Array2::from_shape_fn((n, d), |_| StandardNormal.sample(&mut rng));
    let truth = Array1::from(vec![1.5, -1.0, 0.5, 0.0, 0.0, 0.0]);
    let y = x.dot(&truth).mapv(|z| if rng.random::<f64>() < sigmoid(z) { 1.0 } else { 0.0 });
    let data = Dataset::new(x, y).unwrap();
    let idx = SplitIndices::shuffled(n, seed).unwrap();
    (DataSplits::standardized(&data, &idx), KnowledgeVector::from_mask(&[true, false, true, false, false, false]))
}

fn small_grid(lambdas: Vec<f64>) -> GridSpec {
    GridSpec {
        lambdas,
        ..GridSpec::desk_scale()
    }
}

#[test]
fn selection_examples() {
    let one = candidate(0, 0.1, 0.4, vec![0.7; 4]);
    assert_eq!(bootstrap_filter(&[one.clone()], 0.05).unwrap(), vec![one.clone()]);
    assert_eq!(select_sparsest(&[one.clone()]).unwrap(), &one);

    let twin = candidate(1, 1.0, 0.4, vec![0.7; 4]);
    assert_eq!(bootstrap_filter(&[one.clone(), twin.clone()], 0.05).unwrap().len(), 2);

    let sparse = candidate(0, 0.1, 0.9, vec![0.7; 4]);
    let dense = candidate(1, 0.1, 0.5, vec![0.7; 4]);
    assert_eq!(select_sparsest(&[dense, sparse.clone()]).unwrap(), &sparse);

    let small = candidate(0, 0.1, 0.6, vec![0.7; 4]);
    let large = candidate(1, 1.0, 0.6, vec![0.7; 4]);
    assert_eq!(select_sparsest(&[small, large.clone()]).unwrap().lambda, 1.0);

    assert!(bootstrap_filter(&[], 0.05).is_err());
    assert!(select_sparsest(&[]).is_err());
}

#[test]
fn grid_training_basics() {
    let (splits, r) = splits(1);
    let cfg = TrainConfig::default();
    let grid = small_grid(vec![1e-3, 1e-2, 1e-1]);
    let a = train_grid(PenaltyFamily::Eye, &grid, &splits, &r, &cfg, 7).unwrap();
    assert_eq!(a.candidates.len(), 3);
    assert!(a.failures.is_empty());
    assert!(a.candidates.iter().all(|c| c.val_auc_bootstrap.len() == BOOTSTRAP_REPLICATES));
    let b = train_grid(PenaltyFamily::Eye, &grid, &splits, &r, &cfg, 7).unwrap();
    assert_eq!(a, b);

    // Every β-bearing or weighted family expands into one spec per setting.
    let en = train_grid(PenaltyFamily::ElasticNet, &grid, &splits, &r, &cfg, 7).unwrap();
    assert_eq!(en.candidates.len(), 3 * grid.betas.len());
}

#[test]
fn overwhelming_penalty_is_flat_and_filtered_out() {
    let (splits, r) = splits(2);
    let grid = small_grid(vec![1e-2, 1e10]);
    let out = train_grid(PenaltyFamily::Lasso, &grid, &splits, &r, &TrainConfig::default(), 3).unwrap();
    let huge = out.candidates.iter().find(|c| c.lambda == 1e10).unwrap();
    assert!(huge.fit.weights.theta.iter().all(|&t| t.abs() < 1e-6));
    assert!((huge.mean_val_auc() - 0.5).abs() < 1e-9);
    let kept = bootstrap_filter(&out.candidates, 0.05).unwrap();
    assert!(kept.iter().all(|c| c.lambda != 1e10));
}

#[test]
fn selection_is_deterministic() {
    let (splits, r) = splits(3);
    let grid = small_grid(vec![1e-4, 1e-3, 1e-2, 1e-1]);
    let pick = || {
        let out = train_grid(PenaltyFamily::Eye, &grid, &splits, &r, &TrainConfig::default(), 11).unwrap();
        let kept = bootstrap_filter(&out.candidates, 0.05).unwrap();
        select_sparsest(&kept).unwrap().clone()
    };
    assert_eq!(pick(), pick());
}

fn candidate_sets() -> impl Strategy<Value = Vec<CandidateModel>> {
    prop::collection::vec((prop::collection::vec(0.4..0.9f64, 20), 0.0..1.0f64), 1..8).prop_map(|raw| {
        raw.into_iter()
            .enumerate()
            .map(|(i, (aucs, gini))| candidate(i, 10f64.powi(i as i32 - 4), gini, aucs))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn filter_keeps_a_subset_with_the_best(cands in candidate_sets(), alpha in 0.0..1.0f64) {
        let kept = bootstrap_filter(&cands, alpha).unwrap();
        prop_assert!(kept.iter().all(|k| cands.contains(k)));
        let best = cands
            .iter()
            .max_by(|a, b| a.mean_val_auc().total_cmp(&b.mean_val_auc()).then(b.grid_index.cmp(&a.grid_index)))
            .unwrap();
        prop_assert!(kept.iter().any(|k| k.grid_index == best.grid_index));
    }

    #[test]
    fn raising_alpha_never_grows_the_set(cands in candidate_sets(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let loose = bootstrap_filter(&cands, lo).unwrap();
        let strict = bootstrap_filter(&cands, hi).unwrap();
        prop_assert!(strict.iter().all(|c| loose.contains(c)));
    }

    #[test]
    fn sparsest_pick_has_the_top_gini(cands in candidate_sets()) {
        let pick = select_sparsest(&cands).unwrap();
        prop_assert!(cands.iter().all(|c| c.gini <= pick.gini));
    }
}
