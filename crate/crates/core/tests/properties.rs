use proptest::prelude::*;

use bsac::autoencoder::{sa_loss, SAModel};
use bsac::ensemble::{imbalance_ratio, majority_vote, make_balanced_subsets};
use bsac::eval::{fold_members, metrics, stratified_kfold, ConfusionMatrix};
use bsac::nn::{bce_loss, mse_loss, Activation, Matrix, Rng};

fn labels(p: usize, n: usize, rng: &mut Rng) -> Vec<f64> {
    let mut y = vec![1.0; p];
    y.extend(std::iter::repeat_n(0.0, n));
    rng.shuffle(&mut y);
    y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn balanced_subsets_partition_majority(p in 1usize..60, ratio in 1usize..=20, extra in 0usize..59, seed: u64) {
        let n = p * ratio + extra % p;
        let y = labels(p, n, &mut Rng::new(seed));
        let subsets = make_balanced_subsets(&y, &mut Rng::new(seed ^ 1)).unwrap();
        let k = n / p;
        prop_assert_eq!(subsets.len(), k);
        prop_assert_eq!(imbalance_ratio(&y).unwrap().1, k);

        let minority: Vec<usize> = (0..y.len()).filter(|&i| y[i] == 1.0).collect();
        let mut all = Vec::new();
        let sizes: Vec<usize> = subsets.iter().map(|s| s.majority_indices.len()).collect();
        for s in &subsets {
            prop_assert_eq!(&s.minority_indices, &minority);
            prop_assert!(s.majority_indices.iter().all(|&i| y[i] == 0.0));
            all.extend_from_slice(&s.majority_indices);
        }
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        prop_assert!(sizes.iter().all(|&s| s == n / k || s == n.div_ceil(k)));
        all.sort_unstable();
        let expected: Vec<usize> = (0..y.len()).filter(|&i| y[i] == 0.0).collect();
        prop_assert_eq!(all, expected);
    }

    #[test]
    fn vote_is_order_invariant_and_monotone(votes in prop::collection::vec(0u8..=1, 1..12), seed: u64) {
        let base = majority_vote(&votes);
        let positives = votes.iter().filter(|&&v| v == 1).count();
        prop_assert_eq!(base, u8::from(positives * 2 >= votes.len()));
        let mut shuffled = votes.clone();
        Rng::new(seed).shuffle(&mut shuffled);
        prop_assert_eq!(majority_vote(&shuffled), base);
        for i in 0..votes.len() {
            if votes[i] == 0 {
                let mut flipped = votes.clone();
                flipped[i] = 1;
                prop_assert!(!(base == 1 && majority_vote(&flipped) == 0));
            }
        }
    }

    #[test]
    fn stratified_folds_are_balanced(n in 30usize..300, pos_frac in 0.05f64..0.5, k in 3usize..8, seed: u64) {
        let p = ((n as f64 * pos_frac) as usize).max(k);
        prop_assume!(n - p >= k);
        let y = labels(p, n - p, &mut Rng::new(seed));
        let folds = stratified_kfold(&y, k, &mut Rng::new(seed)).unwrap();
        let members = fold_members(&folds, k);
        let sizes: Vec<usize> = members.iter().map(Vec::len).collect();
        let pos: Vec<usize> = members.iter().map(|m| m.iter().filter(|&&i| y[i] == 1.0).count()).collect();
        prop_assert_eq!(sizes.iter().sum::<usize>(), n);
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        prop_assert!(pos.iter().max().unwrap() - pos.iter().min().unwrap() <= 1);
    }

    #[test]
    fn metric_identities(tp in 0usize..500, fp in 0usize..500, tn in 0usize..500, fn_ in 0usize..500) {
        prop_assume!(tp + fn_ > 0 && tn + fp > 0);
        let cm = ConfusionMatrix { tp, fp, tn, fn_ };
        let m = metrics(&cm).unwrap();
        let lo = m.recall.min(m.specificity);
        let hi = m.recall.max(m.specificity);
        prop_assert!(m.g_mean >= lo - 1e-15 && m.g_mean <= hi + 1e-15);
        let total = cm.total() as f64;
        let pos = (tp + fn_) as f64 / total;
        prop_assert!((m.accuracy - (m.recall * pos + m.specificity * (1.0 - pos))).abs() < 1e-12);
        for v in [m.accuracy, m.precision, m.recall, m.specificity, m.f1, m.g_mean] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn mse_is_nonnegative_and_symmetric(a in prop::collection::vec(-5.0f64..5.0, 1..20), b_seed: u64) {
        let mut rng = Rng::new(b_seed);
        let b: Vec<f64> = a.iter().map(|_| rng.uniform(-5.0, 5.0)).collect();
        let ma = Matrix::from_vec(1, a.len(), a.clone()).unwrap();
        let mb = Matrix::from_vec(1, b.len(), b).unwrap();
        let ab = mse_loss(&ma, &mb).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ab, mse_loss(&mb, &ma).unwrap());
        prop_assert_eq!(mse_loss(&ma, &ma).unwrap(), 0.0);
    }

    #[test]
    fn bce_is_finite_and_nonnegative(p in prop::collection::vec(0.0f64..=1.0, 1..20), seed: u64) {
        let mut rng = Rng::new(seed);
        let y: Vec<f64> = p.iter().map(|_| rng.below(2) as f64).collect();
        let l = bce_loss(&p, &y).unwrap();
        prop_assert!(l.is_finite() && l >= 0.0);
    }

    #[test]
    fn activation_ranges(z in -50.0f64..50.0) {
        let s = Activation::Sigmoid.apply(z);
        prop_assert!((0.0..=1.0).contains(&s));
        if z.abs() < 30.0 {
            prop_assert!(s > 0.0 && s < 1.0);
        }
        let r = Activation::Relu.apply(z);
        prop_assert!(r >= 0.0);
        prop_assert_eq!(Activation::Relu.apply(r), r);
    }
}

#[test]
fn loss_decomposition_over_gamma_grid() {
    let mut rng = Rng::new(31);
    for trial in 0..20 {
        let rows = 1 + trial % 5;
        let cols = 1 + trial % 4;
        let x = Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.next_f64()).collect()).unwrap();
        let r = Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.next_f64()).collect()).unwrap();
        let p: Vec<f64> = (0..rows).map(|_| rng.next_f64()).collect();
        let y: Vec<f64> = (0..rows).map(|_| rng.below(2) as f64).collect();
        for g in 0..=10 {
            let gamma = g as f64 / 10.0;
            let l = sa_loss(&r, &x, &p, &y, gamma).unwrap();
            assert!((l.total - (gamma * l.reconstruction + (1.0 - gamma) * l.prediction)).abs() < 1e-12);
        }
    }
}

#[test]
fn untrained_models_give_probabilities_in_open_interval() {
    let mut rng = Rng::new(8);
    for seed in 0..10 {
        let m = SAModel::init(&[5, 3, 2, 3, 5], 0.5, &mut Rng::new(seed)).unwrap();
        let x = Matrix::from_vec(7, 5, (0..35).map(|_| rng.next_f64()).collect()).unwrap();
        let (r, p) = m.sa_forward(&x).unwrap();
        assert_eq!(r.shape(), (7, 5));
        assert!(r.is_finite());
        assert!(p.iter().all(|&v| v > 0.0 && v < 1.0));
    }
}

fn random_matrix(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.uniform(-1.0, 1.0)).collect()).unwrap()
}

#[test]
fn random_networks_pass_gradcheck() {
    use bsac::nn::{finite_diff_gradcheck, DenseLayer, LossSpec, Network};
    let acts = [Activation::Relu, Activation::Sigmoid, Activation::Linear];
    let mut rng = Rng::new(0x9c);
    let mut worst: f64 = 0.0;
    for trial in 0..50 {
        let depth = 1 + rng.below(3) as usize;
        let mut sizes: Vec<usize> = (0..=depth).map(|_| 1 + rng.below(8) as usize).collect();
        let bce = trial % 2 == 0;
        let mut activations: Vec<Activation> = (0..depth).map(|_| acts[rng.below(3) as usize]).collect();
        if bce {
            *sizes.last_mut().unwrap() = 1;
            *activations.last_mut().unwrap() = Activation::Sigmoid;
        }
        // Nonzero biases keep dead relu units off the kink at exactly zero.
        let layers = (0..depth)
            .map(|l| {
                let w = random_matrix(sizes[l], sizes[l + 1], &mut rng);
                let b = (0..sizes[l + 1]).map(|_| rng.uniform(-0.5, 0.5)).collect();
                DenseLayer::new(w, b, activations[l]).unwrap()
            })
            .collect();
        let net = Network::new(layers).unwrap();
        let batch = 1 + rng.below(4) as usize;
        let x = random_matrix(batch, sizes[0], &mut rng);
        let loss = if bce {
            LossSpec::Bce((0..batch).map(|_| rng.below(2) as f64).collect())
        } else {
            LossSpec::Mse(random_matrix(batch, sizes[depth], &mut rng))
        };
        worst = worst.max(finite_diff_gradcheck(&net, &x, &loss, 1e-5).unwrap());
    }
    assert!(worst < 1e-4, "worst relative error {worst}");
}

#[test]
fn composite_objective_passes_gradcheck() {
    use bsac::autoencoder::sa_gradcheck;
    let mut rng = Rng::new(0x9d);
    for trial in 0..10 {
        let d = 2 + rng.below(5) as usize;
        let b = 1 + rng.below(d as u64 - 1) as usize;
        let model = SAModel::init(&[d, b, d], 0.5, &mut rng).unwrap();
        let x = Matrix::from_vec(4, d, (0..4 * d).map(|_| rng.next_f64()).collect()).unwrap();
        let y: Vec<f64> = (0..4).map(|i| (i % 2) as f64).collect();
        let gamma = trial as f64 / 9.0;
        let err = sa_gradcheck(&model, &x, &y, gamma, 1e-5).unwrap();
        assert!(err < 1e-4, "trial {trial}: {err}");
    }
}
