use bsac::autoencoder::{sa_train, training_rngs, SAConfig};
use bsac::data::{generic_frame, read_csv, Dataset};
use bsac::ensemble::{select_gamma, train_bsac, train_bsac_with_sweep};
use bsac::eval::{confusion, gamma_sweep, metrics, run_cv};
use bsac::nn::{Matrix, Rng};
use bsac::synth::separable_blobs;
use bsac::Execution;

fn f1_on(model_labels: &[u8], ds: &Dataset) -> f64 {
    metrics(&confusion(&ds.labels, model_labels).unwrap()).unwrap().f1
}

fn toy_config(gamma: f64) -> SAConfig {
    SAConfig {
        layer_sizes: vec![2, 8, 4, 8, 2],
        gamma,
        epochs: 200,
        batch_size: 16,
        learning_rate: 1e-2,
        // Some draws leave every bottleneck relu dead on this 2-d toy.
        seed: 0,
    }
}

#[test]
fn gamma_zero_fits_separable_blobs() {
    let ds = separable_blobs(200, 0.5, 2, 0.2, 3);
    let model = sa_train(&toy_config(0.0), &ds.features, &ds.labels).unwrap();
    let (_, labels) = model.sa_predict(&ds.features).unwrap();
    let f1 = f1_on(&labels, &ds);
    assert!(f1 >= 0.95, "training F1 {f1}");
    let h = &model.history.epochs;
    assert_eq!(h.len(), 200);
    assert!(h[199].total < h[0].total);
}

#[test]
fn composite_loss_trends_down_for_mixed_gamma() {
    let ds = separable_blobs(200, 0.5, 2, 0.2, 5);
    let model = sa_train(&toy_config(0.5), &ds.features, &ds.labels).unwrap();
    let h = &model.history.epochs;
    assert!(h[199].total < h[0].total);
    for e in h {
        assert!((e.total - (0.5 * e.reconstruction + 0.5 * e.prediction)).abs() < 1e-12);
    }
}

#[test]
fn same_seed_same_weights() {
    let ds = separable_blobs(60, 0.3, 3, 0.2, 1);
    let cfg = SAConfig {
        layer_sizes: vec![3, 2, 3],
        epochs: 10,
        batch_size: 8,
        ..SAConfig::default()
    };
    let a = sa_train(&cfg, &ds.features, &ds.labels).unwrap();
    let b = sa_train(&cfg, &ds.features, &ds.labels).unwrap();
    assert_eq!(a, b);
    let c = sa_train(&SAConfig { seed: 99, ..cfg }, &ds.features, &ds.labels).unwrap();
    assert_ne!(a, c);
}

#[test]
fn reconstructs_tiny_binary_dataset() {
    // 20 samples of 4 binary features with an identity-friendly architecture.
    let mut rng = Rng::new(4);
    let rows: Vec<Vec<f64>> = (0..20)
        .map(|_| (0..4).map(|_| (rng.below(2)) as f64).collect())
        .collect();
    let x = Matrix::from_rows(&rows).unwrap();
    let y: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let cfg = SAConfig {
        layer_sizes: vec![4, 16, 8, 16, 4],
        gamma: 1.0,
        epochs: 1500,
        batch_size: 20,
        learning_rate: 1e-2,
        seed: 2,
    };
    let model = sa_train(&cfg, &x, &y).unwrap();
    let (recon, _) = model.sa_forward(&x).unwrap();
    let mse = bsac::nn::mse_loss(&recon, &x).unwrap();
    assert!(mse < 0.01, "reconstruction MSE {mse}");
}

fn split(ds: &Dataset) -> (Dataset, Dataset) {
    let train: Vec<usize> = (0..ds.rows()).filter(|i| i % 4 != 0).collect();
    let val: Vec<usize> = (0..ds.rows()).filter(|i| i % 4 == 0).collect();
    (ds.select_rows(&train), ds.select_rows(&val))
}

fn small_config() -> SAConfig {
    SAConfig {
        layer_sizes: vec![3, 4, 2, 4, 3],
        epochs: 15,
        batch_size: 32,
        learning_rate: 1e-2,
        ..SAConfig::default()
    }
}

#[test]
fn sweep_argmax_matches_selected_gamma() {
    let ds = separable_blobs(240, 0.2, 3, 0.45, 8);
    let (train, val) = split(&ds);
    let grid = [0.9, 0.5, 0.1];
    let sweep = gamma_sweep(&train, &val, &small_config(), &grid, &mut Rng::new(5), Execution::default()).unwrap();
    assert_eq!(sweep.len(), 4 * grid.len());
    assert!(sweep.iter().all(|r| (0.0..=1.0).contains(&r.f1)));
    let model = train_bsac(&train, &val, &small_config(), &grid, &mut Rng::new(5), Execution::default()).unwrap();
    assert_eq!(model.base_models.len(), 4);
    for s in 0..4 {
        let rows: Vec<_> = sweep.iter().filter(|r| r.subset_id == s).copied().collect();
        assert_eq!(model.gammas[s], rows[select_gamma(&rows).unwrap()].gamma);
        assert_eq!(model.base_models[s].gamma, model.gammas[s]);
    }
}

#[test]
fn single_point_grid_is_used_everywhere() {
    let ds = separable_blobs(120, 0.25, 3, 0.3, 2);
    let (train, val) = split(&ds);
    let model = train_bsac(&train, &val, &small_config(), &[0.3], &mut Rng::new(1), Execution::Sequential).unwrap();
    assert!(model.gammas.iter().all(|&g| g == 0.3));
}

#[test]
fn sequential_and_parallel_pools_are_identical() {
    let ds = separable_blobs(160, 0.25, 3, 0.4, 6);
    let (train, val) = split(&ds);
    let grid = [0.2, 0.8];
    let a = train_bsac_with_sweep(&train, &val, &small_config(), &grid, &mut Rng::new(3), Execution::Sequential).unwrap();
    let b = train_bsac_with_sweep(&train, &val, &small_config(), &grid, &mut Rng::new(3), Execution::Parallel).unwrap();
    assert_eq!(a.model, b.model);
    assert_eq!(a.sweep, b.sweep);
    assert_eq!(a.subsets, b.subsets);
}

fn blobs_frame(n: usize, seed: u64) -> bsac::data::FeatureFrame {
    let ds = separable_blobs(n, 0.2, 4, 0.2, seed);
    let mut csv = Vec::new();
    ds.write_csv(&mut csv).unwrap();
    let table = read_csv(csv.as_slice(), "blobs", &[]).unwrap();
    generic_frame(&table, "label", true).unwrap()
}

#[test]
fn cross_validation_on_separable_data() {
    let frame = blobs_frame(300, 12);
    let cfg = SAConfig {
        layer_sizes: vec![4, 6, 3, 6, 4],
        epochs: 60,
        batch_size: 16,
        learning_rate: 1e-2,
        ..SAConfig::default()
    };
    let out = run_cv(&frame, &cfg, &[0.1, 0.5], 5, &mut Rng::new(7), Execution::default()).unwrap();
    assert_eq!(out.report.folds.len(), 5);
    for f in &out.report.folds {
        // Three of five folds train each pool.
        assert_eq!(f.train_rows, 180);
        assert_eq!(f.test_rows, 60);
        assert_eq!(f.gammas.len(), 4);
    }
    assert_eq!(out.sweep.len(), 5 * 4 * 2);
    assert!(out.report.mean.f1 >= 0.95, "mean F1 {}", out.report.mean.f1);
}

#[test]
fn cross_validation_is_schedule_independent() {
    let frame = blobs_frame(150, 2);
    let cfg = SAConfig {
        layer_sizes: vec![4, 3, 4],
        epochs: 5,
        batch_size: 32,
        ..SAConfig::default()
    };
    let a = run_cv(&frame, &cfg, &[0.5], 3, &mut Rng::new(1), Execution::Sequential).unwrap();
    let b = run_cv(&frame, &cfg, &[0.5], 3, &mut Rng::new(1), Execution::Parallel).unwrap();
    assert_eq!(a.report, b.report);
    assert_eq!(a.sweep, b.sweep);
}

#[test]
fn training_rng_streams_are_exposed_for_reuse() {
    let (mut a, mut b) = training_rngs(5);
    assert_ne!(a.next_u64(), b.next_u64());
}
