//! Supervised autoencoder: a symmetric encoder/decoder pair with a single
//! sigmoid classification unit attached to the bottleneck, trained on
//! `gamma * L_r + (1 - gamma) * L_p` where `L_r` is the reconstruction MSE
//! and `L_p` the prediction cross-entropy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{
    bce_gradient, bce_loss, flat_param, gradcheck, gradient_slices, mse_gradient, mse_loss, set_flat_param,
    Activation, AdamConfig, Differentiable, Matrix, Network, OptimizerState, Rng,
};

/// Stream id for weight initialisation, see [`training_rngs`].
pub const STREAM_INIT: u64 = 1;
/// Stream id for per-epoch batch shuffling, see [`training_rngs`].
pub const STREAM_SHUFFLE: u64 = 2;

/// Decision threshold on the positive-class probability; ties go positive.
pub const THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SAConfig {
    /// Palindromic, odd length; first = last = input dimension, middle = bottleneck.
    pub layer_sizes: Vec<usize>,
    pub gamma: f64,
    pub epochs: usize,
    /// Rows per mini-batch; 0 or anything ≥ the row count means full batch.
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl SAConfig {
    /// Architecture used for the Taiwan credit data.
    pub fn taiwan() -> Self {
        SAConfig {
            layer_sizes: vec![32, 16, 8, 5, 8, 16, 32],
            ..Self::default()
        }
    }

    /// Architecture used for the Lending Club data.
    pub fn lending_club() -> Self {
        SAConfig {
            layer_sizes: vec![81, 60, 30, 15, 30, 60, 81],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_layer_sizes(&self.layer_sizes)?;
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidArgument(format!("gamma must be in [0, 1], got {}", self.gamma)));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes.first().copied().unwrap_or(0)
    }

    pub fn bottleneck(&self) -> usize {
        self.layer_sizes[self.layer_sizes.len() / 2]
    }
}

impl Default for SAConfig {
    fn default() -> Self {
        SAConfig {
            layer_sizes: vec![32, 16, 8, 5, 8, 16, 32],
            gamma: 0.5,
            epochs: 200,
            batch_size: 256,
            learning_rate: 1e-3,
            seed: 0,
        }
    }
}

pub fn validate_layer_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 3 || sizes.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "layer sizes need odd length >= 3, got {sizes:?}"
        )));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidArgument(format!("layer sizes must be positive: {sizes:?}")));
    }
    if sizes.iter().ne(sizes.iter().rev()) {
        return Err(Error::InvalidArgument(format!("layer sizes must be palindromic: {sizes:?}")));
    }
    Ok(())
}

/// Losses for one epoch, averaged over the epoch's samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub total: f64,
    pub reconstruction: f64,
    pub prediction: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingHistory {
    pub epochs: Vec<EpochLoss>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SAModel {
    pub encoder: Network,
    pub decoder: Network,
    /// Bottleneck → 1 sigmoid unit.
    pub head: Network,
    pub gamma: f64,
    #[serde(default)]
    pub history: TrainingHistory,
}

/// Composite loss and its two parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaLoss {
    pub total: f64,
    pub reconstruction: f64,
    pub prediction: f64,
}

/// `gamma * L_r + (1 - gamma) * L_p`, with both parts returned.
pub fn sa_loss(
    reconstruction: &Matrix,
    input: &Matrix,
    probabilities: &[f64],
    labels: &[f64],
    gamma: f64,
) -> Result<SaLoss> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!("gamma must be in [0, 1], got {gamma}")));
    }
    let lr = mse_loss(reconstruction, input)?;
    let lp = bce_loss(probabilities, labels)?;
    Ok(SaLoss {
        total: gamma * lr + (1.0 - gamma) * lp,
        reconstruction: lr,
        prediction: lp,
    })
}

/// The `(init, shuffle)` generators used by [`sa_train`] for `seed`.
pub fn training_rngs(seed: u64) -> (Rng, Rng) {
    let base = Rng::new(seed);
    (base.stream(&[STREAM_INIT]), base.stream(&[STREAM_SHUFFLE]))
}

/// Activations of the encoder stack `sizes[0] → … → bottleneck`: relu throughout.
pub fn encoder_activations(layer_sizes: &[usize]) -> Vec<Activation> {
    vec![Activation::Relu; layer_sizes.len() / 2]
}

/// Activations of the decoder stack: relu, with a sigmoid output layer.
pub fn decoder_activations(layer_sizes: &[usize]) -> Vec<Activation> {
    let n = layer_sizes.len() / 2;
    let mut acts = vec![Activation::Relu; n];
    acts[n - 1] = Activation::Sigmoid;
    acts
}

impl SAModel {
    /// Glorot-initialised model. Draw order from `rng`: encoder, head, decoder.
    pub fn init(layer_sizes: &[usize], gamma: f64, rng: &mut Rng) -> Result<Self> {
        validate_layer_sizes(layer_sizes)?;
        let mid = layer_sizes.len() / 2;
        let encoder = Network::glorot(&layer_sizes[..=mid], &encoder_activations(layer_sizes), rng)?;
        let head = Network::glorot(&[layer_sizes[mid], 1], &[Activation::Sigmoid], rng)?;
        let decoder = Network::glorot(&layer_sizes[mid..], &decoder_activations(layer_sizes), rng)?;
        Ok(SAModel {
            encoder,
            decoder,
            head,
            gamma,
            history: TrainingHistory::default(),
        })
    }

    pub fn input_dim(&self) -> usize {
        self.encoder.input_dim()
    }

    pub fn bottleneck(&self) -> usize {
        self.encoder.output_dim()
    }

    /// Layer sizes from input through bottleneck back to output.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![self.encoder.input_dim()];
        sizes.extend(self.encoder.layers.iter().map(|l| l.fan_out()));
        sizes.extend(self.decoder.layers.iter().map(|l| l.fan_out()));
        sizes
    }

    fn check_input(&self, features: &Matrix) -> Result<()> {
        if features.cols() != self.input_dim() {
            return Err(Error::shape(
                "supervised autoencoder input",
                format!("{} columns", self.input_dim()),
                features.cols(),
            ));
        }
        Ok(())
    }

    /// Bottleneck representation.
    pub fn encode(&self, features: &Matrix) -> Result<Matrix> {
        self.check_input(features)?;
        self.encoder.forward(features)
    }

    /// Reconstruction and positive-class probabilities from the shared bottleneck.
    pub fn sa_forward(&self, batch: &Matrix) -> Result<(Matrix, Vec<f64>)> {
        let h = self.encode(batch)?;
        let reconstruction = self.decoder.forward(&h)?;
        let probabilities = self.head.forward(&h)?.into_vec();
        Ok((reconstruction, probabilities))
    }

    /// Probabilities and hard labels (1 where p ≥ 0.5).
    pub fn sa_predict(&self, features: &Matrix) -> Result<(Vec<f64>, Vec<u8>)> {
        let h = self.encode(features)?;
        let probabilities = self.head.forward(&h)?.into_vec();
        let labels = probabilities.iter().map(|&p| u8::from(p >= THRESHOLD)).collect();
        Ok((probabilities, labels))
    }

    /// Parameters in optimizer order: encoder, head, decoder.
    fn params_mut(&mut self) -> Vec<&mut [f64]> {
        let mut p = self.encoder.params_mut();
        p.extend(self.head.params_mut());
        p.extend(self.decoder.params_mut());
        p
    }

    fn param_shapes(&self) -> Vec<usize> {
        let mut s = self.encoder.param_shapes();
        s.extend(self.head.param_shapes());
        s.extend(self.decoder.param_shapes());
        s
    }

    fn param_count(&self) -> usize {
        self.encoder.param_count() + self.head.param_count() + self.decoder.param_count()
    }

    /// One forward/backward pass of the composite loss on a batch. Returns
    /// the loss and flattened gradients in optimizer order.
    fn loss_and_gradients(&mut self, x: &Matrix, y: &[f64], gamma: f64) -> Result<(SaLoss, Vec<Vec<f64>>)> {
        let h = self.encoder.forward_train(x)?;
        let reconstruction = self.decoder.forward_train(&h)?;
        let probabilities = self.head.forward_train(&h)?.into_vec();
        let loss = sa_loss(&reconstruction, x, &probabilities, y, gamma)?;

        let mut grad_r = mse_gradient(&reconstruction, x)?;
        grad_r.scale_in_place(gamma);
        let mut grad_p = bce_gradient(&probabilities, y)?;
        grad_p.scale_in_place(1.0 - gamma);

        let (dec_grads, mut dh) = self.decoder.backward(&grad_r)?;
        let (head_grads, dh_head) = self.head.backward(&grad_p)?;
        dh.add_assign(&dh_head)?;
        let (enc_grads, _) = self.encoder.backward(&dh)?;

        let mut flat: Vec<Vec<f64>> = gradient_slices(&enc_grads).into_iter().map(<[f64]>::to_vec).collect();
        flat.extend(gradient_slices(&head_grads).into_iter().map(<[f64]>::to_vec));
        flat.extend(gradient_slices(&dec_grads).into_iter().map(<[f64]>::to_vec));
        Ok((loss, flat))
    }

    fn clear_caches(&mut self) {
        self.encoder.clear_cache();
        self.decoder.clear_cache();
        self.head.clear_cache();
    }
}

pub(crate) fn check_binary(labels: &[f64]) -> Result<()> {
    match labels.iter().enumerate().find(|(_, &y)| y != 0.0 && y != 1.0) {
        Some((index, &value)) => Err(Error::InvalidLabel { index, value }),
        None => Ok(()),
    }
}

/// Mini-batch index lists for one epoch over `order`.
pub fn batches(order: &[usize], batch_size: usize) -> std::slice::Chunks<'_, usize> {
    let size = if batch_size == 0 || batch_size >= order.len() {
        order.len().max(1)
    } else {
        batch_size
    };
    order.chunks(size)
}

/// Trains a supervised autoencoder for exactly `config.epochs` epochs with
/// Adam, reshuffling the rows every epoch.
pub fn sa_train(config: &SAConfig, features: &Matrix, labels: &[f64]) -> Result<SAModel> {
    config.validate()?;
    if features.rows() == 0 {
        return Err(Error::Empty("training set"));
    }
    if labels.len() != features.rows() {
        return Err(Error::shape("sa_train labels", features.rows(), labels.len()));
    }
    if features.cols() != config.input_dim() {
        return Err(Error::shape(
            "sa_train features",
            format!("{} columns", config.input_dim()),
            features.cols(),
        ));
    }
    check_binary(labels)?;

    let (mut init_rng, mut shuffle_rng) = training_rngs(config.seed);
    let mut model = SAModel::init(&config.layer_sizes, config.gamma, &mut init_rng)?;
    let positives = labels.iter().filter(|&&y| y == 1.0).count();
    if positives == 0 || positives == labels.len() {
        let msg = format!("single-class training labels ({positives} of {} positive)", labels.len());
        log::warn!("{msg}");
        model.history.warnings.push(msg);
    }

    let mut optimizer = OptimizerState::new(AdamConfig::with_learning_rate(config.learning_rate), &model.param_shapes());
    let mut order: Vec<usize> = (0..features.rows()).collect();
    let n = features.rows() as f64;

    for _ in 0..config.epochs {
        shuffle_rng.shuffle(&mut order);
        let mut sums = [0.0f64; 3];
        for batch in batches(&order, config.batch_size) {
            let x = features.select_rows(batch);
            let y: Vec<f64> = batch.iter().map(|&i| labels[i]).collect();
            let (loss, grads) = model.loss_and_gradients(&x, &y, config.gamma)?;
            let grad_refs: Vec<&[f64]> = grads.iter().map(Vec::as_slice).collect();
            optimizer.step(&mut model.params_mut(), &grad_refs)?;
            let w = batch.len() as f64;
            sums[0] += loss.total * w;
            sums[1] += loss.reconstruction * w;
            sums[2] += loss.prediction * w;
        }
        model.history.epochs.push(EpochLoss {
            total: sums[0] / n,
            reconstruction: sums[1] / n,
            prediction: sums[2] / n,
        });
    }
    model.clear_caches();
    Ok(model)
}

struct CompositeObjective<'a> {
    model: SAModel,
    x: &'a Matrix,
    y: &'a [f64],
    gamma: f64,
}

impl CompositeObjective<'_> {
    fn locate(&self, i: usize) -> (usize, usize) {
        let e = self.model.encoder.param_count();
        let h = self.model.head.param_count();
        if i < e {
            (0, i)
        } else if i < e + h {
            (1, i - e)
        } else {
            (2, i - e - h)
        }
    }
}

impl Differentiable for CompositeObjective<'_> {
    fn param_count(&self) -> usize {
        self.model.param_count()
    }

    fn param(&self, i: usize) -> f64 {
        match self.locate(i) {
            (0, j) => flat_param(&self.model.encoder, j),
            (1, j) => flat_param(&self.model.head, j),
            (_, j) => flat_param(&self.model.decoder, j),
        }
    }

    fn set_param(&mut self, i: usize, value: f64) {
        match self.locate(i) {
            (0, j) => set_flat_param(&mut self.model.encoder, j, value),
            (1, j) => set_flat_param(&mut self.model.head, j, value),
            (_, j) => set_flat_param(&mut self.model.decoder, j, value),
        }
    }

    fn loss(&mut self) -> Result<f64> {
        let (r, p) = self.model.sa_forward(self.x)?;
        Ok(sa_loss(&r, self.x, &p, self.y, self.gamma)?.total)
    }

    fn gradient(&mut self) -> Result<Vec<f64>> {
        let (_, grads) = self.model.loss_and_gradients(self.x, self.y, self.gamma)?;
        Ok(grads.concat())
    }
}

/// Finite-difference check of the composite-loss gradient over every
/// encoder, head and decoder parameter.
pub fn sa_gradcheck(model: &SAModel, x: &Matrix, y: &[f64], gamma: f64, h: f64) -> Result<f64> {
    let mut objective = CompositeObjective {
        model: model.clone(),
        x,
        y,
        gamma,
    };
    gradcheck(&mut objective, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_model(sizes: &[usize]) -> SAModel {
        let mut m = SAModel::init(sizes, 0.5, &mut Rng::new(0)).unwrap();
        for net in [&mut m.encoder, &mut m.decoder, &mut m.head] {
            for p in net.params_mut() {
                p.fill(0.0);
            }
        }
        m
    }

    #[test]
    fn config_validation() {
        assert!(SAConfig::taiwan().validate().is_ok());
        let mut c = SAConfig::taiwan();
        c.layer_sizes = vec![4, 2, 3];
        assert!(c.validate().is_err());
        c.layer_sizes = vec![4, 2, 2, 4];
        assert!(c.validate().is_err());
        let mut c = SAConfig::taiwan();
        c.gamma = 1.5;
        assert!(c.validate().is_err());
        c.gamma = 0.5;
        c.epochs = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn forward_shapes_and_ranges() {
        let m = SAModel::init(&[6, 4, 2, 4, 6], 0.3, &mut Rng::new(1)).unwrap();
        let mut rng = Rng::new(2);
        let x = Matrix::from_vec(5, 6, (0..30).map(|_| rng.next_f64()).collect()).unwrap();
        let (r, p) = m.sa_forward(&x).unwrap();
        assert_eq!(r.shape(), (5, 6));
        assert_eq!(p.len(), 5);
        assert!(p.iter().all(|&v| v > 0.0 && v < 1.0));
        assert!(m.sa_forward(&Matrix::zeros(1, 5)).is_err());
    }

    #[test]
    fn zero_model_predicts_half_and_positive() {
        let m = zero_model(&[3, 2, 3]);
        let x = Matrix::from_rows(&[[0.2, 0.4, 0.9], [1.0, 0.0, 0.5]]).unwrap();
        let (p, labels) = m.sa_predict(&x).unwrap();
        assert_eq!(p, vec![0.5, 0.5]);
        assert_eq!(labels, vec![1, 1]);
    }

    #[test]
    fn raising_head_bias_never_flips_positive_to_negative() {
        let mut m = SAModel::init(&[4, 3, 2, 3, 4], 0.5, &mut Rng::new(4)).unwrap();
        let mut rng = Rng::new(5);
        let x = Matrix::from_vec(50, 4, (0..200).map(|_| rng.next_f64()).collect()).unwrap();
        let (_, before) = m.sa_predict(&x).unwrap();
        m.head.layers[0].bias[0] += 0.7;
        let (_, after) = m.sa_predict(&x).unwrap();
        for (b, a) in before.iter().zip(&after) {
            assert!(!(*b == 1 && *a == 0));
        }
    }

    #[test]
    fn encode_output_width_follows_architecture() {
        let x = Matrix::zeros(2, 32);
        let m = SAModel::init(&SAConfig::taiwan().layer_sizes, 0.5, &mut Rng::new(0)).unwrap();
        assert_eq!(m.encode(&x).unwrap().cols(), 5);
        let m = SAModel::init(&SAConfig::lending_club().layer_sizes, 0.5, &mut Rng::new(0)).unwrap();
        assert_eq!(m.encode(&Matrix::zeros(2, 81)).unwrap().cols(), 15);
        let z = zero_model(&[4, 3, 4]);
        assert!(z.encode(&Matrix::zeros(3, 4)).unwrap().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn loss_endpoints_and_arithmetic() {
        let x = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let r = Matrix::from_rows(&[[0.2, 0.7], [0.9, 0.4]]).unwrap();
        let p = [0.3, 0.8];
        let y = [1.0, 0.0];
        let one = sa_loss(&r, &x, &p, &y, 1.0).unwrap();
        assert_eq!(one.total, one.reconstruction);
        let zero = sa_loss(&r, &x, &p, &y, 0.0).unwrap();
        assert_eq!(zero.total, zero.prediction);
        let half = 0.5 * 2.0 + 0.5 * 0.6;
        assert!((half - 1.3f64).abs() < 1e-15);
        assert!(sa_loss(&r, &x, &p, &y, -0.1).is_err());
    }

    #[test]
    fn composite_gradient_matches_finite_differences() {
        let m = SAModel::init(&[4, 3, 2, 3, 4], 0.5, &mut Rng::new(8)).unwrap();
        let x = Matrix::from_rows(&[[0.1, 0.9, 0.4, 0.6], [0.8, 0.3, 0.5, 0.2], [0.5, 0.5, 0.9, 0.1]]).unwrap();
        let y = [1.0, 0.0, 1.0];
        for gamma in [0.0, 0.37, 1.0] {
            let err = sa_gradcheck(&m, &x, &y, gamma, 1e-5).unwrap();
            assert!(err < 1e-4, "gamma {gamma}: {err}");
        }
    }

    #[test]
    fn gamma_one_total_equals_reconstruction_every_epoch() {
        let mut rng = Rng::new(3);
        let x = Matrix::from_vec(40, 4, (0..160).map(|_| rng.next_f64()).collect()).unwrap();
        let y: Vec<f64> = (0..40).map(|i| (i % 2) as f64).collect();
        let cfg = SAConfig {
            layer_sizes: vec![4, 3, 2, 3, 4],
            gamma: 1.0,
            epochs: 5,
            batch_size: 16,
            learning_rate: 1e-2,
            seed: 1,
        };
        let m = sa_train(&cfg, &x, &y).unwrap();
        assert_eq!(m.history.epochs.len(), 5);
        for e in &m.history.epochs {
            assert_eq!(e.total, e.reconstruction);
            assert!(e.prediction > 0.0);
        }
    }

    #[test]
    fn single_class_labels_train_with_warning() {
        let x = Matrix::from_rows(&[[0.1, 0.2], [0.3, 0.4]]).unwrap();
        let cfg = SAConfig {
            layer_sizes: vec![2, 1, 2],
            epochs: 2,
            ..SAConfig::default()
        };
        let m = sa_train(&cfg, &x, &[0.0, 0.0]).unwrap();
        assert_eq!(m.history.warnings.len(), 1);
        assert!(sa_train(&cfg, &Matrix::zeros(0, 2), &[]).is_err());
        assert!(sa_train(&cfg, &x, &[0.0, 2.0]).is_err());
    }

    #[test]
    fn batches_cover_order() {
        let order: Vec<usize> = (0..10).collect();
        let sizes: Vec<usize> = batches(&order, 4).map(<[usize]>::len).collect();
        assert_eq!(sizes, vec![4, 4, 2]);
        assert_eq!(batches(&order, 0).count(), 1);
        assert_eq!(batches(&order, 256).count(), 1);
    }
}
