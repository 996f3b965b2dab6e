use serde::{Deserialize, Serialize};

use super::{Activation, DenseLayer, LayerCache, Matrix, Rng};
use crate::error::{Error, Result};

/// Gradient of a scalar loss with respect to one layer's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl LayerGradient {
    pub fn zeros_like(layer: &DenseLayer) -> Self {
        LayerGradient {
            weights: Matrix::zeros(layer.fan_in(), layer.fan_out()),
            bias: vec![0.0; layer.fan_out()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.weights.as_slice().iter().chain(&self.bias).all(|&g| g == 0.0)
    }
}

/// A stack of dense layers applied in order.
///
/// Training forward passes cache per-layer state inside the network; the
/// network is therefore single-writer while training. [`Network::forward`]
/// does not touch the cache and is safe to call concurrently.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Network {
    pub layers: Vec<DenseLayer>,
    #[serde(skip)]
    cache: Option<Vec<LayerCache>>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.layers == other.layers
    }
}

impl Network {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        for pair in layers.windows(2) {
            if pair[0].fan_out() != pair[1].fan_in() {
                return Err(Error::shape("Network::new", pair[0].fan_out(), pair[1].fan_in()));
            }
        }
        Ok(Network { layers, cache: None })
    }

    /// Glorot-initialised network over `sizes` (`sizes.len() - 1` layers),
    /// drawing layer weights in order from `rng`.
    pub fn glorot(sizes: &[usize], activations: &[Activation], rng: &mut Rng) -> Result<Self> {
        if sizes.len() < 2 || activations.len() != sizes.len() - 1 {
            return Err(Error::InvalidArgument(format!(
                "{} sizes need {} activations, got {}",
                sizes.len(),
                sizes.len().saturating_sub(1),
                activations.len()
            )));
        }
        let layers = sizes
            .windows(2)
            .zip(activations)
            .map(|(w, &act)| DenseLayer::glorot(w[0], w[1], act, rng))
            .collect();
        Network::new(layers)
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, DenseLayer::fan_in)
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, DenseLayer::fan_out)
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::param_count).sum()
    }

    pub fn forward(&self, input: &Matrix) -> Result<Matrix> {
        let mut layers = self.layers.iter();
        let Some(first) = layers.next() else {
            return Ok(input.clone());
        };
        let mut x = first.forward(input)?;
        for layer in layers {
            x = layer.forward(&x)?;
        }
        Ok(x)
    }

    /// Forward pass that caches state for [`Network::backward`].
    pub fn forward_train(&mut self, input: &Matrix) -> Result<Matrix> {
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut x = input.clone();
        for layer in &self.layers {
            let c = layer.forward_cached(&x)?;
            x = c.output.clone();
            caches.push(c);
        }
        self.cache = Some(caches);
        Ok(x)
    }

    pub fn clear_cache(&mut self) {
        self.cache = None;
    }

    /// Backpropagates `output_gradient` (dLoss/dOutput of the last forward
    /// pass) and returns per-layer parameter gradients plus dLoss/dInput.
    /// Parameters are not modified.
    pub fn backward(&self, output_gradient: &Matrix) -> Result<(Vec<LayerGradient>, Matrix)> {
        let caches = self.cache.as_ref().ok_or(Error::NoForwardCache)?;
        let last = caches.last().map(|c| c.output.shape());
        if let Some(shape) = last {
            if shape != output_gradient.shape() {
                return Err(Error::shape("backward", format!("{shape:?}"), format!("{:?}", output_gradient.shape())));
            }
        }
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut upstream = output_gradient.clone();
        for (layer, cache) in self.layers.iter().zip(caches).rev() {
            let act = layer.activation;
            let mut delta = upstream;
            for ((d, &z), &a) in delta
                .as_mut_slice()
                .iter_mut()
                .zip(cache.pre_activation.as_slice())
                .zip(cache.output.as_slice())
            {
                *d *= act.derivative(z, a);
            }
            let weights = cache.input.transpose_matmul(&delta)?;
            let bias = delta.column_sums();
            upstream = delta.matmul_transpose(&layer.weights)?;
            grads.push(LayerGradient { weights, bias });
        }
        grads.reverse();
        Ok((grads, upstream))
    }

    /// Mutable views of every parameter tensor: `[W0, b0, W1, b1, ...]`.
    pub fn params_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.bias.as_mut_slice()])
            .collect()
    }

    pub fn param_shapes(&self) -> Vec<usize> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice().len(), l.bias.len()])
            .collect()
    }
}

/// Gradient views in the same order as [`Network::params_mut`].
pub fn gradient_slices(grads: &[LayerGradient]) -> Vec<&[f64]> {
    grads
        .iter()
        .flat_map(|g| [g.weights.as_slice(), g.bias.as_slice()])
        .collect()
}

/// Free-function form of [`Network::backward`].
pub fn backward(network: &Network, loss_gradient_at_output: &Matrix) -> Result<(Vec<LayerGradient>, Matrix)> {
    network.backward(loss_gradient_at_output)
}
