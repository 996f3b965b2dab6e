use serde::{Deserialize, Serialize};

use super::{Matrix, Rng};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
    Linear,
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => sigmoid(z),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    #[inline]
    pub fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Linear => 1.0,
        }
    }
}

/// Fully connected layer computing `act(x · W + b)`, with `W` stored
/// `[fan_in x fan_out]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

/// Values cached by a training forward pass for the backward pass.
#[derive(Debug, Clone)]
pub struct LayerCache {
    pub input: Matrix,
    pub pre_activation: Matrix,
    pub output: Matrix,
}

impl DenseLayer {
    pub fn new(weights: Matrix, bias: Vec<f64>, activation: Activation) -> Result<Self> {
        if bias.len() != weights.cols() {
            return Err(Error::shape("DenseLayer::new", weights.cols(), bias.len()));
        }
        Ok(DenseLayer {
            weights,
            bias,
            activation,
        })
    }

    pub fn zeros(fan_in: usize, fan_out: usize, activation: Activation) -> Self {
        DenseLayer {
            weights: Matrix::zeros(fan_in, fan_out),
            bias: vec![0.0; fan_out],
            activation,
        }
    }

    /// Glorot-uniform weights, zero biases.
    pub fn glorot(fan_in: usize, fan_out: usize, activation: Activation, rng: &mut Rng) -> Self {
        DenseLayer {
            weights: glorot_init(fan_in, fan_out, rng),
            bias: vec![0.0; fan_out],
            activation,
        }
    }

    pub fn fan_in(&self) -> usize {
        self.weights.rows()
    }

    pub fn fan_out(&self) -> usize {
        self.weights.cols()
    }

    pub fn param_count(&self) -> usize {
        self.weights.rows() * self.weights.cols() + self.bias.len()
    }

    fn linear(&self, input: &Matrix) -> Result<Matrix> {
        if input.cols() != self.fan_in() {
            return Err(Error::shape("dense_forward", format!("{} input columns", self.fan_in()), input.cols()));
        }
        let mut z = input.matmul(&self.weights)?;
        for r in 0..z.rows() {
            for (v, b) in z.row_mut(r).iter_mut().zip(&self.bias) {
                *v += b;
            }
        }
        Ok(z)
    }

    /// Inference forward pass.
    pub fn forward(&self, input: &Matrix) -> Result<Matrix> {
        let act = self.activation;
        Ok(self.linear(input)?.map(|z| act.apply(z)))
    }

    /// Forward pass that keeps the input and pre-activation for backprop.
    pub fn forward_cached(&self, input: &Matrix) -> Result<LayerCache> {
        let z = self.linear(input)?;
        let act = self.activation;
        let output = z.map(|v| act.apply(v));
        Ok(LayerCache {
            input: input.clone(),
            pre_activation: z,
            output,
        })
    }
}

/// Uniform entries in `[-L, L]` with `L = sqrt(6 / (fan_in + fan_out))`.
pub fn glorot_init(fan_in: usize, fan_out: usize, rng: &mut Rng) -> Matrix {
    assert!(fan_in >= 1 && fan_out >= 1, "glorot_init needs positive fan-in/fan-out");
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let data = (0..fan_in * fan_out).map(|_| rng.uniform(-limit, limit)).collect();
    Matrix::from_vec(fan_in, fan_out, data).expect("sized by construction")
}

/// Free-function form of [`DenseLayer::forward`].
pub fn dense_forward(layer: &DenseLayer, input: &Matrix) -> Result<Matrix> {
    layer.forward(input)
}
