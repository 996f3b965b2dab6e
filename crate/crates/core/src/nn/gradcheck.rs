//! Central finite-difference verification of analytic gradients.

use super::{bce_gradient, bce_loss, gradient_slices, mse_gradient, mse_loss, Matrix, Network};
use crate::error::{Error, Result};

/// Denominator floor for the relative error.
pub const GRADCHECK_FLOOR: f64 = 1e-6;

/// A scalar objective over a flat parameter vector with an analytic gradient.
pub trait Differentiable {
    fn param_count(&self) -> usize;
    fn param(&self, i: usize) -> f64;
    fn set_param(&mut self, i: usize, value: f64);
    fn loss(&mut self) -> Result<f64>;
    /// Analytic gradient, flattened in parameter-index order.
    fn gradient(&mut self) -> Result<Vec<f64>>;
}

/// Perturbs every parameter by ±h and returns the largest
/// `|analytic − numeric| / max(|analytic|, |numeric|, 1e-6)`.
///
/// The floor keeps O(ε/h) cancellation noise on vanishing gradients from
/// reading as a relative error of 1.
pub fn gradcheck<D: Differentiable + ?Sized>(model: &mut D, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step h must be positive, got {h}")));
    }
    let analytic = model.gradient()?;
    if analytic.len() != model.param_count() {
        return Err(Error::shape("gradcheck", model.param_count(), analytic.len()));
    }
    let mut worst = 0.0f64;
    for (i, &a) in analytic.iter().enumerate() {
        let original = model.param(i);
        model.set_param(i, original + h);
        let plus = model.loss()?;
        model.set_param(i, original - h);
        let minus = model.loss()?;
        model.set_param(i, original);
        let numeric = (plus - minus) / (2.0 * h);
        let denom = a.abs().max(numeric.abs()).max(GRADCHECK_FLOOR);
        worst = worst.max((a - numeric).abs() / denom);
    }
    Ok(worst)
}

/// Which loss sits on top of a network during a gradient check.
#[derive(Debug, Clone)]
pub enum LossSpec {
    /// Mean squared error against a target of the output's shape.
    Mse(Matrix),
    /// Binary cross-entropy on a single-column output.
    Bce(Vec<f64>),
}

pub(crate) fn flat_param(net: &Network, mut i: usize) -> f64 {
    for layer in &net.layers {
        let w = layer.weights.as_slice().len();
        if i < w {
            return layer.weights.as_slice()[i];
        }
        i -= w;
        if i < layer.bias.len() {
            return layer.bias[i];
        }
        i -= layer.bias.len();
    }
    panic!("parameter index out of range");
}

pub(crate) fn set_flat_param(net: &mut Network, mut i: usize, value: f64) {
    for layer in &mut net.layers {
        let w = layer.weights.as_slice().len();
        if i < w {
            layer.weights.as_mut_slice()[i] = value;
            return;
        }
        i -= w;
        if i < layer.bias.len() {
            layer.bias[i] = value;
            return;
        }
        i -= layer.bias.len();
    }
    panic!("parameter index out of range");
}

struct NetworkObjective<'a> {
    network: Network,
    batch: &'a Matrix,
    loss: &'a LossSpec,
}

impl NetworkObjective<'_> {
    fn output_loss(&self, out: &Matrix) -> Result<(f64, Matrix)> {
        match self.loss {
            LossSpec::Mse(target) => Ok((mse_loss(out, target)?, mse_gradient(out, target)?)),
            LossSpec::Bce(labels) => {
                if out.cols() != 1 {
                    return Err(Error::shape("bce output", 1, out.cols()));
                }
                let p = out.as_slice();
                Ok((bce_loss(p, labels)?, bce_gradient(p, labels)?))
            }
        }
    }
}

impl Differentiable for NetworkObjective<'_> {
    fn param_count(&self) -> usize {
        self.network.param_count()
    }

    fn param(&self, i: usize) -> f64 {
        flat_param(&self.network, i)
    }

    fn set_param(&mut self, i: usize, value: f64) {
        set_flat_param(&mut self.network, i, value);
    }

    fn loss(&mut self) -> Result<f64> {
        let out = self.network.forward(self.batch)?;
        Ok(self.output_loss(&out)?.0)
    }

    fn gradient(&mut self) -> Result<Vec<f64>> {
        let out = self.network.forward_train(self.batch)?;
        let (_, seed) = self.output_loss(&out)?;
        let (grads, _) = self.network.backward(&seed)?;
        Ok(gradient_slices(&grads).concat())
    }
}

/// Gradient check of `network` on `batch` under `loss`. The network itself
/// is not modified.
pub fn finite_diff_gradcheck(network: &Network, batch: &Matrix, loss: &LossSpec, h: f64) -> Result<f64> {
    if batch.rows() == 0 {
        return Err(Error::Empty("gradcheck batch"));
    }
    let mut objective = NetworkObjective {
        network: network.clone(),
        batch,
        loss,
    };
    gradcheck(&mut objective, h)
}
