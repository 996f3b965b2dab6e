//! Dense feed-forward network engine.

mod adam;
mod gradcheck;
mod layer;
mod loss;
mod matrix;
mod network;
mod rng;

pub use adam::{adam_step, AdamConfig, OptimizerState};
pub use gradcheck::{GRADCHECK_FLOOR, finite_diff_gradcheck, gradcheck, Differentiable, LossSpec};
pub(crate) use gradcheck::{flat_param, set_flat_param};
pub use layer::{dense_forward, glorot_init, sigmoid, Activation, DenseLayer, LayerCache};
pub use loss::{bce_gradient, bce_loss, mse_gradient, mse_loss, PROB_EPS};
pub use matrix::Matrix;
pub use network::{backward, gradient_slices, LayerGradient, Network};
pub use rng::{derive_seed, splitmix64, Rng};
