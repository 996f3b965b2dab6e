use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        AdamConfig {
            learning_rate,
            ..Self::default()
        }
    }
}

/// Adam moments for a fixed list of parameter tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub config: AdamConfig,
    pub first_moment: Vec<Vec<f64>>,
    pub second_moment: Vec<Vec<f64>>,
    pub step_count: u64,
}

impl OptimizerState {
    /// Fresh state for tensors of the given lengths.
    pub fn new(config: AdamConfig, shapes: &[usize]) -> Self {
        OptimizerState {
            config,
            first_moment: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            second_moment: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            step_count: 0,
        }
    }

    /// One bias-corrected Adam update of every tensor in `params`.
    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) -> Result<()> {
        if params.len() != self.first_moment.len() || grads.len() != params.len() {
            return Err(Error::shape(
                "adam_step",
                format!("{} tensors", self.first_moment.len()),
                format!("{} params / {} grads", params.len(), grads.len()),
            ));
        }
        for (i, (p, g)) in params.iter().zip(grads).enumerate() {
            if p.len() != self.first_moment[i].len() || g.len() != p.len() {
                return Err(Error::shape(
                    "adam_step",
                    format!("tensor {i} of length {}", self.first_moment[i].len()),
                    format!("param {} / grad {}", p.len(), g.len()),
                ));
            }
        }

        self.step_count += 1;
        let AdamConfig {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        let t = self.step_count as i32;
        let correction1 = 1.0 - beta1.powi(t);
        let correction2 = 1.0 - beta2.powi(t);

        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.first_moment.iter_mut().zip(self.second_moment.iter_mut()))
        {
            for (((w, &gi), mi), vi) in p.iter_mut().zip(g.iter()).zip(m.iter_mut()).zip(v.iter_mut()) {
                *mi = beta1 * *mi + (1.0 - beta1) * gi;
                *vi = beta2 * *vi + (1.0 - beta2) * gi * gi;
                let m_hat = *mi / correction1;
                let v_hat = *vi / correction2;
                *w -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
        Ok(())
    }
}

/// Free-function form of [`OptimizerState::step`].
pub fn adam_step(params: &mut [&mut [f64]], grads: &[&[f64]], state: &mut OptimizerState) -> Result<()> {
    state.step(params, grads)
}
