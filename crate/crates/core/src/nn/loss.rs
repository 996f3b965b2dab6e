use super::Matrix;
use crate::error::{Error, Result};

/// Probabilities are clamped to `[PROB_EPS, 1 - PROB_EPS]` before logs.
pub const PROB_EPS: f64 = 1e-7;

/// Mean of squared differences over every element.
pub fn mse_loss(reconstruction: &Matrix, target: &Matrix) -> Result<f64> {
    check_same_shape("mse_loss", reconstruction, target)?;
    let n = reconstruction.as_slice().len();
    if n == 0 {
        return Err(Error::Empty("mse_loss"));
    }
    let sum: f64 = reconstruction
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / n as f64)
}

/// d(mse)/d(reconstruction) = 2 (x̂ − x) / N.
pub fn mse_gradient(reconstruction: &Matrix, target: &Matrix) -> Result<Matrix> {
    check_same_shape("mse_gradient", reconstruction, target)?;
    let scale = 2.0 / reconstruction.as_slice().len() as f64;
    let data = reconstruction
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(a, b)| scale * (a - b))
        .collect();
    Matrix::from_vec(reconstruction.rows(), reconstruction.cols(), data)
}

fn check_same_shape(context: &'static str, a: &Matrix, b: &Matrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::shape(context, format!("{:?}", a.shape()), format!("{:?}", b.shape())));
    }
    Ok(())
}

fn check_labels(probabilities: &[f64], labels: &[f64]) -> Result<()> {
    if probabilities.len() != labels.len() {
        return Err(Error::shape("bce_loss", probabilities.len(), labels.len()));
    }
    if labels.is_empty() {
        return Err(Error::Empty("bce_loss"));
    }
    if let Some((index, &value)) = labels.iter().enumerate().find(|(_, &y)| y != 0.0 && y != 1.0) {
        return Err(Error::InvalidLabel { index, value });
    }
    Ok(())
}

#[inline]
fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_EPS, 1.0 - PROB_EPS)
}

/// Binary cross-entropy `−(1/N) Σ [y ln p + (1−y) ln(1−p)]` on clamped probabilities.
pub fn bce_loss(probabilities: &[f64], labels: &[f64]) -> Result<f64> {
    check_labels(probabilities, labels)?;
    let sum: f64 = probabilities
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = clamp_prob(p);
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum();
    Ok(sum / labels.len() as f64)
}

/// d(bce)/dp per sample, as an `N x 1` matrix. Zero where the clamp is active.
pub fn bce_gradient(probabilities: &[f64], labels: &[f64]) -> Result<Matrix> {
    check_labels(probabilities, labels)?;
    let n = labels.len() as f64;
    let data = probabilities
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            if !(PROB_EPS..=1.0 - PROB_EPS).contains(&p) {
                0.0
            } else {
                (-y / p + (1.0 - y) / (1.0 - p)) / n
            }
        })
        .collect();
    Matrix::from_vec(labels.len(), 1, data)
}
