use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary confusion counts with the positive (default) class = 1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

impl std::ops::Add for ConfusionMatrix {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        ConfusionMatrix {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            tn: self.tn + o.tn,
            fn_: self.fn_ + o.fn_,
        }
    }
}

pub fn confusion(y_true: &[f64], y_pred: &[u8]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::shape("confusion", y_true.len(), y_pred.len()));
    }
    let mut cm = ConfusionMatrix::default();
    for (i, (&t, &p)) in y_true.iter().zip(y_pred).enumerate() {
        let positive_truth = match t {
            v if v == 1.0 => true,
            v if v == 0.0 => false,
            value => return Err(Error::InvalidLabel { index: i, value }),
        };
        let positive_pred = match p {
            1 => true,
            0 => false,
            other => {
                return Err(Error::InvalidLabel {
                    index: i,
                    value: f64::from(other),
                })
            }
        };
        match (positive_truth, positive_pred) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fn_ += 1,
            (false, true) => cm.fp += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    pub f1: f64,
    pub g_mean: f64,
    /// Metrics whose denominator was zero and were reported as 0.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undefined: Vec<String>,
}

impl MetricsReport {
    pub fn is_degenerate(&self) -> bool {
        !self.undefined.is_empty()
    }
}

fn ratio(num: usize, den: usize, name: &str, undefined: &mut Vec<String>) -> f64 {
    if den == 0 {
        undefined.push(name.to_string());
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Derived metrics; zero denominators yield 0 and are listed in `undefined`.
pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Empty("confusion matrix"));
    }
    let mut undefined = Vec::new();
    let recall = ratio(cm.tp, cm.tp + cm.fn_, "recall", &mut undefined);
    let specificity = ratio(cm.tn, cm.tn + cm.fp, "specificity", &mut undefined);
    let precision = ratio(cm.tp, cm.tp + cm.fp, "precision", &mut undefined);
    let f1 = if precision + recall == 0.0 {
        undefined.push("f1".into());
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(MetricsReport {
        accuracy: (cm.tp + cm.tn) as f64 / total as f64,
        precision,
        recall,
        specificity,
        f1,
        g_mean: (recall * specificity).sqrt(),
        undefined,
    })
}

/// Geometric mean of sensitivity and specificity.
pub fn g_mean(recall: f64, specificity: f64) -> f64 {
    (recall * specificity).sqrt()
}
