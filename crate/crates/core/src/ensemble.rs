//! Balanced bagging of supervised autoencoders.
//!
//! The training partition's majority (negative) rows are shuffled and split
//! into `⌊n/p⌋` near-equal chunks; each chunk joined with every minority row
//! forms one balanced subset. One supervised autoencoder is trained per
//! subset and per candidate gamma; the candidate with the best validation F1
//! is kept, and the surviving pool predicts by majority vote.

use serde::{Deserialize, Serialize};

use crate::autoencoder::{sa_train, SAConfig, SAModel};
use crate::data::{Dataset, PreprocessParams};
use crate::error::{Error, Result};
use crate::eval::{confusion, metrics};
use crate::exec::Execution;
use crate::nn::{derive_seed, Matrix, Rng};

const STREAM_SUBSETS: u64 = 0x5b;
const STREAM_CANDIDATE: u64 = 0xca;

/// `(n / p, ⌊n / p⌋)` for negatives `n` and positives `p`.
pub fn imbalance_ratio(labels: &[f64]) -> Result<(f64, usize)> {
    crate::autoencoder::check_binary(labels)?;
    let p = labels.iter().filter(|&&y| y == 1.0).count();
    let n = labels.len() - p;
    if p == 0 || n == 0 {
        return Err(Error::SingleClass);
    }
    if p > n {
        return Err(Error::MajorityNotNegative {
            positives: p,
            negatives: n,
        });
    }
    Ok((n as f64 / p as f64, n / p))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedSubset {
    pub subset_id: usize,
    /// Every positive row of the training partition.
    pub minority_indices: Vec<usize>,
    /// This subset's chunk of the shuffled negative rows.
    pub majority_indices: Vec<usize>,
}

impl BalancedSubset {
    /// Minority rows followed by majority rows.
    pub fn indices(&self) -> Vec<usize> {
        let mut all = self.minority_indices.clone();
        all.extend_from_slice(&self.majority_indices);
        all
    }
}

/// Partitions the negatives into `⌊n/p⌋` chunks whose sizes differ by at
/// most one (the first `n mod k` chunks take the extra row) and pairs each
/// chunk with the full positive set.
pub fn make_balanced_subsets(labels: &[f64], rng: &mut Rng) -> Result<Vec<BalancedSubset>> {
    let (_, k) = imbalance_ratio(labels)?;
    let minority: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 1.0).collect();
    let mut majority: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 0.0).collect();
    rng.shuffle(&mut majority);

    let base = majority.len() / k;
    let extra = majority.len() % k;
    let mut subsets = Vec::with_capacity(k);
    let mut start = 0;
    for subset_id in 0..k {
        let len = base + usize::from(subset_id < extra);
        subsets.push(BalancedSubset {
            subset_id,
            minority_indices: minority.clone(),
            majority_indices: majority[start..start + len].to_vec(),
        });
        start += len;
    }
    Ok(subsets)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub seed: u64,
    pub dataset: String,
    pub fold: Option<usize>,
}

/// A trained pool of supervised autoencoders voting by majority.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BSACModel {
    pub base_models: Vec<SAModel>,
    pub gammas: Vec<f64>,
    pub preprocess: Option<PreprocessParams>,
    pub metadata: ModelMetadata,
}

/// Validation F1 of one `(subset, gamma)` candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub subset_id: usize,
    pub gamma: f64,
    pub f1: f64,
}

pub struct BsacTraining {
    pub model: BSACModel,
    /// Every candidate's validation F1, ordered by subset then grid position.
    pub sweep: Vec<SweepRow>,
    pub subsets: Vec<BalancedSubset>,
}

fn validate_grid(gamma_grid: &[f64]) -> Result<()> {
    if gamma_grid.is_empty() {
        return Err(Error::InvalidArgument("gamma grid is empty".into()));
    }
    if let Some(g) = gamma_grid.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(Error::InvalidArgument(format!("gamma {g} outside [0, 1]")));
    }
    Ok(())
}

/// Index of the best F1; ties go to the larger gamma.
pub fn select_gamma(rows: &[SweepRow]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, row) in rows.iter().enumerate() {
        best = match best {
            None => Some(i),
            Some(b) => {
                let cur = &rows[b];
                if row.f1 > cur.f1 || (row.f1 == cur.f1 && row.gamma > cur.gamma) {
                    Some(i)
                } else {
                    Some(b)
                }
            }
        };
    }
    best
}

/// Trains the pool and returns it together with the full gamma sweep.
///
/// One base seed is drawn from `rng`; the subset shuffle and every
/// `(subset, gamma)` candidate get their own derived stream, so the result
/// does not depend on `exec`.
pub fn train_bsac_with_sweep(
    train: &Dataset,
    validation: &Dataset,
    base_config: &SAConfig,
    gamma_grid: &[f64],
    rng: &mut Rng,
    exec: Execution,
) -> Result<BsacTraining> {
    validate_grid(gamma_grid)?;
    base_config.validate()?;
    if validation.features.cols() != train.features.cols() {
        return Err(Error::shape(
            "validation features",
            train.features.cols(),
            validation.features.cols(),
        ));
    }
    if validation.rows() == 0 {
        return Err(Error::Empty("validation set"));
    }
    let base_seed = rng.next_u64();
    let subsets = make_balanced_subsets(&train.labels, &mut Rng::new(derive_seed(base_seed, &[STREAM_SUBSETS])))?;

    let jobs: Vec<(usize, usize)> = (0..subsets.len())
        .flat_map(|s| (0..gamma_grid.len()).map(move |g| (s, g)))
        .collect();

    let candidates: Vec<Result<(SAModel, SweepRow)>> = exec.map_slice(&jobs, |&(s, g)| {
        let subset = &subsets[s];
        let rows = subset.indices();
        let x = train.features.select_rows(&rows);
        let y: Vec<f64> = rows.iter().map(|&i| train.labels[i]).collect();
        let config = SAConfig {
            gamma: gamma_grid[g],
            seed: derive_seed(base_seed, &[STREAM_CANDIDATE, s as u64, g as u64]),
            ..base_config.clone()
        };
        let model = sa_train(&config, &x, &y)?;
        let (_, predicted) = model.sa_predict(&validation.features)?;
        let f1 = metrics(&confusion(&validation.labels, &predicted)?)?.f1;
        log::debug!("subset {s} gamma {:.2}: validation F1 {f1:.4}", gamma_grid[g]);
        Ok((
            model,
            SweepRow {
                subset_id: s,
                gamma: gamma_grid[g],
                f1,
            },
        ))
    });

    let mut sweep = Vec::with_capacity(jobs.len());
    let mut per_subset: Vec<Vec<SAModel>> = vec![Vec::new(); subsets.len()];
    for c in candidates {
        let (model, row) = c?;
        per_subset[row.subset_id].push(model);
        sweep.push(row);
    }

    let mut base_models = Vec::with_capacity(subsets.len());
    let mut gammas = Vec::with_capacity(subsets.len());
    for (s, models) in per_subset.into_iter().enumerate() {
        let rows = &sweep[s * gamma_grid.len()..(s + 1) * gamma_grid.len()];
        let best = select_gamma(rows).expect("non-empty grid");
        gammas.push(rows[best].gamma);
        base_models.push(models.into_iter().nth(best).expect("one model per grid point"));
    }

    Ok(BsacTraining {
        model: BSACModel {
            base_models,
            gammas,
            preprocess: None,
            metadata: ModelMetadata {
                seed: rng.seed(),
                ..ModelMetadata::default()
            },
        },
        sweep,
        subsets,
    })
}

pub fn train_bsac(
    train: &Dataset,
    validation: &Dataset,
    base_config: &SAConfig,
    gamma_grid: &[f64],
    rng: &mut Rng,
    exec: Execution,
) -> Result<BSACModel> {
    train_bsac_with_sweep(train, validation, base_config, gamma_grid, rng, exec).map(|t| t.model)
}

/// 1 iff positive votes ≥ negative votes.
#[inline]
pub fn majority_vote(votes: &[u8]) -> u8 {
    let positive = votes.iter().filter(|&&v| v == 1).count();
    u8::from(2 * positive >= votes.len())
}

impl BSACModel {
    pub fn input_dim(&self) -> usize {
        self.base_models.first().map_or(0, SAModel::input_dim)
    }

    /// Every base model's hard labels, one row per base model.
    pub fn votes(&self, features: &Matrix, exec: Execution) -> Result<Vec<Vec<u8>>> {
        if self.base_models.is_empty() {
            return Err(Error::Empty("classifier pool"));
        }
        exec.map_slice(&self.base_models, |m| m.sa_predict(features).map(|(_, labels)| labels))
            .into_iter()
            .collect()
    }

    /// Final labels and the fraction of base models voting positive.
    pub fn predict(&self, features: &Matrix, exec: Execution) -> Result<(Vec<u8>, Vec<f64>)> {
        let votes = self.votes(features, exec)?;
        let k = votes.len();
        let mut labels = Vec::with_capacity(features.rows());
        let mut fractions = Vec::with_capacity(features.rows());
        let mut column = vec![0u8; k];
        for r in 0..features.rows() {
            for (c, v) in column.iter_mut().zip(&votes) {
                *c = v[r];
            }
            labels.push(majority_vote(&column));
            fractions.push(column.iter().filter(|&&v| v == 1).count() as f64 / k as f64);
        }
        Ok((labels, fractions))
    }
}

pub fn bsac_predict(model: &BSACModel, features: &Matrix) -> Result<(Vec<u8>, Vec<f64>)> {
    model.predict(features, Execution::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(p: usize, n: usize) -> Vec<f64> {
        let mut y = vec![1.0; p];
        y.extend(std::iter::repeat_n(0.0, n));
        y
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(imbalance_ratio(&labels(4, 4)).unwrap(), (1.0, 1));
        let (r, k) = imbalance_ratio(&labels(100, 352)).unwrap();
        assert!((r - 3.52).abs() < 1e-12);
        assert_eq!(k, 3);
        assert!(matches!(imbalance_ratio(&labels(5, 4)), Err(Error::MajorityNotNegative { .. })));
        assert!(matches!(imbalance_ratio(&labels(0, 4)), Err(Error::SingleClass)));
    }

    #[test]
    fn exact_division_subsets() {
        let subsets = make_balanced_subsets(&labels(10, 30), &mut Rng::new(1)).unwrap();
        assert_eq!(subsets.len(), 3);
        for s in &subsets {
            assert_eq!(s.minority_indices.len(), 10);
            assert_eq!(s.majority_indices.len(), 10);
            assert_eq!(s.indices().len(), 20);
        }
    }

    #[test]
    fn remainder_spread_one_per_chunk() {
        let y = labels(10, 35);
        let subsets = make_balanced_subsets(&y, &mut Rng::new(2)).unwrap();
        let mut sizes: Vec<usize> = subsets.iter().map(|s| s.majority_indices.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![11, 12, 12]);
        let mut all: Vec<usize> = subsets.iter().flat_map(|s| s.majority_indices.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (10..45).collect::<Vec<_>>());
        assert!(make_balanced_subsets(&labels(5, 4), &mut Rng::new(0)).is_err());
    }

    #[test]
    fn vote_rule() {
        assert_eq!(majority_vote(&[1, 0, 1]), 1);
        assert_eq!(majority_vote(&[1, 0]), 1);
        assert_eq!(majority_vote(&[0, 0, 1]), 0);
        assert_eq!(majority_vote(&[0]), 0);
    }

    #[test]
    fn gamma_ties_break_to_larger() {
        let rows = [
            SweepRow { subset_id: 0, gamma: 0.1, f1: 0.6 },
            SweepRow { subset_id: 0, gamma: 0.9, f1: 0.6 },
            SweepRow { subset_id: 0, gamma: 0.5, f1: 0.6 },
        ];
        assert_eq!(select_gamma(&rows), Some(1));
        assert_eq!(select_gamma(&[]), None);
    }

    #[test]
    fn empty_pool_is_error() {
        let model = BSACModel {
            base_models: vec![],
            gammas: vec![],
            preprocess: None,
            metadata: ModelMetadata::default(),
        };
        assert!(bsac_predict(&model, &Matrix::zeros(1, 2)).is_err());
    }
}
