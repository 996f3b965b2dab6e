use crate::error::{Error, Result};
use crate::nn::Rng;

/// Assigns every sample a fold in `0..k`, preserving the class ratio.
///
/// Each class is shuffled and dealt round-robin; negatives continue the
/// deal where positives stopped, so fold sizes differ by at most one and
/// per-fold positive counts differ by at most one.
pub fn stratified_kfold(labels: &[f64], k: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "k must be at least 3 (train/validation/test), got {k}"
        )));
    }
    crate::autoencoder::check_binary(labels)?;
    let mut positives: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 1.0).collect();
    let mut negatives: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 0.0).collect();
    for (class, members) in [(1u8, &positives), (0u8, &negatives)] {
        if members.len() < k {
            return Err(Error::ClassTooSmall {
                class,
                count: members.len(),
                k,
            });
        }
    }
    rng.shuffle(&mut positives);
    rng.shuffle(&mut negatives);
    let mut folds = vec![0usize; labels.len()];
    for (slot, &i) in positives.iter().chain(&negatives).enumerate() {
        folds[i] = slot % k;
    }
    Ok(folds)
}

/// Row indices of each fold, in ascending order.
pub fn fold_members(folds: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut members = vec![Vec::new(); k];
    for (i, &f) in folds.iter().enumerate() {
        members[f].push(i);
    }
    members
}

/// `(train, validation, test)` indices for rotation `i`: test is fold `i`,
/// validation is fold `(i + 1) mod k`, train is everything else.
pub fn rotation(folds: &[usize], k: usize, i: usize) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let val_fold = (i + 1) % k;
    let (mut train, mut val, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for (row, &f) in folds.iter().enumerate() {
        if f == i {
            test.push(row);
        } else if f == val_fold {
            val.push(row);
        } else {
            train.push(row);
        }
    }
    (train, val, test)
}
