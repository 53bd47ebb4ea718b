use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::train::{evaluate_loss_acc, train};
use crate::error::{Error, Result};
use crate::label::Class;
use crate::netcore::{Model, ModelSpec};
use crate::rng::stream;
use crate::Sample;

/// Seeded stratified partition into `k` folds: samples are shuffled within
/// each class, classes are concatenated, and the sequence is dealt to folds
/// round-robin. Fold sizes differ by at most one, as do per-class counts.
pub fn stratified_folds(classes: &[Class], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be >= 2, got {k}")));
    }
    if classes.len() < k {
        return Err(Error::InvalidArgument(format!(
            "{} samples cannot fill {k} folds",
            classes.len()
        )));
    }
    let mut dealt = Vec::with_capacity(classes.len());
    for class in Class::ALL {
        let mut members: Vec<usize> = (0..classes.len()).filter(|&i| classes[i] == class).collect();
        if !members.is_empty() && members.len() < k {
            return Err(Error::ClassTooSmall {
                class: class.name(),
                count: members.len(),
                k,
            });
        }
        members.shuffle(&mut stream(seed, &[0x464f_4c44, class.index() as u64]));
        dealt.extend(members);
    }
    let mut folds = vec![Vec::new(); k];
    for (n, i) in dealt.into_iter().enumerate() {
        folds[n % k].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KFoldReport {
    pub fold_sizes: Vec<usize>,
    pub accuracies: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl KFoldReport {
    pub fn from_accuracies(fold_sizes: Vec<usize>, accuracies: Vec<f64>) -> Self {
        let n = accuracies.len() as f64;
        let mean = accuracies.iter().sum::<f64>() / n;
        let var = accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
        KFoldReport {
            fold_sizes,
            accuracies,
            mean,
            std: var.sqrt(),
        }
    }
}

/// Every `VAL_STRIDE`-th sample of the training folds, taken in class-major
/// order, is held out for early stopping: about 13% of the data at k = 5.
const VAL_STRIDE: usize = 6;

/// k-fold cross-validation: each fold is held out once as the test set; the
/// rest is split into training and validation parts and trained with
/// [`train`] under `config`. Test accuracy uses the best-validation weights.
pub fn kfold_cv(samples: &[Sample], k: usize, config: &TrainConfig, spec: &ModelSpec) -> Result<KFoldReport> {
    let classes: Vec<Class> = samples.iter().map(|s| s.label.argmax()).collect();
    let folds = stratified_folds(&classes, k, config.seed)?;
    let mut accuracies = Vec::with_capacity(k);
    for (f, held_out) in folds.iter().enumerate() {
        let mut rest: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|(g, _)| *g != f)
            .flat_map(|(_, fold)| fold.iter().copied())
            .collect();
        // class-major order so the stride below stays stratified
        rest.sort_by_key(|&i| (classes[i].index(), i));
        let mut train_set = Vec::new();
        let mut val_set = Vec::new();
        for (n, &i) in rest.iter().enumerate() {
            if n % VAL_STRIDE == VAL_STRIDE - 1 {
                val_set.push(samples[i].clone());
            } else {
                train_set.push(samples[i].clone());
            }
        }
        let test_set: Vec<Sample> = held_out.iter().map(|&i| samples[i].clone()).collect();
        let fold_config = TrainConfig {
            seed: config.seed.wrapping_add(f as u64),
            ..config.clone()
        };
        let model = Model::new(spec.clone(), fold_config.seed)?;
        let outcome = train(model, &train_set, &val_set, &fold_config)?;
        let (_, acc) = evaluate_loss_acc(&outcome.best_model, &test_set)?;
        accuracies.push(acc);
    }
    Ok(KFoldReport::from_accuracies(
        folds.iter().map(|f| f.len()).collect(),
        accuracies,
    ))
}
