//! Drivers for baseline-versus-mixup comparisons on a loaded dataset.

use super::config::TrainConfig;
use super::train::{evaluate_loss_acc, train, train_val_gap, RunHistory};
use crate::error::Result;
use crate::netcore::{Model, ModelSpec};
use crate::store::LoadedDataset;
use crate::synthgen::{corrupt_labels_in, CorruptionMode, CorruptionReport, Split};
use crate::Sample;

/// One trained condition.
#[derive(Debug, Clone)]
pub struct ConditionResult {
    pub alpha: f64,
    pub seed: u64,
    pub history: RunHistory,
    /// Mean train accuracy over the config's gap window.
    pub train_acc: f64,
    pub gap: f64,
    /// Held-out accuracy of the best-validation weights.
    pub test_acc: f64,
}

/// Trains SprayNet from scratch under `config` and scores it on `test`.
pub fn run_condition(train_set: &[Sample], val: &[Sample], test: &[Sample], config: &TrainConfig) -> Result<ConditionResult> {
    let first = &train_set.first().expect("non-empty training split").image;
    let spec = ModelSpec::spray_net(first.channels(), first.height(), first.width());
    let outcome = train(Model::new(spec, config.seed)?, train_set, val, config)?;
    let (_, test_acc) = evaluate_loss_acc(&outcome.best_model, test)?;
    Ok(ConditionResult {
        alpha: config.alpha(),
        seed: config.seed,
        train_acc: outcome.history.mean_train_acc(config.gap_window),
        gap: train_val_gap(&outcome.history, config.gap_window),
        history: outcome.history,
        test_acc,
    })
}

/// Training samples with labels taken from a corrupted manifest; images are
/// unchanged and validation/test labels stay clean.
pub fn corrupt_training_labels(
    data: &LoadedDataset,
    mode: CorruptionMode,
    seed: u64,
) -> Result<(Vec<Sample>, CorruptionReport)> {
    let (manifest, report) = corrupt_labels_in(&data.manifest, mode, seed, &[Split::Train])?;
    let samples = data
        .train
        .iter()
        .zip(manifest.entries_in(Split::Train))
        .map(|(s, e)| Sample {
            image: s.image.clone(),
            label: e.label,
        })
        .collect();
    Ok((samples, report))
}

/// Mean of `f` over `results`.
pub fn mean_of(results: &[ConditionResult], f: impl Fn(&ConditionResult) -> f64) -> f64 {
    results.iter().map(f).sum::<f64>() / results.len().max(1) as f64
}
