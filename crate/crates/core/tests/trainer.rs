use mixc::netcore::{Model, ModelSpec};
use mixc::store::LoadedDataset;
use mixc::synthgen::{generate_dataset, GenConfig};
use mixc::trainer::{
    kfold_cv, lr_sequence, stratified_folds, train, train_val_gap, EpochRecord, PlateauSchedule, RunHistory,
    StopReason, TrainConfig,
};
use mixc::{Class, Error};

fn tiny_data(counts: [usize; 4]) -> (tempfile::TempDir, LoadedDataset) {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generate_dataset(
        &GenConfig {
            counts,
            size: 16,
            seed: 4,
            ..Default::default()
        },
        dir.path(),
    )
    .unwrap();
    let data = LoadedDataset::from_manifest(manifest, dir.path()).unwrap();
    (dir, data)
}

fn quick_config(max_epochs: usize) -> TrainConfig {
    TrainConfig {
        max_epochs,
        batch_size: 8,
        image_size: 16,
        ..TrainConfig::desk()
    }
}

fn spec() -> ModelSpec {
    ModelSpec::spray_net(3, 16, 16)
}

fn default_schedule() -> PlateauSchedule {
    PlateauSchedule::new(0.001, 10.0, 5, 50, 1e-6)
}

#[test]
fn flat_losses_reduce_at_epoch_six() {
    let (lrs, stop) = lr_sequence(&[1.0; 7], default_schedule());
    assert_eq!(lrs, vec![0.001, 0.001, 0.001, 0.001, 0.001, 0.001, 0.0001]);
    assert_eq!(stop, None);
}

#[test]
fn hand_traced_sequence() {
    // improve for three epochs, stall seven, improve once, stall again
    let losses = [3.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5];
    let (lrs, _) = lr_sequence(&losses, default_schedule());
    let a = 0.001;
    let b = a / 10.0;
    let c = b / 10.0;
    assert_eq!(lrs, vec![a, a, a, a, a, a, a, a, b, b, b, b, b, b, b, b, c]);
}

#[test]
fn improvements_below_threshold_do_not_reset() {
    // 1e-7 steps never count as improvement
    let losses: Vec<f64> = (0..7).map(|i| 1.0 - 1e-7 * i as f64).collect();
    let (lrs, _) = lr_sequence(&losses, default_schedule());
    assert_eq!(lrs[6], 0.0001);
}

#[test]
fn reduction_does_not_reset_early_stopping() {
    let (lrs, stop) = lr_sequence(&[1.0; 80], default_schedule());
    // epoch 0 sets the best; epochs 1..=50 are the 50 non-improving epochs
    assert_eq!(stop, Some(50));
    assert_eq!(lrs.len(), 51);
    for (epoch, &lr) in lrs.iter().enumerate() {
        let reductions = if epoch <= 5 { 0 } else { (epoch - 1) / 5 };
        let mut expected = 0.001;
        for _ in 0..reductions {
            expected /= 10.0;
        }
        assert_eq!(lr, expected, "epoch {epoch}");
    }
}

#[test]
fn lr_only_moves_by_the_factor() {
    let losses: Vec<f64> = (0..120).map(|i| ((i * 37 % 11) as f64).sin() + 2.0).collect();
    let (lrs, _) = lr_sequence(&losses, default_schedule());
    for w in lrs.windows(2) {
        assert!(w[1] == w[0] || w[1] == w[0] / 10.0);
    }
}

#[test]
fn single_epoch_run() {
    let (_dir, data) = tiny_data([6, 6, 6, 6]);
    let out = train(Model::new(spec(), 0).unwrap(), &data.train, &data.val, &quick_config(1)).unwrap();
    assert_eq!(out.history.epochs.len(), 1);
    assert_eq!(out.history.stop_reason.as_str(), "max_epochs");
}

#[test]
fn seeded_runs_are_identical() {
    let (_dir, data) = tiny_data([6, 6, 6, 6]);
    let config = quick_config(3).with_alpha(0.4).with_seed(7);
    let run = || train(Model::new(spec(), 7).unwrap(), &data.train, &data.val, &config).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a.history, b.history);
    assert_eq!(a.best_model.params(), b.best_model.params());
    assert_eq!(a.audit, b.audit);
}

#[test]
fn early_stopping_halts_training() {
    let (_dir, data) = tiny_data([6, 6, 6, 6]);
    // steps far below one ulp never improve the validation loss
    let config = TrainConfig {
        init_lr: 1e-300,
        early_stop_patience: 4,
        ..quick_config(30)
    };
    let out = train(Model::new(spec(), 1).unwrap(), &data.train, &data.val, &config).unwrap();
    assert_eq!(out.history.stop_reason, StopReason::EarlyStopping);
    assert_eq!(out.history.epochs.len(), 5);
    assert!(out.audit.iter().all(|a| a.epoch < 5));
}

#[test]
fn pipeline_only_sees_training_samples() {
    let (_dir, data) = tiny_data([6, 6, 6, 6]);
    let config = quick_config(2).with_alpha(0.2);
    let out = train(Model::new(spec(), 2).unwrap(), &data.train, &data.val, &config).unwrap();
    let batches_per_epoch = data.train.len().div_ceil(config.batch_size);
    assert_eq!(out.audit.len(), 2 * batches_per_epoch);
    for epoch in 0..2 {
        let mut seen: Vec<usize> = out
            .audit
            .iter()
            .filter(|a| a.epoch == epoch)
            .flat_map(|a| a.sources.iter().copied())
            .collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..data.train.len()).collect::<Vec<_>>());
    }
}

#[test]
fn empty_splits_rejected() {
    let (_dir, data) = tiny_data([6, 6, 6, 6]);
    let model = Model::new(spec(), 0).unwrap();
    assert!(train(model.clone(), &[], &data.val, &quick_config(1)).is_err());
    assert!(train(model, &data.train, &[], &quick_config(1)).is_err());
}

#[test]
fn invalid_configs_rejected() {
    let (_dir, data) = tiny_data([6, 6, 6, 6]);
    let model = Model::new(spec(), 0).unwrap();
    for config in [
        TrainConfig { plateau_factor: 1.0, ..quick_config(1) },
        TrainConfig { plateau_patience: 0, ..quick_config(1) },
        TrainConfig { batch_size: 1, ..quick_config(1).with_alpha(0.2) },
    ] {
        assert!(train(model.clone(), &data.train, &data.val, &config).is_err());
    }
}

#[test]
fn divergence_is_reported() {
    let (_dir, data) = tiny_data([6, 6, 6, 6]);
    let config = TrainConfig {
        init_lr: 1e300,
        ..quick_config(5)
    };
    match train(Model::new(spec(), 0).unwrap(), &data.train, &data.val, &config) {
        Err(Error::Diverged { .. }) => {}
        other => panic!("expected divergence, got {:?}", other.map(|o| o.history.epochs.len())),
    }
}

fn history(pairs: impl Iterator<Item = (f64, f64)>) -> RunHistory {
    RunHistory {
        epochs: pairs
            .enumerate()
            .map(|(epoch, (train_acc, val_acc))| EpochRecord {
                epoch,
                train_loss: 0.0,
                train_acc,
                val_loss: 0.0,
                val_acc,
                lr: 0.001,
            })
            .collect(),
        stop_reason: StopReason::MaxEpochs,
        best_epoch: 0,
    }
}

#[test]
fn gap_examples() {
    assert!((train_val_gap(&history(std::iter::repeat_n((0.99, 0.95), 60)), 50) - 0.04).abs() < 1e-12);
    let short = history([(0.9, 0.8), (0.7, 0.7)].into_iter());
    assert!((train_val_gap(&short, 50) - 0.05).abs() < 1e-12);
    // gap rises linearly to 0.1 over 100 epochs; the last 50 average 0.0755
    let linear = history((1..=100).map(|e| (0.5 + 0.1 * e as f64 / 100.0, 0.5)));
    assert!((train_val_gap(&linear, 50) - 0.0755).abs() < 1e-12);
}

#[test]
fn five_folds_of_878() {
    let classes: Vec<Class> = [173, 199, 241, 265]
        .iter()
        .zip(Class::ALL)
        .flat_map(|(&n, c)| std::iter::repeat_n(c, n))
        .collect();
    let folds = stratified_folds(&classes, 5, 0).unwrap();
    let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
    assert_eq!(sizes, [176, 176, 176, 175, 175]);
    assert_eq!(folds, stratified_folds(&classes, 5, 0).unwrap());
}

#[test]
fn small_class_names_itself() {
    let mut classes = vec![Class::Collapse; 20];
    classes.extend([Class::PrePost; 2]);
    let err = stratified_folds(&classes, 5, 0).unwrap_err();
    assert!(err.to_string().contains("Pre/Post"), "{err}");
}

#[test]
fn cross_validation_runs_each_fold() {
    let (dir, data) = tiny_data([5, 5, 5, 5]);
    let samples = data.all(dir.path()).unwrap();
    let report = kfold_cv(&samples, 4, &quick_config(1), &spec()).unwrap();
    assert_eq!(report.fold_sizes, [5, 5, 5, 5]);
    assert_eq!(report.accuracies.len(), 4);
    let mean = report.accuracies.iter().sum::<f64>() / 4.0;
    assert!((report.mean - mean).abs() < 1e-15);
    assert!(report.std >= 0.0);
    assert_eq!(report, kfold_cv(&samples, 4, &quick_config(1), &spec()).unwrap());
}
