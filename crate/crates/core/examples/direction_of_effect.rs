//! The full desk-scale comparison: baseline against mixup at three alphas,
//! then baseline against mixup under boundary label corruption.
//!
//! cargo run --release --example direction_of_effect -- [seeds]

use mixc::store::LoadedDataset;
use mixc::synthgen::{generate_dataset, CorruptionMode, GenConfig};
use mixc::trainer::{corrupt_training_labels, mean_of, run_condition, ConditionResult, TrainConfig};

fn report(label: &str, runs: &[ConditionResult]) {
    for r in runs {
        println!(
            "{label} alpha={} seed={}: train {:.3} gap {:+.4} test {:.3} ({} epochs)",
            r.alpha,
            r.seed,
            r.train_acc,
            r.gap,
            r.test_acc,
            r.history.epochs.len()
        );
    }
    println!(
        "{label} mean: train {:.4} gap {:+.4} test {:.4}",
        mean_of(runs, |r| r.train_acc),
        mean_of(runs, |r| r.gap),
        mean_of(runs, |r| r.test_acc)
    );
}

fn main() -> mixc::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let dir = tempfile::tempdir().map_err(|e| mixc::Error::InvalidArgument(e.to_string()))?;
    let manifest = generate_dataset(&GenConfig::default(), dir.path())?;
    let data = LoadedDataset::from_manifest(manifest, dir.path())?;

    for alpha in [0.0, 0.2, 0.4, 0.6] {
        let runs = (0..seeds)
            .map(|seed| {
                let config = TrainConfig::desk().with_alpha(alpha).with_seed(seed);
                run_condition(&data.train, &data.val, &data.test, &config)
            })
            .collect::<mixc::Result<Vec<_>>>()?;
        report("clean", &runs);
    }

    let mode = CorruptionMode::Boundary { fraction: 0.2, delta: 0.05 };
    let (noisy, corruption) = corrupt_training_labels(&data, mode, 0)?;
    println!("{mode}: {corruption:?}");
    for alpha in [0.0, 0.2] {
        let runs = (0..seeds)
            .map(|seed| {
                let config = TrainConfig::desk().with_alpha(alpha).with_seed(seed);
                run_condition(&noisy, &data.val, &data.test, &config)
            })
            .collect::<mixc::Result<Vec<_>>>()?;
        report("corrupt", &runs);
    }
    Ok(())
}
