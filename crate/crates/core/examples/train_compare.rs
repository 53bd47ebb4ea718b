//! Baseline vs mixup on the synthetic dataset with the desk schedule.
//!
//! cargo run --release --example train_compare -- [seed] [alpha...]

use std::time::Instant;

use mixc::metrics::{compare_runs, evaluate, NamedRun};
use mixc::netcore::{Model, ModelSpec};
use mixc::store::LoadedDataset;
use mixc::synthgen::{generate_dataset, GenConfig};
use mixc::trainer::{train, TrainConfig};

fn main() -> mixc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seed: u64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut alphas: Vec<f64> = args.iter().skip(1).filter_map(|s| s.parse().ok()).collect();
    if alphas.is_empty() {
        alphas = vec![0.0, 0.2];
    }

    let dir = tempfile::tempdir().map_err(|e| mixc::Error::InvalidArgument(e.to_string()))?;
    let manifest = generate_dataset(&GenConfig { seed, ..Default::default() }, dir.path())?;
    println!("{}", manifest.summary());
    let data = LoadedDataset::from_manifest(manifest, dir.path())?;

    let mut results = Vec::new();
    for &alpha in &alphas {
        let config = TrainConfig::desk().with_alpha(alpha).with_seed(seed);
        let spec = ModelSpec::spray_net(3, config.image_size, config.image_size);
        let start = Instant::now();
        let outcome = train(Model::new(spec, seed)?, &data.train, &data.val, &config)?;
        let test = evaluate(&outcome.best_model, &data.test)?;
        println!(
            "alpha={alpha}: {} epochs ({}), test {:.3}, {:.1}s",
            outcome.history.epochs.len(),
            outcome.history.stop_reason.as_str(),
            test.report.accuracy,
            start.elapsed().as_secs_f64()
        );
        for e in &outcome.history.epochs {
            println!(
                "  {:>2} loss {:.4}/{:.4} acc {:.3}/{:.3} lr {:e}",
                e.epoch, e.train_loss, e.val_loss, e.train_acc, e.val_acc, e.lr
            );
        }
        results.push((format!("alpha={alpha}"), outcome.history, test.report.accuracy));
    }
    let runs: Vec<NamedRun> = results
        .iter()
        .map(|(name, history, acc)| NamedRun { name, history, test_acc: *acc })
        .collect();
    if runs.len() >= 2 {
        print!("{}", compare_runs(&runs, TrainConfig::desk().gap_window)?.to_text());
    }
    Ok(())
}
