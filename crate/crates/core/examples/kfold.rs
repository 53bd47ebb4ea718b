//! Stratified k-fold cross-validation at desk scale.
//!
//! cargo run --release --example kfold -- [k] [alpha] [max_epochs]

use mixc::netcore::ModelSpec;
use mixc::store::LoadedDataset;
use mixc::synthgen::{generate_dataset, GenConfig};
use mixc::trainer::{kfold_cv, TrainConfig};

fn main() -> mixc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let k = args.first().and_then(|s| s.parse().ok()).unwrap_or(5);
    let alpha = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let max_epochs = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(10);

    let dir = tempfile::tempdir().map_err(|e| mixc::Error::InvalidArgument(e.to_string()))?;
    let config = TrainConfig { max_epochs, image_size: 32, ..TrainConfig::desk().with_alpha(alpha) };
    let manifest = generate_dataset(&GenConfig { size: 32, ..Default::default() }, dir.path())?;
    let data = LoadedDataset::from_manifest(manifest, dir.path())?;
    let samples = data.all(dir.path())?;
    let report = kfold_cv(&samples, k, &config, &ModelSpec::spray_net(3, 32, 32))?;
    for (i, (n, acc)) in report.fold_sizes.iter().zip(&report.accuracies).enumerate() {
        println!("fold {i}: {n} held out, accuracy {:.2}%", 100.0 * acc);
    }
    println!("mean {:.2}% std {:.2}%", 100.0 * report.mean, 100.0 * report.std);
    Ok(())
}
