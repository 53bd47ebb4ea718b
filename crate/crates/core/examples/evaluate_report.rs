//! Trains briefly, then prints the confusion matrix and per-class report.
//!
//! cargo run --release --example evaluate_report -- [max_epochs]

use mixc::metrics::evaluate;
use mixc::netcore::{Model, ModelSpec};
use mixc::store::LoadedDataset;
use mixc::synthgen::{generate_dataset, GenConfig};
use mixc::trainer::{train, TrainConfig};

fn main() -> mixc::Result<()> {
    let max_epochs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let dir = tempfile::tempdir().map_err(|e| mixc::Error::InvalidArgument(e.to_string()))?;
    let config = TrainConfig { max_epochs, image_size: 32, ..TrainConfig::desk().with_alpha(0.2) };
    let manifest = generate_dataset(&GenConfig { size: 32, ..Default::default() }, dir.path())?;
    let data = LoadedDataset::from_manifest(manifest, dir.path())?;
    let out = train(Model::new(ModelSpec::spray_net(3, 32, 32), 0)?, &data.train, &data.val, &config)?;
    let ev = evaluate(&out.best_model, &data.test)?;
    println!("confusion (rows true, columns predicted):");
    for row in ev.matrix.counts {
        println!("  {row:?}");
    }
    print!("{}", ev.report.to_text());
    Ok(())
}
