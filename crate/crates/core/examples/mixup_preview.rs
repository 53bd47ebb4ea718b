//! Renders a few spray images, mixes consecutive pairs through the training
//! pipeline and writes the results as a PNG strip.
//!
//! cargo run --release --example mixup_preview -- [out.png] [alpha]

use std::path::PathBuf;

use mixc::augment::{AugmentConfig, Pipeline};
use mixc::store::write_rgb_png;
use mixc::synthgen::{generate_dataset, GenConfig};
use mixc::store::LoadedDataset;
use mixc::ImageTensor;

fn main() -> mixc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = PathBuf::from(args.first().map(String::as_str).unwrap_or("mixup_preview.png"));
    let alpha = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.4);

    let dir = tempfile::tempdir().map_err(|e| mixc::Error::InvalidArgument(e.to_string()))?;
    let manifest = generate_dataset(&GenConfig { counts: [2, 2, 2, 2], size: 64, ..Default::default() }, dir.path())?;
    let data = LoadedDataset::from_manifest(manifest, dir.path())?;

    let pipeline = Pipeline::new(AugmentConfig::mixup(alpha))?;
    let batch = pipeline.run(&data.train, 0, 0)?;
    for (rec, s) in batch.records.iter().zip(&batch.samples) {
        println!(
            "lambda {:.3}: {} x {} -> label {:?}",
            rec.lambda,
            data.train[rec.index_a].label.argmax(),
            data.train[rec.index_b].label.argmax(),
            s.label.probs()
        );
    }

    let size = 64;
    let n = batch.samples.len();
    let mut strip = vec![0.0; 3 * size * size * n];
    for (j, s) in batch.samples.iter().enumerate() {
        for c in 0..3 {
            for y in 0..size {
                for x in 0..size {
                    strip[(c * size + y) * size * n + j * size + x] = s.image.get(c, y, x);
                }
            }
        }
    }
    write_rgb_png(&ImageTensor::from_values(size * n, size, 3, strip)?, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
