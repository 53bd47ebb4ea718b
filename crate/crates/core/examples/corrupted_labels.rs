//! Boundary vs random label corruption on a generated manifest.
//!
//! cargo run --release --example corrupted_labels -- [fraction] [delta]

use mixc::synthgen::{corrupt_labels_in, generate_dataset, CorruptionMode, GenConfig, Split};

fn main() -> mixc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let fraction = args.first().and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let delta = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.05);

    let dir = tempfile::tempdir().map_err(|e| mixc::Error::InvalidArgument(e.to_string()))?;
    let manifest = generate_dataset(&GenConfig { size: 16, ..Default::default() }, dir.path())?;
    for mode in [CorruptionMode::Boundary { fraction, delta }, CorruptionMode::Random { fraction }] {
        let (noisy, report) = corrupt_labels_in(&manifest, mode, 0, &[Split::Train])?;
        let flipped = manifest
            .entries
            .iter()
            .zip(&noisy.entries)
            .filter(|(a, b)| a.label != b.label)
            .count();
        println!("{mode}: {report:?}, {flipped} manifest entries changed");
    }
    Ok(())
}
