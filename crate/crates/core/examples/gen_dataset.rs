//! Generates a synthetic spray dataset and prints its class/split table.
//!
//! cargo run --release --example gen_dataset -- <out-dir> [seed] [size]

use std::path::PathBuf;

use mixc::synthgen::{generate_dataset, GenConfig, Split};
use mixc::Class;

fn main() -> mixc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = PathBuf::from(args.first().map(String::as_str).unwrap_or("spray_data"));
    let seed = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let size = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(64);

    let manifest = generate_dataset(&GenConfig { seed, size, ..Default::default() }, &out)?;
    println!("{}", manifest.summary());
    let table = manifest.class_split_counts();
    println!("{:<14} {:>6} {:>6} {:>6}", "class", "train", "val", "test");
    for (i, row) in table.iter().enumerate() {
        println!("{:<14} {:>6} {:>6} {:>6}", Class::ALL[i].to_string(), row[0], row[1], row[2]);
    }
    let annotated = manifest.entries_in(Split::Train).filter(|e| e.meta.annotation.is_some()).count();
    println!("annotated training images: {annotated}");
    println!("wrote {}", out.display());
    Ok(())
}
