//! Image IO, canonical JSON, checkpoints and run directories.

pub mod canonical;
pub mod checkpoint;
pub mod dataset_io;
pub mod image_io;
pub mod run;

use std::path::PathBuf;

pub use canonical::to_canonical_string;
pub use checkpoint::{load_checkpoint, load_checkpoint_for, save_checkpoint};
pub use dataset_io::{load_split, load_split_sized, LoadedDataset};
pub use image_io::{read_image, write_image, write_rgb_png, ImageFormat, LoadOptions};
pub use run::{read_history, read_run_config, read_run_metrics, write_report, RunArtifact, RunConfig, RunMetrics};

/// Environment variable naming the directory relative run paths resolve against.
pub const RUN_ROOT_ENV: &str = "MIXC_RUN_ROOT";

/// Resolves `path` against an explicit root, else `$MIXC_RUN_ROOT`, else
/// leaves it unchanged. Absolute paths are never rebased.
pub fn resolve_path(path: &std::path::Path, root: Option<&std::path::Path>) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match root
        .map(|r| r.to_path_buf())
        .or_else(|| std::env::var_os(RUN_ROOT_ENV).map(PathBuf::from))
    {
        Some(r) => r.join(path),
        None => path.to_path_buf(),
    }
}
