use std::path::{Path, PathBuf};

use super::image_io::{read_image, LoadOptions};
use crate::error::Result;
use crate::synthgen::{apply_color_annotation, DatasetManifest, ManifestEntry, Split};
use crate::Sample;

/// Loads the samples of one split as three-channel images. Colour annotations
/// recorded in the manifest are overlaid after triplication.
pub fn load_split(manifest: &DatasetManifest, root: &Path, split: Split) -> Result<Vec<Sample>> {
    load_split_sized(manifest, root, split, None)
}

/// As [`load_split`], bilinearly resizing to `size × size` when it differs
/// from the manifest's image size.
pub fn load_split_sized(
    manifest: &DatasetManifest,
    root: &Path,
    split: Split,
    size: Option<usize>,
) -> Result<Vec<Sample>> {
    let resize = size.filter(|&s| s != manifest.image_size).map(|s| (s, s));
    manifest
        .entries_in(split)
        .map(|e| load_entry(e, root, resize))
        .collect()
}

pub fn load_entry(entry: &ManifestEntry, root: &Path, resize: Option<(usize, usize)>) -> Result<Sample> {
    let path: PathBuf = root.join(&entry.path);
    let mut image = read_image(
        &path,
        LoadOptions {
            resize,
            triplicate: true,
        },
    )?;
    if let (Some(annotation), None) = (entry.meta.annotation, resize) {
        apply_color_annotation(&mut image, &annotation);
    }
    Ok(Sample {
        image,
        label: entry.label,
    })
}

/// Manifest plus its train/val/test samples.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub manifest: DatasetManifest,
    pub train: Vec<Sample>,
    pub val: Vec<Sample>,
    pub test: Vec<Sample>,
}

impl LoadedDataset {
    pub fn load(dir: &Path) -> Result<Self> {
        let manifest = DatasetManifest::read(&dir.join("manifest.json"))?;
        Self::from_manifest(manifest, dir)
    }

    pub fn from_manifest(manifest: DatasetManifest, dir: &Path) -> Result<Self> {
        Self::from_manifest_sized(manifest, dir, None)
    }

    /// Loads `dir/manifest.json` with images resized to `size × size`.
    pub fn load_sized(dir: &Path, size: Option<usize>) -> Result<Self> {
        let manifest = DatasetManifest::read(&dir.join("manifest.json"))?;
        Self::from_manifest_sized(manifest, dir, size)
    }

    pub fn from_manifest_sized(manifest: DatasetManifest, dir: &Path, size: Option<usize>) -> Result<Self> {
        Ok(LoadedDataset {
            train: load_split_sized(&manifest, dir, Split::Train, size)?,
            val: load_split_sized(&manifest, dir, Split::Val, size)?,
            test: load_split_sized(&manifest, dir, Split::Test, size)?,
            manifest,
        })
    }

    /// All samples in manifest order.
    pub fn all(&self, dir: &Path) -> Result<Vec<Sample>> {
        self.manifest
            .entries
            .iter()
            .map(|e| load_entry(e, dir, None))
            .collect()
    }
}
