use std::fmt;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::render::{annotation_box, render_spray, Annotation, AnnotationBox, Phase, SprayParams};
use crate::error::{Error, Result};
use crate::label::{Class, SoftLabel, NUM_CLASSES};
use crate::rng::stream;
use crate::store::canonical::to_canonical_string;
use crate::store::image_io::{write_image, ImageFormat};

pub const SCHEMA_VERSION: u32 = 1;

/// Lower class threshold on the collapse parameter.
pub const TRANSITIONAL_THRESHOLD: f64 = 0.35;
/// Upper class threshold on the collapse parameter.
pub const COLLAPSE_THRESHOLD: f64 = 0.7;

/// Class counts in label order: Pre/Post, No collapse, Transitional, Collapse.
pub const DEFAULT_COUNTS: [usize; NUM_CLASSES] = [173, 199, 241, 265];

/// Train / validation / test fractions.
pub const SPLIT_FRACTIONS: [f64; 3] = [0.75, 0.15, 0.10];

pub const ANNOTATED_FRACTION: f64 = 0.3;

/// Regime of a spray with collapse parameter `c`; thresholds are lower-inclusive.
pub fn class_of(c: f64, phase: Phase) -> Class {
    match phase {
        Phase::PrePost => Class::PrePost,
        Phase::Active if c < TRANSITIONAL_THRESHOLD => Class::NoCollapse,
        Phase::Active if c < COLLAPSE_THRESHOLD => Class::Transitional,
        Phase::Active => Class::Collapse,
    }
}

/// Collapse-parameter interval `[lo, hi)` of an active class (`hi` inclusive
/// for Collapse).
pub fn class_interval(class: Class) -> Option<(f64, f64)> {
    match class {
        Class::PrePost => None,
        Class::NoCollapse => Some((0.0, TRANSITIONAL_THRESHOLD)),
        Class::Transitional => Some((TRANSITIONAL_THRESHOLD, COLLAPSE_THRESHOLD)),
        Class::Collapse => Some((COLLAPSE_THRESHOLD, 1.0)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    /// Ground-truth collapse parameter; absent for Pre/Post frames.
    pub true_collapse: Option<f64>,
    pub phase: Phase,
    pub assigned_class: Class,
    /// Class before any corruption.
    pub original_class: Class,
    pub corrupted: bool,
    pub source_id: String,
    pub annotation: Option<AnnotationBox>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the dataset directory.
    pub path: String,
    pub label: SoftLabel,
    pub meta: SampleMeta,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub seed: u64,
    pub image_size: usize,
    pub image_format: ImageFormat,
    pub class_counts: [usize; NUM_CLASSES],
    pub entries: Vec<ManifestEntry>,
    /// Operations applied after generation, oldest first.
    pub provenance: Vec<String>,
}

impl DatasetManifest {
    pub fn split_sizes(&self) -> [usize; 3] {
        let mut sizes = [0; 3];
        for e in &self.entries {
            sizes[e.split as usize] += 1;
        }
        sizes
    }

    /// `[class][split]` counts of assigned classes.
    pub fn class_split_counts(&self) -> [[usize; 3]; NUM_CLASSES] {
        let mut counts = [[0; 3]; NUM_CLASSES];
        for e in &self.entries {
            counts[e.meta.assigned_class.index()][e.split as usize] += 1;
        }
        counts
    }

    pub fn entries_in(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    pub fn summary(&self) -> String {
        let [train, val, test] = self.split_sizes();
        format!(
            "total {}, splits {train}/{val}/{test}",
            self.entries.len()
        )
    }

    pub fn to_canonical_json(&self) -> Result<String> {
        to_canonical_string(self)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_canonical_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: DatasetManifest = serde_json::from_str(&text)?;
        if manifest.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "manifest schema {} is not supported (expected {SCHEMA_VERSION})",
                manifest.schema_version
            )));
        }
        Ok(manifest)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub counts: [usize; NUM_CLASSES],
    pub size: usize,
    pub seed: u64,
    pub format: ImageFormat,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            counts: DEFAULT_COUNTS,
            size: 64,
            seed: 0,
            format: ImageFormat::Pgm,
        }
    }
}

/// Rounds `fraction * total` per split, then spreads each split's total
/// across classes by largest remainder. Returns `[class][split]`.
pub fn stratified_split_counts(counts: &[usize; NUM_CLASSES]) -> [[usize; 3]; NUM_CLASSES] {
    let total: usize = counts.iter().sum();
    let mut out = [[0usize; 3]; NUM_CLASSES];
    // held-out splits first (test, then val); train takes the rest
    for split in [2usize, 1] {
        let frac = SPLIT_FRACTIONS[split];
        let target = (frac * total as f64).round() as usize;
        let quotas: Vec<f64> = counts.iter().map(|&n| frac * n as f64).collect();
        let mut assigned = 0;
        for c in 0..NUM_CLASSES {
            let room = counts[c] - out[c][1] - out[c][2];
            out[c][split] = (quotas[c].floor() as usize).min(room);
            assigned += out[c][split];
        }
        let mut order: Vec<usize> = (0..NUM_CLASSES).collect();
        order.sort_by(|&a, &b| {
            let ra = quotas[a] - quotas[a].floor();
            let rb = quotas[b] - quotas[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        let mut k = 0;
        while assigned < target && k < 4 * NUM_CLASSES {
            let c = order[k % NUM_CLASSES];
            if out[c][1] + out[c][2] < counts[c] {
                out[c][split] += 1;
                assigned += 1;
            }
            k += 1;
        }
    }
    for c in 0..NUM_CLASSES {
        out[c][0] = counts[c] - out[c][1] - out[c][2];
    }
    out
}

const PARAM_STREAM: u64 = 0x5041_5241;
const SPLIT_STREAM: u64 = 0x5350_4c54;
const ANNOTATE_STREAM: u64 = 0x414e_4e4f;
const RENDER_STREAM: u64 = 0x524e_4452;

/// Per-sample spray parameters for `class`, drawn from the sample's own stream.
pub fn sample_params<R: Rng>(class: Class, annotate: Annotation, rng: &mut R) -> (SprayParams, Option<f64>) {
    let noise_sigma = rng.random_range(0.015..0.04);
    match class_interval(class) {
        None => (
            SprayParams {
                phase: Phase::PrePost,
                noise_sigma,
                annotate,
                ..SprayParams::default()
            },
            None,
        ),
        Some((lo, hi)) => {
            let c = rng.random_range(lo..hi);
            let params = SprayParams {
                n_plumes: rng.random_range(5..=7),
                collapse: c,
                cone_half_angle: rng.random_range(34.0..44.0),
                penetration: rng.random_range(0.55..0.75),
                plume_width: rng.random_range(0.022..0.032),
                tilt: rng.random_range(-6.0..6.0),
                intensity_gain: rng.random_range(0.65..0.95),
                noise_sigma,
                annotate,
                phase: Phase::Active,
            };
            (params, Some(c))
        }
    }
}

/// Renders a labelled dataset into `out_dir/images/` and writes
/// `out_dir/manifest.json`.
pub fn generate_dataset(config: &GenConfig, out_dir: &Path) -> Result<DatasetManifest> {
    if config.counts.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "every class count must be positive, got {:?}",
            config.counts
        )));
    }
    if config.size < super::render::MIN_IMAGE_SIZE {
        return Err(Error::InvalidArgument(format!(
            "size {} < {}",
            config.size,
            super::render::MIN_IMAGE_SIZE
        )));
    }
    let images = out_dir.join("images");
    fs::create_dir_all(&images).map_err(|e| Error::io(&images, e))?;

    let total: usize = config.counts.iter().sum();
    let classes: Vec<Class> = Class::ALL
        .iter()
        .zip(config.counts)
        .flat_map(|(&c, n)| std::iter::repeat_n(c, n))
        .collect();

    let mut annotations = vec![Annotation::None; total];
    {
        let mut rng = stream(config.seed, &[ANNOTATE_STREAM]);
        let mut order: Vec<usize> = (0..total).collect();
        order.shuffle(&mut rng);
        let kinds = [Annotation::RedSolidBox, Annotation::WhiteDottedBox, Annotation::TextGlyphs];
        let n_annotated = (ANNOTATED_FRACTION * total as f64).round() as usize;
        for &i in &order[..n_annotated] {
            annotations[i] = kinds[rng.random_range(0..kinds.len())];
        }
    }

    let split_counts = stratified_split_counts(&config.counts);
    let mut splits = vec![Split::Train; total];
    let mut start = 0;
    for (c, &n) in config.counts.iter().enumerate() {
        let mut idx: Vec<usize> = (start..start + n).collect();
        idx.shuffle(&mut stream(config.seed, &[SPLIT_STREAM, c as u64]));
        let [_, val, test] = split_counts[c];
        for (k, &i) in idx.iter().enumerate() {
            splits[i] = if k < test {
                Split::Test
            } else if k < test + val {
                Split::Val
            } else {
                Split::Train
            };
        }
        start += n;
    }

    let mut entries = Vec::with_capacity(total);
    for (i, &class) in classes.iter().enumerate() {
        let mut rng = stream(config.seed, &[PARAM_STREAM, i as u64]);
        let (params, true_collapse) = sample_params(class, annotations[i], &mut rng);
        let render_seed: u64 = stream(config.seed, &[RENDER_STREAM, i as u64]).random();
        let img = render_spray(&params, config.size, render_seed)?;
        let rel = format!("images/{i:05}.{}", config.format.extension());
        write_image(&img, &out_dir.join(&rel))?;
        debug_assert_eq!(class_of(true_collapse.unwrap_or(0.0), params.phase), class);
        entries.push(ManifestEntry {
            path: rel,
            label: SoftLabel::one_hot(class),
            meta: SampleMeta {
                true_collapse,
                phase: params.phase,
                assigned_class: class,
                original_class: class,
                corrupted: false,
                source_id: format!("synth-{}-{i:05}", config.seed),
                annotation: annotation_box(&params, config.size, render_seed),
            },
            split: splits[i],
        });
    }

    let manifest = DatasetManifest {
        schema_version: SCHEMA_VERSION,
        seed: config.seed,
        image_size: config.size,
        image_format: config.format,
        class_counts: config.counts,
        entries,
        provenance: Vec::new(),
    };
    manifest.write(&out_dir.join("manifest.json"))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_boundaries() {
        assert_eq!(class_of(0.0, Phase::Active), Class::NoCollapse);
        assert_eq!(class_of(0.35, Phase::Active), Class::Transitional);
        assert_eq!(class_of(0.6999, Phase::Active), Class::Transitional);
        assert_eq!(class_of(0.7, Phase::Active), Class::Collapse);
        assert_eq!(class_of(1.0, Phase::Active), Class::Collapse);
        assert_eq!(class_of(0.9, Phase::PrePost), Class::PrePost);
    }

    #[test]
    fn default_split_totals() {
        let s = stratified_split_counts(&DEFAULT_COUNTS);
        let totals: Vec<usize> = (0..3).map(|k| s.iter().map(|c| c[k]).sum()).collect();
        assert_eq!(totals, vec![658, 132, 88]);
        for (c, &n) in DEFAULT_COUNTS.iter().enumerate() {
            assert_eq!(s[c].iter().sum::<usize>(), n);
            assert!((s[c][2] as f64 - 0.1 * n as f64).abs() <= 1.0);
            assert!((s[c][1] as f64 - 0.15 * n as f64).abs() <= 1.0);
        }
    }

    #[test]
    fn tiny_counts_still_reconcile() {
        for counts in [[4, 4, 4, 4], [1, 1, 1, 1], [1, 2, 3, 50]] {
            let s = stratified_split_counts(&counts);
            for c in 0..4 {
                assert_eq!(s[c].iter().sum::<usize>(), counts[c]);
            }
        }
    }

    #[test]
    fn zero_counts_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = GenConfig {
            counts: [0, 1, 1, 1],
            ..Default::default()
        };
        assert!(generate_dataset(&cfg, dir.path()).is_err());
    }
}
