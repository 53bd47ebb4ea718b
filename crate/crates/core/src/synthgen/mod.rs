//! Procedural spray rendering, dataset generation with stratified splits,
//! and label corruption.

pub mod corrupt;
pub mod dataset;
pub mod render;

pub use corrupt::{corrupt_labels, corrupt_labels_in, CorruptionMode, CorruptionReport};
pub use dataset::{
    class_interval, class_of, generate_dataset, stratified_split_counts, DatasetManifest, GenConfig,
    ManifestEntry, SampleMeta, Split, COLLAPSE_THRESHOLD, DEFAULT_COUNTS, TRANSITIONAL_THRESHOLD,
};
pub use render::{
    annotation_box, apply_color_annotation, render_spray, Annotation, AnnotationBox, Phase, SprayParams,
    MIN_IMAGE_SIZE,
};
