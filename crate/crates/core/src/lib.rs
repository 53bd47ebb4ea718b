//! Mixup training for a small convolutional spray-morphology classifier,
//! together with a procedural spray-image generator that produces a
//! continuum between regimes.
//!
//! The crate is organised bottom-up:
//!
//! - [`netcore`]: tensors, the `SprayNet` classifier, loss, optimizers.
//! - [`synthgen`]: spray rendering, dataset generation, label corruption.
//! - [`augment`]: Beta sampling, mixup, geometric transforms, the pipeline.
//! - [`trainer`]: the training loop, schedules, k-fold cross-validation.
//! - [`metrics`]: confusion matrices, class reports, run comparison.
//! - [`store`]: image IO, canonical JSON, checkpoints, run directories.

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod augment;
pub mod error;
pub mod image;
pub mod label;
pub mod metrics;
pub mod netcore;
pub mod rng;
pub mod store;
pub mod synthgen;
pub mod tensor;
pub mod trainer;

pub use error::{Error, Result};
pub use image::ImageTensor;
pub use label::{Class, SoftLabel, NUM_CLASSES};
pub use tensor::Tensor;

/// One labelled training example.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub image: ImageTensor,
    pub label: SoftLabel,
}
