//! Mixup sampling and blending, geometric augmentation, and the
//! mixup-first augmentation pipeline.

pub mod beta;
pub mod geometric;
pub mod mixup;
pub mod pipeline;

pub use beta::{gamma_variate, sample_lambda};
pub use geometric::{hflip_image, rotate_image, shift_image};
pub use mixup::{mixup_batch, mixup_pair, MixupRecord};
pub use pipeline::{AugmentConfig, AugmentedBatch, Pipeline, Stage};
