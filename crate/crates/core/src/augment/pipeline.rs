use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geometric::{hflip_image, rotate_image, shift_image};
use super::mixup::{mixup_batch, MixupRecord};
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::Sample;

pub const DEFAULT_ROTATION_LIMIT: f64 = 20.0;
pub const DEFAULT_SHIFT_LIMIT: f64 = 0.2;

/// Augmentation settings. Mixup always runs before any geometric operation;
/// the order is not configurable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    /// Beta shape; 0 disables mixup.
    pub alpha: f64,
    /// Maximum rotation magnitude in degrees; 0 disables rotation.
    pub rotation_max: f64,
    /// Maximum shift as a fraction of the image side; 0 disables shifting.
    pub shift_max: f64,
    pub hflip: bool,
    /// Permits `rotation_max > 20` or `shift_max > 0.2`.
    #[serde(default)]
    pub extended_range: bool,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            alpha: 0.0,
            rotation_max: 0.0,
            shift_max: 0.0,
            hflip: false,
            extended_range: false,
        }
    }
}

impl AugmentConfig {
    pub fn mixup(alpha: f64) -> Self {
        AugmentConfig {
            alpha,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::InvalidArgument(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        let (rot_cap, shift_cap) = if self.extended_range {
            (180.0, 1.0)
        } else {
            (DEFAULT_ROTATION_LIMIT, DEFAULT_SHIFT_LIMIT)
        };
        if !(0.0..=rot_cap).contains(&self.rotation_max) {
            return Err(Error::InvalidArgument(format!(
                "rotation_max {} outside [0, {rot_cap}]",
                self.rotation_max
            )));
        }
        if !(0.0..=shift_cap).contains(&self.shift_max) {
            return Err(Error::InvalidArgument(format!(
                "shift_max {} outside [0, {shift_cap}]",
                self.shift_max
            )));
        }
        Ok(())
    }

    pub fn mixup_enabled(&self) -> bool {
        self.alpha > 0.0
    }

    /// Rotation bounded by `rotation_max`.
    pub fn rotate(&self, img: &crate::ImageTensor, degrees: f64) -> Result<crate::ImageTensor> {
        if degrees.abs() > self.rotation_max {
            return Err(Error::InvalidArgument(format!(
                "rotation {degrees} exceeds limit {}",
                self.rotation_max
            )));
        }
        Ok(rotate_image(img, degrees))
    }

    /// Shift bounded by `shift_max` on both axes.
    pub fn shift(&self, img: &crate::ImageTensor, dx: f64, dy: f64) -> Result<crate::ImageTensor> {
        if dx.abs() > self.shift_max || dy.abs() > self.shift_max {
            return Err(Error::InvalidArgument(format!(
                "shift ({dx}, {dy}) exceeds limit {}",
                self.shift_max
            )));
        }
        Ok(shift_image(img, dx, dy))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum Stage {
    Mixup { alpha: f64 },
    Rotate { max_degrees: f64 },
    Shift { max_fraction: f64 },
    HFlip,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Mixup { alpha } if *alpha == 0.0 => write!(f, "mixup(off)"),
            Stage::Mixup { alpha } => write!(f, "mixup(alpha={alpha})"),
            Stage::Rotate { max_degrees } => write!(f, "rotate(<={max_degrees}deg)"),
            Stage::Shift { max_fraction } => write!(f, "shift(<={max_fraction})"),
            Stage::HFlip => write!(f, "hflip(p=0.5)"),
        }
    }
}

/// Output of one pipeline call.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedBatch {
    pub samples: Vec<Sample>,
    /// Empty when mixup is off.
    pub records: Vec<MixupRecord>,
}

/// Training-batch augmentation: mixup, then per-image geometric operations.
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: AugmentConfig,
}

const MIXUP_STREAM: u64 = u64::MAX;

impl Pipeline {
    pub fn new(config: AugmentConfig) -> Result<Self> {
        config.validate()?;
        Ok(Pipeline { config })
    }

    pub fn config(&self) -> &AugmentConfig {
        &self.config
    }

    /// Stages in execution order. Mixup is always first.
    pub fn stages(&self) -> Vec<Stage> {
        let mut stages = vec![Stage::Mixup {
            alpha: self.config.alpha,
        }];
        if self.config.rotation_max > 0.0 {
            stages.push(Stage::Rotate {
                max_degrees: self.config.rotation_max,
            });
        }
        if self.config.shift_max > 0.0 {
            stages.push(Stage::Shift {
                max_fraction: self.config.shift_max,
            });
        }
        if self.config.hflip {
            stages.push(Stage::HFlip);
        }
        stages
    }

    pub fn describe(&self) -> String {
        let names: Vec<String> = self.stages().iter().map(|s| s.to_string()).collect();
        format!("[{}]", names.join(", "))
    }

    /// Augments one training batch. Randomness is derived from
    /// `(seed, batch_index)` for mixup and `(seed, batch_index, image_index)`
    /// for geometric operations.
    pub fn run(&self, batch: &[Sample], seed: u64, batch_index: u64) -> Result<AugmentedBatch> {
        let (mut samples, records) = if self.config.mixup_enabled() {
            let mut rng = stream(seed, &[batch_index, MIXUP_STREAM]);
            mixup_batch(batch, self.config.alpha, &mut rng)?
        } else {
            (batch.to_vec(), Vec::new())
        };
        for (j, sample) in samples.iter_mut().enumerate() {
            let mut rng = stream(seed, &[batch_index, j as u64]);
            self.apply_geometric(sample, &mut rng)?;
        }
        Ok(AugmentedBatch { samples, records })
    }

    fn apply_geometric<R: Rng>(&self, sample: &mut Sample, rng: &mut R) -> Result<()> {
        let c = &self.config;
        if c.rotation_max > 0.0 {
            let deg = rng.random_range(-c.rotation_max..=c.rotation_max);
            sample.image = c.rotate(&sample.image, deg)?;
        }
        if c.shift_max > 0.0 {
            let dx = rng.random_range(-c.shift_max..=c.shift_max);
            let dy = rng.random_range(-c.shift_max..=c.shift_max);
            sample.image = c.shift(&sample.image, dx, dy)?;
        }
        if c.hflip && rng.random::<bool>() {
            sample.image = hflip_image(&sample.image);
        }
        Ok(())
    }
}
