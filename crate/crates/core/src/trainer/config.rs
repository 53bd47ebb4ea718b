use serde::{Deserialize, Serialize};

use crate::augment::AugmentConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Mixup (`augment.alpha`, 0 = off) and geometric augmentation.
    pub augment: AugmentConfig,
    pub batch_size: usize,
    pub init_lr: f64,
    /// Epochs without validation-loss improvement before the learning rate is divided.
    pub plateau_patience: usize,
    pub plateau_factor: f64,
    /// Epochs without validation-loss improvement before training stops.
    pub early_stop_patience: usize,
    pub max_epochs: usize,
    /// Improvements must beat the best validation loss by more than this.
    pub min_delta: f64,
    /// Trailing epochs averaged by the train/validation gap diagnostic.
    pub gap_window: usize,
    pub image_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            augment: AugmentConfig::default(),
            batch_size: 32,
            init_lr: 0.001,
            plateau_patience: 5,
            plateau_factor: 10.0,
            early_stop_patience: 50,
            max_epochs: 200,
            min_delta: 1e-6,
            gap_window: 50,
            image_size: 64,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Scaled-down schedule for desk-scale runs: 40 epochs, patiences 3 / 15,
    /// a 10-epoch gap window, 64x64 images.
    pub fn desk() -> Self {
        TrainConfig {
            plateau_patience: 3,
            early_stop_patience: 15,
            max_epochs: 40,
            gap_window: 10,
            image_size: 64,
            ..Default::default()
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.augment.alpha = alpha;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.augment.alpha
    }

    pub fn validate(&self) -> Result<()> {
        self.augment.validate()?;
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.plateau_patience == 0 || self.early_stop_patience == 0 {
            return bad("patiences must be >= 1".into());
        }
        if !(self.plateau_factor > 1.0) {
            return bad(format!("plateau_factor must be > 1, got {}", self.plateau_factor));
        }
        if self.batch_size == 0 || (self.augment.mixup_enabled() && self.batch_size < 2) {
            return bad(format!("batch_size {} too small", self.batch_size));
        }
        if !(self.init_lr > 0.0) {
            return bad(format!("init_lr must be > 0, got {}", self.init_lr));
        }
        if self.max_epochs == 0 || self.gap_window == 0 {
            return bad("max_epochs and gap_window must be >= 1".into());
        }
        if !(self.min_delta >= 0.0) {
            return bad("min_delta must be >= 0".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_protocol() {
        let c = TrainConfig::default();
        assert_eq!((c.batch_size, c.init_lr, c.plateau_patience, c.early_stop_patience), (32, 0.001, 5, 50));
        assert_eq!((c.plateau_factor, c.max_epochs), (10.0, 200));
        c.validate().unwrap();
        TrainConfig::desk().validate().unwrap();
    }

    #[test]
    fn invalid_configs_rejected() {
        let c = TrainConfig {
            plateau_patience: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = TrainConfig {
            plateau_factor: 1.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = TrainConfig {
            batch_size: 1,
            ..Default::default()
        }
        .with_alpha(0.2);
        assert!(c.validate().is_err());
    }
}
