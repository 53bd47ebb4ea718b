//! Reduce-on-plateau and early stopping, driven only by the validation loss.
//!
//! Both counters reset on improvement and otherwise advance together; a
//! learning-rate reduction resets the plateau counter but not the early-stop
//! counter.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateauSchedule {
    lr: f64,
    factor: f64,
    plateau_patience: usize,
    early_stop_patience: usize,
    min_delta: f64,
    best: f64,
    best_epoch: Option<usize>,
    plateau_wait: usize,
    stop_wait: usize,
    epochs_seen: usize,
}

/// Outcome of observing one epoch's validation loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochDecision {
    pub improved: bool,
    /// Learning rate for the next epoch.
    pub next_lr: f64,
    pub lr_reduced: bool,
    pub stop: bool,
}

impl PlateauSchedule {
    pub fn new(
        init_lr: f64,
        factor: f64,
        plateau_patience: usize,
        early_stop_patience: usize,
        min_delta: f64,
    ) -> Self {
        PlateauSchedule {
            lr: init_lr,
            factor,
            plateau_patience,
            early_stop_patience,
            min_delta,
            best: f64::INFINITY,
            best_epoch: None,
            plateau_wait: 0,
            stop_wait: 0,
            epochs_seen: 0,
        }
    }

    pub fn from_config(config: &super::TrainConfig) -> Self {
        PlateauSchedule::new(
            config.init_lr,
            config.plateau_factor,
            config.plateau_patience,
            config.early_stop_patience,
            config.min_delta,
        )
    }

    /// Learning rate for the current epoch.
    pub fn lr(&self) -> f64 {
        self.lr
    }

    pub fn best(&self) -> f64 {
        self.best
    }

    pub fn best_epoch(&self) -> Option<usize> {
        self.best_epoch
    }

    pub fn observe(&mut self, val_loss: f64) -> EpochDecision {
        let epoch = self.epochs_seen;
        self.epochs_seen += 1;
        let improved = val_loss < self.best - self.min_delta;
        let mut lr_reduced = false;
        if improved {
            self.best = val_loss;
            self.best_epoch = Some(epoch);
            self.plateau_wait = 0;
            self.stop_wait = 0;
        } else {
            self.plateau_wait += 1;
            self.stop_wait += 1;
            if self.plateau_wait >= self.plateau_patience {
                self.lr /= self.factor;
                self.plateau_wait = 0;
                lr_reduced = true;
            }
        }
        EpochDecision {
            improved,
            next_lr: self.lr,
            lr_reduced,
            stop: self.stop_wait >= self.early_stop_patience,
        }
    }
}

/// Learning rate used in each epoch for a scripted validation-loss sequence,
/// truncated where early stopping fires.
pub fn lr_sequence(val_losses: &[f64], mut schedule: PlateauSchedule) -> (Vec<f64>, Option<usize>) {
    let mut lrs = Vec::with_capacity(val_losses.len());
    for (epoch, &loss) in val_losses.iter().enumerate() {
        lrs.push(schedule.lr());
        if schedule.observe(loss).stop {
            return (lrs, Some(epoch));
        }
    }
    (lrs, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_losses_reduce_after_patience() {
        let s = PlateauSchedule::new(0.001, 10.0, 5, 50, 1e-6);
        let (lrs, stop) = lr_sequence(&[1.0; 12], s);
        assert_eq!(stop, None);
        assert_eq!(&lrs[..6], &[0.001; 6]);
        assert_eq!(&lrs[6..11], &[0.0001; 5]);
        // the counter restarts after a reduction
        assert_eq!(lrs[11], 0.0001 / 10.0);
    }

    #[test]
    fn tiny_improvements_do_not_count() {
        let mut s = PlateauSchedule::new(0.1, 10.0, 2, 10, 1e-6);
        assert!(s.observe(1.0).improved);
        assert!(!s.observe(1.0 - 5e-7).improved);
        assert!(s.observe(0.9).improved);
    }
}
