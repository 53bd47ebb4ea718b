use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::schedule::PlateauSchedule;
use crate::augment::Pipeline;
use crate::error::{Error, Result};
use crate::netcore::{argmax_rows, soft_cross_entropy, Model, OptimizerState};
use crate::rng::stream;
use crate::{Sample, SoftLabel, Tensor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub val_loss: f64,
    pub val_acc: f64,
    /// Learning rate used during this epoch.
    pub lr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxEpochs,
    EarlyStopping,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::MaxEpochs => "max_epochs",
            StopReason::EarlyStopping => "early_stopping",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHistory {
    pub epochs: Vec<EpochRecord>,
    pub stop_reason: StopReason,
    /// Epoch with the lowest validation loss.
    pub best_epoch: usize,
}

impl RunHistory {
    /// `epoch,train_loss,train_acc,val_loss,val_acc,lr` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,train_acc,val_loss,val_acc,lr\n");
        for e in &self.epochs {
            out.push_str(&format!(
                "{},{:?},{:?},{:?},{:?},{:?}\n",
                e.epoch, e.train_loss, e.train_acc, e.val_loss, e.val_acc, e.lr
            ));
        }
        out
    }

    fn window(&self, last_n: usize) -> &[EpochRecord] {
        &self.epochs[self.epochs.len().saturating_sub(last_n)..]
    }

    /// Mean training accuracy over the final `min(last_n, len)` epochs.
    pub fn mean_train_acc(&self, last_n: usize) -> f64 {
        let w = self.window(last_n);
        w.iter().map(|e| e.train_acc).sum::<f64>() / w.len().max(1) as f64
    }
}

/// Mean of `train_acc - val_acc` over the final `min(last_n, len)` epochs;
/// shorter histories are averaged over every epoch.
pub fn train_val_gap(history: &RunHistory, last_n: usize) -> f64 {
    let w = history.window(last_n.max(1));
    if w.is_empty() {
        return 0.0;
    }
    w.iter().map(|e| e.train_acc - e.val_acc).sum::<f64>() / w.len() as f64
}

/// One pipeline invocation: which training samples fed which batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditEntry {
    pub epoch: usize,
    pub batch: usize,
    /// Indices into the training split.
    pub sources: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub history: RunHistory,
    /// Parameters at the epoch with the lowest validation loss.
    pub best_model: Model,
    pub final_model: Model,
    /// Every augmentation-pipeline call made during training.
    pub audit: Vec<AuditEntry>,
}

/// Stacks three- or one-channel images into an `[N, C, H, W]` tensor.
pub fn stack_images(samples: &[Sample]) -> Result<Tensor> {
    let first = samples
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty batch".into()))?;
    let (c, h, w) = (first.image.channels(), first.image.height(), first.image.width());
    let mut data = Vec::with_capacity(samples.len() * c * h * w);
    for s in samples {
        if !s.image.same_shape(&first.image) {
            return Err(Error::Shape("images in a batch differ in shape".into()));
        }
        data.extend_from_slice(s.image.values());
    }
    Tensor::from_vec(&[samples.len(), c, h, w], data)
}

const EVAL_CHUNK: usize = 64;

/// Clean (un-augmented) mean loss and accuracy against each label's argmax.
pub fn evaluate_loss_acc(model: &Model, samples: &[Sample]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("cannot evaluate an empty split".into()));
    }
    let mut loss = 0.0;
    let mut correct = 0;
    for chunk in samples.chunks(EVAL_CHUNK) {
        let probs = model.forward(&stack_images(chunk)?)?;
        let labels: Vec<SoftLabel> = chunk.iter().map(|s| s.label).collect();
        loss += soft_cross_entropy(&probs, &labels)? * chunk.len() as f64;
        correct += argmax_rows(&probs)
            .iter()
            .zip(&labels)
            .filter(|(p, l)| **p == l.argmax().index())
            .count();
    }
    Ok((loss / samples.len() as f64, correct as f64 / samples.len() as f64))
}

const SHUFFLE_STREAM: u64 = 0x5348_5546;
const AUGMENT_SEED_SALT: u64 = 0x4155_474d;

/// Minibatch Adam training with mixup-first augmentation, reduce-on-plateau
/// and early stopping on the validation loss.
///
/// Training accuracy is a running figure over the epoch's batches, scored
/// against the argmax of each (possibly mixed) label. Validation data is never
/// augmented.
pub fn train(model: Model, train: &[Sample], val: &[Sample], config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    if train.is_empty() || val.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "train ({}) and validation ({}) splits must be non-empty",
            train.len(),
            val.len()
        )));
    }
    let pipeline = Pipeline::new(config.augment)?;
    let mut model = model;
    let mut optimizer = OptimizerState::adam(config.init_lr, model.params());
    let mut schedule = PlateauSchedule::from_config(config);
    let mut best_model = model.clone();
    let mut epochs = Vec::new();
    let mut audit = Vec::new();
    let mut stop_reason = StopReason::MaxEpochs;
    let augment_seed = config.seed ^ AUGMENT_SEED_SALT;

    for epoch in 0..config.max_epochs {
        let lr = schedule.lr();
        optimizer.set_lr(lr);
        let mut order: Vec<usize> = (0..train.len()).collect();
        order.shuffle(&mut stream(config.seed, &[SHUFFLE_STREAM, epoch as u64]));

        let mut loss_sum = 0.0;
        let mut correct = 0usize;
        let mut seen = 0usize;
        for (b, idx) in order.chunks(config.batch_size).enumerate() {
            if idx.len() < 2 && config.augment.mixup_enabled() {
                continue;
            }
            let sources: Vec<Sample> = idx.iter().map(|&i| train[i].clone()).collect();
            let batch_id = ((epoch as u64) << 32) | b as u64;
            let augmented = pipeline.run(&sources, augment_seed, batch_id)?;
            audit.push(AuditEntry {
                epoch,
                batch: b,
                sources: idx.to_vec(),
            });
            let inputs = stack_images(&augmented.samples)?;
            let targets: Vec<SoftLabel> = augmented.samples.iter().map(|s| s.label).collect();
            let step = model.loss_and_grad(&inputs, &targets)?;
            if !step.loss.is_finite() || step.grads.iter().any(|g| !g.is_finite()) {
                return Err(Error::Diverged {
                    epoch,
                    detail: format!("batch {b} loss {}", step.loss),
                });
            }
            optimizer.step(model.params_mut(), &step.grads)?;
            loss_sum += step.loss * idx.len() as f64;
            correct += argmax_rows(&step.probs)
                .iter()
                .zip(&targets)
                .filter(|(p, t)| **p == t.argmax().index())
                .count();
            seen += idx.len();
        }

        let (val_loss, val_acc) = evaluate_loss_acc(&model, val)?;
        if !val_loss.is_finite() {
            return Err(Error::Diverged {
                epoch,
                detail: format!("validation loss {val_loss}"),
            });
        }
        epochs.push(EpochRecord {
            epoch,
            train_loss: loss_sum / seen.max(1) as f64,
            train_acc: correct as f64 / seen.max(1) as f64,
            val_loss,
            val_acc,
            lr,
        });
        let decision = schedule.observe(val_loss);
        if decision.improved {
            best_model = model.clone();
        }
        if decision.stop {
            stop_reason = StopReason::EarlyStopping;
            break;
        }
    }

    Ok(TrainOutcome {
        history: RunHistory {
            epochs,
            stop_reason,
            best_epoch: schedule.best_epoch().unwrap_or(0),
        },
        best_model,
        final_model: model,
        audit,
    })
}
