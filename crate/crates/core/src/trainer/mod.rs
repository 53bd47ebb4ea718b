//! The training protocol: minibatch loop, reduce-on-plateau, early stopping,
//! k-fold cross-validation and the train/validation gap diagnostic.

pub mod config;
pub mod experiment;
pub mod kfold;
pub mod schedule;
pub mod train;

pub use config::TrainConfig;
pub use experiment::{corrupt_training_labels, mean_of, run_condition, ConditionResult};
pub use kfold::{kfold_cv, stratified_folds, KFoldReport};
pub use schedule::{lr_sequence, EpochDecision, PlateauSchedule};
pub use train::{
    evaluate_loss_acc, stack_images, train, train_val_gap, AuditEntry, EpochRecord, RunHistory, StopReason,
    TrainOutcome,
};
