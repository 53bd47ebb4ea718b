//! Dense tensors, the convolutional classifier, soft-label loss, optimizers
//! and gradient verification.

pub mod gradcheck;
mod kernels;
pub mod loss;
pub mod model;
pub mod optim;
pub mod spec;

pub use gradcheck::{check_gradients, GradCheckReport};
pub use loss::{soft_cross_entropy, soft_cross_entropy_raw, LOG_CLIP};
pub use model::{argmax_rows, LossGrad, Model};
pub use optim::OptimizerState;
pub use spec::{ActShape, LayerSpec, ModelSpec};
